#include "tether/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tether/core/convolution.hpp"
#include "tether/core/csv.hpp"
#include "tether/core/domain.hpp"
#include "tether/core/error.hpp"
#include "tether/core/fft.hpp"
#include "tether/core/quadrature.hpp"

namespace tether {

std::string_view to_string(KernelFamily family) noexcept {
    switch (family) {
        case KernelFamily::QuadraticCompact: return "quadratic-compact";
        case KernelFamily::ExponentialForce: return "exponential-force";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
    if (name == "quadratic-compact") return KernelFamily::QuadraticCompact;
    if (name == "exponential-force") return KernelFamily::ExponentialForce;
    throw Error("unknown kernel family '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw Error("kernel radius must be positive");
    if (!std::isfinite(mass)) throw Error("kernel mass must be finite");
    if (dimension != 1 && dimension != 2) throw Error("kernel dimension must be 1 or 2");
}

double KernelSpec::support() const noexcept {
    return family == KernelFamily::QuadraticCompact ? radius
                                                    : std::numeric_limits<double>::infinity();
}

namespace {

/// Radial profile phi(r) and its derivative d phi / d r for r >= 0.
double radial_potential(const KernelSpec& k, double r) {
    const double R = k.radius;
    if (k.family == KernelFamily::QuadraticCompact) {
        if (r >= R) return 0.0;
        const double u = R - r;
        if (k.dimension == 1) return k.mass * 1.5 / R * (u * u) / (R * R);
        return 3.0 * k.mass / (2.0 * std::numbers::pi * R * R * R) * u * u;
    }
    if (k.dimension == 1) return k.mass / (2.0 * R) * std::exp(-r / R);
    return k.mass / (2.0 * std::numbers::pi * R * R) * std::exp(-r / R);
}

double radial_derivative(const KernelSpec& k, double r) {
    const double R = k.radius;
    if (k.family == KernelFamily::QuadraticCompact) {
        if (r >= R) return 0.0;
        const double u = R - r;
        if (k.dimension == 1) return -3.0 * k.mass / (R * R * R) * u;
        return -3.0 * k.mass / (std::numbers::pi * R * R * R) * u;
    }
    if (k.dimension == 1) return -k.mass / (2.0 * R * R) * std::exp(-r / R);
    return -k.mass / (2.0 * std::numbers::pi * R * R * R) * std::exp(-r / R);
}

/// d^2 phi / d r^2 on r > 0 (1D kernels only).
double radial_second_derivative(const KernelSpec& k, double r) {
    const double R = k.radius;
    if (k.family == KernelFamily::QuadraticCompact) return r < R ? 3.0 * k.mass / (R * R * R) : 0.0;
    return k.mass / (2.0 * R * R * R) * std::exp(-r / R);
}

double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_1d(const KernelSpec& k, const char* what) {
    if (k.dimension != 1) throw Error(std::string(what) + " is defined for 1D kernels only");
}

}  // namespace

double potential(const KernelSpec& kernel, double x) { return radial_potential(kernel, std::abs(x)); }

double potential(const KernelSpec& kernel, Vec2 x) { return radial_potential(kernel, norm(x)); }

double force(const KernelSpec& kernel, double x) {
    return radial_derivative(kernel, std::abs(x)) * sign(x);
}

Vec2 force(const KernelSpec& kernel, Vec2 x) {
    // Separations are bounded by the box, so hypot's overflow guard is not needed.
    const double r = std::sqrt(norm2(x));
    if (r == 0.0) return {};
    return (radial_derivative(kernel, r) / r) * x;
}

double fourier_coefficient(const KernelSpec& kernel, double k) {
    require_1d(kernel, "fourier_coefficient");
    const double C = kernel.mass;
    const double s = std::abs(kernel.radius * k);
    if (kernel.family == KernelFamily::ExponentialForce) return C / (1.0 + s * s);
    if (s < 0.05) {
        // 6 (s - sin s) / s^3 = 1 - s^2/20 + s^4/840 - s^6/60480 + ...
        const double s2 = s * s;
        return C * (1.0 - s2 / 20.0 * (1.0 - s2 / 42.0 * (1.0 - s2 / 72.0)));
    }
    return 6.0 * C * (s - std::sin(s)) / (s * s * s);
}

double fourier_coefficient_dft(const KernelSpec& kernel, double k, std::size_t n_cells,
                               double length) {
    require_1d(kernel, "fourier_coefficient_dft");
    const Grid1D grid(n_cells, length);
    // Sum over periodic images so kernels wider than the cell are periodised.
    const int images = kernel.family == KernelFamily::QuadraticCompact
                           ? static_cast<int>(std::ceil(kernel.radius / length))
                           : 0;
    const auto samples = sample_kernel(grid, [&](double x) {
        double s = 0.0;
        for (int j = -images; j <= images; ++j) s += potential(kernel, x + j * length);
        return s;
    });
    double re = 0.0;
    for (std::size_t m = 0; m < samples.size(); ++m) {
        const double x = min_image(static_cast<double>(m) * grid.dx(), 0.0, length);
        re += samples[m] * std::cos(k * x);
    }
    // The kernel is even, so the imaginary part vanishes.
    return re * grid.dx();
}

double truncation_error_bound(const KernelSpec& kernel, double length) noexcept {
    if (kernel.family == KernelFamily::QuadraticCompact) return 0.0;
    return std::abs(kernel.mass) * std::exp(-0.5 * length / kernel.radius);
}

double macro_kernel(const KernelSpec& kernel, double x) {
    require_1d(kernel, "macro_kernel");
    const double R = kernel.radius;
    const double a = std::abs(x);
    if (kernel.family == KernelFamily::ExponentialForce) {
        const double C = kernel.mass;
        return -C * C / (4.0 * std::pow(R, 4)) * std::exp(-a / R) * (R - a);
    }
    if (a >= 2.0 * R) return 0.0;
    // W(x) = int phi'(y) phi'(x - y) dy, evaluated at |x| so W is exactly even.
    // The integrand is piecewise polynomial with breaks at 0, x and the
    // support edges.
    std::vector<double> breaks{-R, 0.0, R, a - R, a, a + R};
    return integrate_piecewise(
        [&](double y) { return force(kernel, y) * force(kernel, a - y); }, a - R, R, breaks);
}

double macro_kernel_force(const KernelSpec& kernel, double x) {
    require_1d(kernel, "macro_kernel_force");
    const double R = kernel.radius;
    const double a = std::abs(x);
    const double C = kernel.mass;
    if (kernel.family == KernelFamily::ExponentialForce)
        return C * C / (4.0 * std::pow(R, 5)) * std::exp(-a / R) * (2.0 * R - a) * sign(x);
    if (a >= 2.0 * R || x == 0.0) return 0.0;
    // phi'' = (smooth part) + 2 phi'(0+) delta, so
    // W'(x) = 2 phi'(0+) phi'(x) + int phi''_smooth(z) phi'(x - z) dz.
    const double dphi0 = radial_derivative(kernel, 0.0);
    const double singular = 2.0 * dphi0 * force(kernel, a);
    std::vector<double> breaks{-R, 0.0, R, a - R, a, a + R};
    const double smooth = integrate_piecewise(
        [&](double z) { return radial_second_derivative(kernel, std::abs(z)) * force(kernel, a - z); },
        a - R, R, breaks);
    return (singular + smooth) * sign(x);
}

MacroKernel make_macro_kernel(const KernelSpec& kernel, const Grid1D& grid) {
    kernel.validate();
    MacroKernel mk{kernel, grid, {}, {}};
    mk.w = sample_kernel(grid, [&](double x) { return macro_kernel(kernel, x); });
    mk.dw = sample_kernel(grid, [&](double x) { return macro_kernel_force(kernel, x); });
    return mk;
}

void dump_kernel_csv(const KernelSpec& kernel, const Grid1D& grid,
                     const std::filesystem::path& path) {
    CsvWriter out(path, {"x", "phi", "dphi", "W", "dW"});
    const double L = grid.length();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i) - 0.5 * L;
        out.cell(x).cell(potential(kernel, x)).cell(force(kernel, x));
        out.cell(macro_kernel(kernel, x)).cell(macro_kernel_force(kernel, x));
        out.end_row();
    }
    out.close();
}

}  // namespace tether
