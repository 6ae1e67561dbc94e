#include "tether/asymptotics/moments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "tether/core/error.hpp"
#include "tether/core/fft.hpp"
#include "tether/core/quadrature.hpp"

namespace tether {

namespace {

using cplx = std::complex<double>;

cplx ik_power(double k, int order) {
    cplx f{1.0, 0.0};
    for (int p = 0; p < order; ++p) f *= cplx{0.0, k};
    return f;
}

template <class Multiplier>
DensityField apply_multiplier_1d(const DensityField& f, Multiplier mult) {
    const auto& g = f.grid();
    const RealFft fft(g.size());
    auto spec = fft.forward(f.values());
    for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= mult(m, fft.wavenumber(m, g.length()));
    return DensityField(g, fft.inverse(spec));
}

template <class Multiplier>
PeriodicField2D apply_multiplier_2d(const PeriodicField2D& f, Multiplier mult) {
    const Fft2D fft(f.nx, f.ny);
    auto spec = fft.forward(f.values);
    for (std::size_t a = 0; a < f.nx; ++a) {
        const long fa = Fft2D::signed_frequency(a, f.nx);
        const double kx = 2.0 * std::numbers::pi * static_cast<double>(fa) / f.lx;
        const bool nyq_x = f.nx % 2 == 0 && a == f.nx / 2;
        for (std::size_t b = 0; b < f.ny; ++b) {
            const long fb = Fft2D::signed_frequency(b, f.ny);
            const double ky = 2.0 * std::numbers::pi * static_cast<double>(fb) / f.ly;
            const bool nyq_y = f.ny % 2 == 0 && b == f.ny / 2;
            spec[a * f.ny + b] *= mult(kx, ky, nyq_x, nyq_y);
        }
    }
    PeriodicField2D out = f;
    out.values = fft.inverse_real(spec);
    return out;
}

void require_same(const PeriodicField2D& a, const PeriodicField2D& b) {
    if (!a.same_grid(b)) throw Error("2D fields are on different grids");
}

}  // namespace

PeriodicField2D::PeriodicField2D(std::size_t nx_, std::size_t ny_, double lx_, double ly_, double fill)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_), values(nx_ * ny_, fill) {
    if (nx < 2 || ny < 2) throw Error("2D grid needs at least 2 cells per axis");
    if (!(lx > 0.0) || !(ly > 0.0)) throw Error("2D domain lengths must be > 0");
}

double PeriodicField2D::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

bool PeriodicField2D::same_grid(const PeriodicField2D& o) const noexcept {
    return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
}

PeriodicField2D PeriodicField2D::sample(std::size_t nx, std::size_t ny,
                                        const std::function<double(double, double)>& f, double lx,
                                        double ly) {
    PeriodicField2D out(nx, ny, lx, ly);
    for (std::size_t a = 0; a < nx; ++a)
        for (std::size_t b = 0; b < ny; ++b) out.at(a, b) = f(out.x(a), out.y(b));
    return out;
}

PeriodicField2D spectral_derivative(const PeriodicField2D& f, int ox, int oy) {
    if (ox < 0 || oy < 0) throw Error("derivative order must be >= 0");
    return apply_multiplier_2d(f, [&](double kx, double ky, bool nx_, bool ny_) {
        if ((nx_ && ox % 2 == 1) || (ny_ && oy % 2 == 1)) return cplx{0.0, 0.0};
        return ik_power(kx, ox) * ik_power(ky, oy);
    });
}

DensityField spectral_derivative(const DensityField& f, int order) {
    if (order < 0) throw Error("derivative order must be >= 0");
    const std::size_t n = f.size();
    return apply_multiplier_1d(f, [&](std::size_t m, double k) {
        if (n % 2 == 0 && m == n / 2 && order % 2 == 1) return cplx{0.0, 0.0};
        return ik_power(k, order);
    });
}

SampledVelocity1D sample_velocity(const ExternalVelocityField& field, const Grid1D& grid, double t) {
    if (field.dimension() != 1) throw Error("expected a 1D velocity field");
    SampledVelocity1D out{DensityField(grid), DensityField(grid)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double y[1] = {grid.x(i)};
        const auto j = field.jet(y, t);
        out.v[i] = j.v[0];
        out.dt_v[i] = j.dt_v[0];
    }
    return out;
}

SampledVelocity2D sample_velocity(const ExternalVelocityField& field, std::size_t nx, std::size_t ny,
                                  double t) {
    if (field.dimension() != 2) throw Error("expected a 2D velocity field");
    const PeriodicField2D zero(nx, ny);
    SampledVelocity2D out{{zero, zero}, {zero, zero}};
    for (std::size_t a = 0; a < nx; ++a)
        for (std::size_t b = 0; b < ny; ++b) {
            const double y[2] = {zero.x(a), zero.y(b)};
            const auto j = field.jet(y, t);
            for (std::size_t c = 0; c < 2; ++c) {
                out.v[c].at(a, b) = j.v[c];
                out.dt_v[c].at(a, b) = j.dt_v[c];
            }
        }
    return out;
}

MomentFields1D rho_f_moment_formulas(const SampledVelocity1D& s, double delta) {
    require_same_grid(s.v, s.dt_v);
    const DensityField div = spectral_derivative(s.v, 1);
    const DensityField lap_div = spectral_derivative(s.v, 3);
    const DensityField dt_div = spectral_derivative(s.dt_v, 1);
    DensityField f1(s.v.grid()), bracket(s.v.grid());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        f1[i] = -div[i] - 0.5 * delta * lap_div[i];
        bracket[i] = s.v[i] * div[i] - s.v[i] * div[i];
    }
    const DensityField db = spectral_derivative(bracket, 1);
    DensityField f2(s.v.grid());
    for (std::size_t i = 0; i < f2.size(); ++i) f2[i] = 0.5 * db[i] + dt_div[i];
    return {std::move(f1), std::move(f2)};
}

MomentFields2D rho_f_moment_formulas(const SampledVelocity2D& s, double delta) {
    const auto& vx = s.v[0];
    const auto& vy = s.v[1];
    require_same(vx, vy);
    require_same(vx, s.dt_v[0]);
    require_same(vx, s.dt_v[1]);
    const auto dxvx = spectral_derivative(vx, 1, 0);
    const auto dyvx = spectral_derivative(vx, 0, 1);
    const auto dxvy = spectral_derivative(vy, 1, 0);
    const auto dyvy = spectral_derivative(vy, 0, 1);
    PeriodicField2D div = vx;
    for (std::size_t p = 0; p < div.values.size(); ++p) div.values[p] = dxvx.values[p] + dyvy.values[p];
    const auto lap_div = apply_multiplier_2d(div, [](double kx, double ky, bool, bool) {
        return cplx{-(kx * kx + ky * ky), 0.0};
    });
    PeriodicField2D bx = vx, by = vx;
    for (std::size_t p = 0; p < div.values.size(); ++p) {
        const double ux = vx.values[p], uy = vy.values[p];
        bx.values[p] = ux * div.values[p] - (ux * dxvx.values[p] + uy * dyvx.values[p]);
        by.values[p] = uy * div.values[p] - (ux * dxvy.values[p] + uy * dyvy.values[p]);
    }
    const auto dbx = spectral_derivative(bx, 1, 0);
    const auto dby = spectral_derivative(by, 0, 1);
    const auto dtx = spectral_derivative(s.dt_v[0], 1, 0);
    const auto dty = spectral_derivative(s.dt_v[1], 0, 1);
    MomentFields2D out{vx, vx};
    for (std::size_t p = 0; p < div.values.size(); ++p) {
        out.rho_f1.values[p] = -div.values[p] - 0.5 * delta * lap_div.values[p];
        out.rho_f2.values[p] = 0.5 * (dbx.values[p] + dby.values[p]) + dtx.values[p] + dty.values[p];
    }
    return out;
}

DensityField nonlocal_first_order(const DensityField& rho_bar, double eta, double delta) {
    if (!(delta > 0.0)) throw Error("delta must be > 0");
    if (!(eta > 0.0)) throw Error("eta must be > 0");
    return apply_multiplier_1d(rho_bar, [&](std::size_t, double k) {
        return cplx{std::expm1(-delta * k * k) / (delta * eta), 0.0};
    });
}

SmoothedDensity smooth_density(const DensityField& rho_g, const KernelSpec& kernel) {
    if (kernel.dimension != 1) throw Error("smooth_density needs a 1D kernel");
    auto bar = apply_multiplier_1d(rho_g, [&](std::size_t, double k) {
        return cplx{fourier_coefficient(kernel, k), 0.0};
    });
    auto d1 = spectral_derivative(bar, 1);
    auto d2 = spectral_derivative(bar, 2);
    return {std::move(bar), std::move(d1), std::move(d2)};
}

DensityField jacobian_density(const DensityField& rho_g, const MacroParams& params) {
    // A 1x1 Jacobian: its determinant is the single entry 1 + (gamma/eta) D2 rho_bar.
    return obstacle_density_gamma1(rho_g, params);
}

PeriodicField2D jacobian_density(const PeriodicField2D& rho_bar, double a) {
    const auto hxx = spectral_derivative(rho_bar, 2, 0);
    const auto hyy = spectral_derivative(rho_bar, 0, 2);
    const auto hxy = spectral_derivative(rho_bar, 1, 1);
    PeriodicField2D out = rho_bar;
    for (std::size_t p = 0; p < out.values.size(); ++p)
        out.values[p] = (1.0 + a * hxx.values[p]) * (1.0 + a * hyy.values[p]) -
                        a * a * hxy.values[p] * hxy.values[p];
    return out;
}

PeriodicField2D convolve_2d(const PeriodicField2D& f, const KernelSpec& kernel) {
    if (kernel.dimension != 2) throw Error("convolve_2d needs a 2D kernel");
    PeriodicField2D k(f.nx, f.ny, f.lx, f.ly);
    const double dx = f.lx / static_cast<double>(f.nx);
    const double dy = f.ly / static_cast<double>(f.ny);
    for (std::size_t a = 0; a < f.nx; ++a)
        for (std::size_t b = 0; b < f.ny; ++b) {
            const double ox = static_cast<double>(Fft2D::signed_frequency(a, f.nx)) * dx;
            const double oy = static_cast<double>(Fft2D::signed_frequency(b, f.ny)) * dy;
            k.at(a, b) = potential(kernel, Vec2{ox, oy}) * dx * dy;
        }
    const Fft2D fft(f.nx, f.ny);
    auto fs = fft.forward(f.values);
    const auto ks = fft.forward(k.values);
    for (std::size_t p = 0; p < fs.size(); ++p) fs[p] *= ks[p];
    PeriodicField2D out = f;
    out.values = fft.inverse_real(fs);
    return out;
}

PeriodicField2D jacobian_density(const PeriodicField2D& rho_g, const KernelSpec& kernel,
                                 double gamma_over_eta) {
    return jacobian_density(convolve_2d(rho_g, kernel), gamma_over_eta);
}

PeriodicField2D hessian_nonlinearity(const PeriodicField2D& rho_bar) {
    const auto hxx = spectral_derivative(rho_bar, 2, 0);
    const auto hyy = spectral_derivative(rho_bar, 0, 2);
    const auto hxy = spectral_derivative(rho_bar, 1, 1);
    PeriodicField2D out = rho_bar;
    for (std::size_t p = 0; p < out.values.size(); ++p) {
        const double xx = hxx.values[p], yy = hyy.values[p], xy = hxy.values[p];
        const double lap = xx + yy;
        out.values[p] = 0.5 * (lap * lap - (xx * xx + yy * yy + 2.0 * xy * xy));
    }
    return out;
}

Lemma2Result lemma2_identity_check(const std::function<double(double)>& V,
                                   const std::function<double(double)>& dV, double delta,
                                   const Lemma2Options& opt) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error("delta must be > 0");
    if (opt.nx_per_unit < 16 || opt.ny < 1) throw Error("lemma2 grid too coarse");
    std::vector<double> stencil;
    switch (opt.fd_order) {
        case 2: stencil = {-1.0 / 2, 0.0, 1.0 / 2}; break;
        case 4: stencil = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12}; break;
        case 6: stencil = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60}; break;
        case 8:
            stencil = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
            break;
        default: throw Error("fd_order must be 2, 4, 6 or 8");
    }
    const auto half = static_cast<std::ptrdiff_t>(stencil.size() / 2);
    const double h = 1.0 / static_cast<double>(opt.nx_per_unit);
    const std::size_t nx = 3 * opt.nx_per_unit + 1;
    const auto rule = gauss_hermite_probabilist(opt.hermite_order);
    const double sd = std::sqrt(delta);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * delta);
    auto M = [&](double z) { return norm * std::exp(-z * z / (2.0 * delta)); };

    std::vector<double> xs(nx), Vx(nx), dVx(nx), f(nx);
    for (std::size_t j = 0; j < nx; ++j) {
        xs[j] = -1.0 + static_cast<double>(j) * h;
        Vx[j] = V(xs[j]);
        dVx[j] = dV(xs[j]);
    }
    Lemma2Result out;
    for (std::size_t m = 0; m < opt.ny; ++m) {
        const double y = (static_cast<double>(m) + 0.5) / static_cast<double>(opt.ny);
        double smoothed = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) smoothed += rule.weights[q] * V(y + sd * rule.nodes[q]);
        for (std::size_t j = 0; j < nx; ++j) f[j] = M(xs[j] - y) * (Vx[j] - smoothed) / delta;
        for (auto j = half; j < static_cast<std::ptrdiff_t>(nx) - half; ++j) {
            double d = 0.0;
            for (std::ptrdiff_t r = -half; r <= half; ++r)
                d += stencil[static_cast<std::size_t>(r + half)] * f[static_cast<std::size_t>(j + r)];
            d /= h;
            const auto uj = static_cast<std::size_t>(j);
            const double z = xs[uj] - y;
            const double res = z * f[uj] + delta * d - M(z) * dVx[uj];
            out.identity_residual = std::max(out.identity_residual, std::abs(res));
        }
        double integral = 0.5 * (f.front() + f.back());
        for (std::size_t j = 1; j + 1 < nx; ++j) integral += f[j];
        out.normalization = std::max(out.normalization, std::abs(integral * h));
    }
    return out;
}

}  // namespace tether
