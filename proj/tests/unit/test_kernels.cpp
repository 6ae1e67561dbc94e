#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "tether/core/csv.hpp"
#include "tether/core/error.hpp"
#include "tether/kernels.hpp"

using namespace tether;
using std::numbers::pi;

namespace {

KernelSpec quad(double C = 1.0, double r = 0.18) {
    return {KernelFamily::QuadraticCompact, C, r, 1};
}
KernelSpec expo(double C = 1.0, double r = 0.05) {
    return {KernelFamily::ExponentialForce, C, r, 1};
}

/// Composite Simpson rule with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// Independent W oracle: Simpson on each smooth piece of phi'(y) phi'(x-y).
double w_oracle(const KernelSpec& k, double x) {
    const double L = k.family == KernelFamily::QuadraticCompact ? k.radius : 40 * k.radius;
    std::vector<double> b{-L, std::min(0.0, x), std::max(0.0, x), L};
    if (k.family == KernelFamily::QuadraticCompact) b = {-L, x - L, 0.0, x, L, x + L};
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const double lo = std::max(b[i], std::max(-L, x - L));
        const double hi = std::min(b[i + 1], std::min(L, x + L));
        // Stay off the endpoints, where phi' jumps and takes the value 0.
        const double eps = 1e-12 * k.radius;
        if (hi - lo > 2 * eps)
            s += simpson([&](double y) { return force(k, y) * force(k, x - y); }, lo + eps,
                         hi - eps, 4000);
    }
    return s;
}

}  // namespace

TEST_CASE("quadratic potential values and mass") {
    const auto k = quad(0.25, 0.18);
    CHECK(potential(k, 0.0) == doctest::Approx(3 * 0.25 / (2 * 0.18)));
    CHECK(potential(k, 0.18) == 0.0);
    CHECK(potential(k, -0.18) == 0.0);
    CHECK(potential(k, 0.3) == 0.0);
    CHECK(simpson([&](double x) { return potential(k, x); }, -0.18, 0.18, 2000) ==
          doctest::Approx(0.25).epsilon(1e-12));
    const auto e = expo(0.7, 0.05);
    CHECK(simpson([&](double x) { return potential(e, x); }, 0, 2.0, 20000) * 2 ==
          doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("2D potential normalisation") {
    // The quadratic 2D prefactor 3A/(2 pi r^3) gives total mass A r / 4.
    const KernelSpec q{KernelFamily::QuadraticCompact, 0.3, 0.05, 2};
    CHECK(simpson([&](double r) { return 2 * pi * r * potential(q, Vec2{r, 0}); }, 0, 0.05, 2000) ==
          doctest::Approx(0.3 * 0.05 / 4).epsilon(1e-12));
    CHECK(potential(q, Vec2{0.03, 0.04}) == 0.0);
    const KernelSpec e{KernelFamily::ExponentialForce, 0.3, 0.05, 2};
    CHECK(simpson([&](double r) { return 2 * pi * r * potential(e, Vec2{0, r}); }, 0, 2.0, 20000) ==
          doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("force is odd, continuous at the support edge and the derivative of phi") {
    const auto k = quad(1.0, 0.18);
    CHECK(force(k, 0.18) == 0.0);
    CHECK(std::abs(force(k, 0.18 - 1e-9)) < 1e-6);
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int i = 0; i < 200; ++i) {
        const double x = u(gen);
        CHECK(force(k, -x) == -force(k, x));
        CHECK(force(expo(), -x) == -force(expo(), x));
    }
    const double x = 0.09, h = 1e-6;
    const double fd = (potential(k, x + h) - potential(k, x - h)) / (2 * h);
    CHECK(std::abs(force(k, x) - fd) < 1e-6);
    // force magnitude decreases linearly
    CHECK(force(k, 0.06) - force(k, 0.03) == doctest::Approx(force(k, 0.12) - force(k, 0.09)));

    const KernelSpec k2{KernelFamily::QuadraticCompact, 0.4, 0.05, 2};
    const Vec2 p{0.02, -0.01};
    const Vec2 g = force(k2, p);
    const double gx = (potential(k2, p + Vec2{h, 0}) - potential(k2, p - Vec2{h, 0})) / (2 * h);
    const double gy = (potential(k2, p + Vec2{0, h}) - potential(k2, p - Vec2{0, h})) / (2 * h);
    CHECK(g.x == doctest::Approx(gx).epsilon(1e-6));
    CHECK(g.y == doctest::Approx(gy).epsilon(1e-6));
    CHECK(force(k2, Vec2{}) == Vec2{});
}

TEST_CASE("fourier coefficient: limits, special point and DFT oracle") {
    const auto k = quad(0.17, 0.14);
    CHECK(fourier_coefficient(k, 0.0) == 0.17);
    CHECK(fourier_coefficient(k, 1e-6) == doctest::Approx(0.17).epsilon(1e-12));
    CHECK(fourier_coefficient(k, pi / 0.14) == doctest::Approx(6 * 0.17 / (pi * pi)).epsilon(1e-14));
    // series branch and closed form meet smoothly
    const double s0 = 0.05 / 0.14;
    CHECK(fourier_coefficient(k, s0 * (1 - 1e-9)) ==
          doctest::Approx(fourier_coefficient(k, s0 * (1 + 1e-9))).epsilon(1e-12));
    for (int l = 0; l <= 40; ++l) {
        const double kk = 2 * pi * l;
        CHECK(fourier_coefficient(k, kk) == fourier_coefficient(k, -kk));
        CHECK(std::abs(fourier_coefficient(k, kk) - fourier_coefficient_dft(k, kk)) < 1e-6);
        const auto e = expo(0.5, 0.04);
        // The exponential kernel has a kink at 0, so sampling error is O(dx^2).
        CHECK(std::abs(fourier_coefficient(e, kk) - fourier_coefficient_dft(e, kk)) <
              1e-4 + truncation_error_bound(e, 1.0));
    }
    CHECK(truncation_error_bound(quad(), 1.0) == 0.0);
    CHECK(truncation_error_bound(expo(2.0, 0.1), 1.0) == doctest::Approx(2.0 * std::exp(-5.0)));
}

TEST_CASE("macro kernel W' against a Simpson oracle on W") {
    for (const auto& k : {quad(0.25, 0.18), quad(1.0, 0.1), expo(1.0, 0.05)}) {
        for (double x : {0.01, 0.03, 0.07, 0.12, 0.2, 0.27, 0.33}) {
            const double w = macro_kernel(k, x);
            CHECK(w == doctest::Approx(w_oracle(k, x)).epsilon(1e-8).scale(1e-8 * std::abs(w_oracle(k, 0.01))));
            const double h = 1e-5;
            const double fd = (w_oracle(k, x + h) - w_oracle(k, x - h)) / (2 * h);
            const double dw = macro_kernel_force(k, x);
            CHECK(std::abs(dw - fd) <= 1e-6 * std::max(std::abs(fd), std::abs(macro_kernel_force(k, 0.01))));
        }
    }
}

TEST_CASE("exponential macro kernel: closed form and sign change at 2r") {
    const auto k = expo(1.0, 0.05);
    CHECK(macro_kernel_force(k, 0.1) == 0.0);
    CHECK(macro_kernel_force(k, 0.05) > 0.0);
    CHECK(macro_kernel_force(k, 0.15) < 0.0);
    const double x = 0.037;
    CHECK(macro_kernel_force(k, x) ==
          doctest::Approx(std::exp(-x / 0.05) * (0.1 - x) / (4 * std::pow(0.05, 5))));
}

TEST_CASE("compact macro kernel is biphasic with support in [-2r, 2r]") {
    for (const auto& k : {quad(0.25, 0.18), quad(-3.0, 0.07), quad(1.0, 0.3)}) {
        const double r = k.radius;
        const int n = 10000;
        double first_negative = -1.0;
        for (int i = 1; i < n; ++i) {
            const double x = 2.2 * r * i / n;
            const double dw = macro_kernel_force(k, x);
            CHECK(dw == doctest::Approx(-macro_kernel_force(k, -x)).epsilon(1e-13));
            CHECK(macro_kernel(k, x) == doctest::Approx(macro_kernel(k, -x)).epsilon(1e-13));
            if (x >= 2 * r) {
                CHECK(dw == 0.0);
                CHECK(macro_kernel(k, x) == 0.0);
            } else if (x > r) {
                CHECK(dw < 0.0);
            }
            if (first_negative < 0 && dw < 0) first_negative = x;
        }
        CHECK(macro_kernel_force(k, 1e-3 * r) > 0.0);
        CHECK(first_negative > 0.0);
        CHECK(first_negative <= r);
    }
    CHECK(macro_kernel_force(quad(0.25), 1.5 * 0.18) < 0.0);
}

TEST_CASE("macro kernel is invariant under mass sign flip") {
    for (double x : {0.0, 0.013, 0.1, 0.2, 0.35}) {
        CHECK(macro_kernel_force(quad(0.25), x) == macro_kernel_force(quad(-0.25), x));
        CHECK(macro_kernel(quad(0.25), x) == macro_kernel(quad(-0.25), x));
        CHECK(macro_kernel_force(expo(2.0), x) == macro_kernel_force(expo(-2.0), x));
    }
}

TEST_CASE("kernel validation and csv dump") {
    CHECK_THROWS_AS((KernelSpec{KernelFamily::QuadraticCompact, 1.0, 0.0, 1}.validate()), Error);
    CHECK_THROWS_AS((KernelSpec{KernelFamily::QuadraticCompact, 1.0, 0.1, 3}.validate()), Error);
    CHECK(kernel_family_from_string("exponential-force") == KernelFamily::ExponentialForce);
    CHECK_THROWS_AS(kernel_family_from_string("gaussian"), Error);
    const auto path = std::filesystem::temp_directory_path() / "tether_kernel.csv";
    dump_kernel_csv(quad(), Grid1D(64), path);
    const auto t = read_csv(path);
    CHECK(t.header == std::vector<std::string>{"x", "phi", "dphi", "W", "dW"});
    CHECK(t.rows.size() == 64);
    std::filesystem::remove(path);
    const auto mk = make_macro_kernel(quad(), Grid1D(64));
    CHECK(mk.w.size() == 64);
    CHECK(mk.dw[0] == 0.0);
}
