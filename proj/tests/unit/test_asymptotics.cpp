#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "tether/asymptotics/h_solutions.hpp"
#include "tether/asymptotics/hermite.hpp"
#include "tether/asymptotics/moments.hpp"
#include "tether/asymptotics/ou.hpp"
#include "tether/asymptotics/suite.hpp"
#include "tether/asymptotics/velocity.hpp"
#include "tether/core/csv.hpp"
#include "tether/core/error.hpp"

using namespace tether;
using std::numbers::pi;

namespace {

double fact(int n) { return n <= 1 ? 1.0 : n * fact(n - 1); }

/// Explicit sum He_n(s) = n! sum_m (-1)^m s^{n-2m} / (m! (n-2m)! 2^m).
double hermite_explicit(int n, double s) {
    double v = 0.0;
    for (int m = 0; 2 * m <= n; ++m)
        v += (m % 2 ? -1.0 : 1.0) * std::pow(s, n - 2 * m) / (fact(m) * fact(n - 2 * m) * std::pow(2.0, m));
    return fact(n) * v;
}

std::vector<MultiIndex> all_indices(int dim, int max_order) {
    std::vector<MultiIndex> out;
    for (int a = 0; a <= max_order; ++a)
        for (int b = 0; b <= (dim > 1 ? max_order : 0); ++b)
            for (int c = 0; c <= (dim > 2 ? max_order : 0); ++c) {
                if (a + b + c > max_order) continue;
                MultiIndex m = MultiIndex::zero(dim).shifted(0, a);
                if (dim > 1) m = m.shifted(1, b);
                if (dim > 2) m = m.shifted(2, c);
                out.push_back(m);
            }
    return out;
}

HermiteExpansion random_expansion(int dim, int max_order, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    HermiteExpansion h(dim);
    for (const auto& i : all_indices(dim, max_order)) h.add(i, n(rng));
    return h;
}

}  // namespace

TEST_CASE("multi-index order, factorial and validation") {
    const MultiIndex i{2, 0, 3};
    CHECK(i.dimension() == 3);
    CHECK(i.order() == 5);
    CHECK(i.factorial() == 12.0);
    CHECK(MultiIndex::unit(2, 1) == MultiIndex{0, 1});
    CHECK((MultiIndex{1, 2} + MultiIndex{0, 1}) == MultiIndex{1, 3});
    CHECK_THROWS_AS((MultiIndex{1, -1}), Error);
    CHECK_THROWS_AS((MultiIndex{1, 1, 1, 1}), Error);
    CHECK_THROWS_AS(MultiIndex::zero(2).shifted(0, -1), Error);
    CHECK_THROWS_AS((MultiIndex{1} + MultiIndex{1, 0}), Error);
}

TEST_CASE("hermite_eval examples and agreement with the explicit sum") {
    const double s3[3] = {0.7, -1.1, 2.0};
    CHECK(hermite_eval(MultiIndex::zero(3), s3) == 1.0);
    CHECK(hermite_eval(MultiIndex{1, 0, 0}, s3) == 0.7);
    const double two[1] = {2.0};
    CHECK(hermite_eval(MultiIndex{2}, two) == doctest::Approx(3.0).epsilon(1e-15));
    for (int n = 0; n <= 8; ++n)
        for (double s : {-2.5, -0.3, 0.0, 1.7, 3.1})
            CHECK(hermite_1d(n, s) == doctest::Approx(hermite_explicit(n, s)).epsilon(1e-12).scale(1.0));
    const double s[3] = {0.4, -1.3, 0.9};
    CHECK(hermite_eval(MultiIndex{1, 2, 3}, s) ==
          doctest::Approx(hermite_explicit(1, 0.4) * hermite_explicit(2, -1.3) * hermite_explicit(3, 0.9)));
    CHECK_THROWS_AS(hermite_eval(MultiIndex{1, 1, 1}, std::span<const double>(s, 2)), Error);
}

TEST_CASE("expansion evaluation agrees with direct polynomial evaluation") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    for (int dim = 1; dim <= 3; ++dim) {
        const auto h = random_expansion(dim, 5, rng);
        const auto p = to_polynomial(h);
        const auto back = to_hermite(p);
        CHECK((back - h).max_abs() < 1e-12);
        for (int q = 0; q < 10; ++q) {
            const double s[3] = {n(rng), n(rng), n(rng)};
            CHECK(std::abs(evaluate(h, s) - evaluate(p, s)) < 1e-12 * (1.0 + std::abs(evaluate(p, s))));
        }
    }
    // sigma_1 sigma_2 = H_{e1+e2}; sigma_1^2 = H_{2 e1} + H_0.
    const Polynomial s1s2(2, {{MultiIndex{1, 1}, 1.0}});
    const auto h = to_hermite(s1s2);
    CHECK(h.coefficient(MultiIndex{1, 1}) == 1.0);
    CHECK(h.degree() == 2);
    const auto sq = to_hermite(Polynomial(1, {{MultiIndex{2}, 1.0}}));
    CHECK(sq.coefficient(MultiIndex{2}) == 1.0);
    CHECK(sq.coefficient(MultiIndex{0}) == 1.0);
}

TEST_CASE("weighted inner product: orthogonality, normalization and moments") {
    const auto idx = all_indices(3, 4);
    double worst = 0.0;
    for (const auto& i : idx)
        for (const auto& j : idx) {
            const double ip = weighted_inner_product(HermiteExpansion(3, {{i, 1.0}}), HermiteExpansion(3, {{j, 1.0}}));
            worst = std::max(worst, std::abs(ip - (i == j ? i.factorial() : 0.0)));
        }
    CHECK(worst < 1e-8);
    const HermiteExpansion one(2, {{MultiIndex::zero(2), 1.0}});
    CHECK(weighted_inner_product(one, one) == doctest::Approx(1.0).epsilon(1e-15));

    // Standard normal moments E[s^{2k}] = (2k - 1)!!
    auto unit = [](std::span<const double>) { return 1.0; };
    for (int k = 1; k <= 5; ++k) {
        const double dfact = fact(2 * k) / (std::pow(2.0, k) * fact(k));
        const double m = weighted_inner_product([k](std::span<const double> s) { return std::pow(s[0], 2 * k); },
                                                unit, 1, 2 * k, k + 1);
        CHECK(m == doctest::Approx(dfact).epsilon(1e-12));
    }
    // <H_{e1} H_{e2}, H_{e1+e2}> = 1 through the product rule.
    const MultiIndex e1{1, 0, 0}, e2{0, 1, 0};
    CHECK(weighted_inner_product(hermite_product(e1, e2), HermiteExpansion(3, {{e1 + e2, 1.0}})) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(weighted_inner_product(unit, unit, 1, 8, 4), Error);
    CHECK_NOTHROW(weighted_inner_product(unit, unit, 1, 7, 4));
}

TEST_CASE("apply_B: eigen-relation and finite-difference cross-check") {
    const HermiteExpansion h1(3, {{MultiIndex{1, 0, 0}, 1.0}});
    CHECK((apply_B(h1) + h1).max_abs() == 0.0);
    const HermiteExpansion c(2, {{MultiIndex::zero(2), 4.2}});
    CHECK(apply_B(c).max_abs() == 0.0);
    const MultiIndex i12{1, 1, 0};
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    for (int q = 0; q < 10; ++q) {
        const double s[3] = {n(rng), n(rng), n(rng)};
        const double fd = apply_B_fd([&](std::span<const double> x) { return hermite_eval(i12, x); }, s);
        CHECK(std::abs(fd + 2.0 * hermite_eval(i12, s)) < 1e-8);
    }
    // Random expansions of degree <= 4: symbolic B against finite differences.
    for (int dim = 1; dim <= 3; ++dim) {
        const auto h = random_expansion(dim, 4, rng);
        const auto bh = apply_B(h);
        for (int q = 0; q < 5; ++q) {
            const double s[3] = {n(rng), n(rng), n(rng)};
            const double fd = apply_B_fd([&](std::span<const double> x) { return evaluate(h, x); },
                                         std::span<const double>(s, static_cast<std::size_t>(dim)));
            CHECK(std::abs(fd - evaluate(bh, s)) < 1e-8 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("hermite_product rules and unsupported orders") {
    const MultiIndex e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};
    const auto sq = hermite_product(e1, e1);
    CHECK(sq.coefficient(MultiIndex{2, 0, 0}) == 1.0);
    CHECK(sq.coefficient(MultiIndex::zero(3)) == 1.0);
    CHECK(sq.terms().size() == 2);
    const auto mixed = hermite_product(e1, e2);
    CHECK(mixed.terms().size() == 1);
    CHECK(mixed.coefficient(e1 + e2) == 1.0);
    const auto triple = hermite_product(e1, e2 + e3);
    CHECK(triple.terms().size() == 1);
    CHECK(triple.coefficient(e1 + e2 + e3) == 1.0);
    // Both deltas active: H_{e1} H_{2 e1} = H_{3 e1} + 2 H_{e1}.
    const auto cube = hermite_product(e1, e1 + e1);
    CHECK(cube.coefficient(MultiIndex{3, 0, 0}) == 1.0);
    CHECK(cube.coefficient(e1) == 2.0);
    // Order of the factors does not matter.
    CHECK((hermite_product(e2 + e3, e1) - triple).max_abs() == 0.0);
    CHECK_THROWS_AS(hermite_product(e1 + e2, e1 + e3), Error);
    CHECK_THROWS_AS(hermite_product(MultiIndex::zero(3), e1), Error);
    CHECK_THROWS_AS(hermite_product(e1, e1 + e2 + e3), Error);
    CHECK_THROWS_AS(hermite_product(MultiIndex{1}, e1), Error);
}

TEST_CASE("velocity fields: analytic derivatives against finite differences") {
    for (int dim = 1; dim <= 3; ++dim) {
        for (bool cons : {false, true}) {
            const auto f = ExternalVelocityField::random_trigonometric(dim, 5, 11 + static_cast<std::uint64_t>(dim), cons);
            CHECK(f.conservative() == cons);
            const double y[3] = {0.31, 0.72, 0.15};
            const double t = 0.4;
            const auto j = f.jet(y, t);
            const double h = 1e-5;
            for (int k = 0; k < dim; ++k) {
                double yp[3] = {y[0], y[1], y[2]}, ym[3] = {y[0], y[1], y[2]};
                yp[k] += h;
                ym[k] -= h;
                const auto jp = f.jet(yp, t), jm = f.jet(ym, t);
                for (int c = 0; c < dim; ++c) {
                    CHECK(j.dv[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] ==
                          doctest::Approx((jp.v[static_cast<std::size_t>(c)] - jm.v[static_cast<std::size_t>(c)]) / (2 * h)).epsilon(1e-6).scale(1.0));
                    for (int i = 0; i < dim; ++i)
                        CHECK(j.d2v[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] ==
                              doctest::Approx((jp.dv[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] - jm.dv[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]) / (2 * h)).epsilon(1e-5).scale(1.0));
                }
                if (cons) {
                    const double dV = (f.potential(yp, t) - f.potential(ym, t)) / (2 * h);
                    CHECK(j.v[static_cast<std::size_t>(k)] == doctest::Approx(dV).epsilon(1e-7).scale(1.0));
                }
            }
            const auto jt = f.jet(y, t + h), jt0 = f.jet(y, t - h);
            for (int c = 0; c < dim; ++c)
                CHECK(j.dt_v[static_cast<std::size_t>(c)] ==
                      doctest::Approx((jt.v[static_cast<std::size_t>(c)] - jt0.v[static_cast<std::size_t>(c)]) / (2 * h)).epsilon(1e-6).scale(1.0));
        }
    }
    CHECK_THROWS_AS(ExternalVelocityField::shear_2d(1.0).potential(std::vector<double>{0.1, 0.2}), Error);
    CHECK_THROWS_AS(ExternalVelocityField::random_trigonometric(4, 2, 1), Error);
}

TEST_CASE("curl residual separates conservative and rotational fields") {
    const std::vector<std::array<double, 3>> pts{{0.1, 0.2, 0.3}, {0.7, 0.4, 0.9}, {0.5, 0.5, 0.5}};
    CHECK(curl_residual(ExternalVelocityField::random_trigonometric(2, 6, 3, true), pts) < 1e-10);
    CHECK(curl_residual(ExternalVelocityField::random_trigonometric(3, 6, 4, true), pts) < 1e-10);
    // The shear field has curl -2 pi cos(2 pi y); at y = 0.2 it is far from zero.
    CHECK(curl_residual(ExternalVelocityField::shear_2d(1.0), pts) > 1.0);
    CHECK(curl_residual(ExternalVelocityField::random_trigonometric(1, 3, 2), pts) == 0.0);
}

TEST_CASE("h-solutions: constant and linear fields") {
    const double y[3] = {0.2, 0.5, 0.9};
    const auto fc = ExternalVelocityField::constant({0.3, -1.2, 0.8});
    const auto rc = h_solution_residuals(fc, y, 0.0);
    for (double r : rc.coefficient) CHECK(r == 0.0);
    const auto sc = build_h_solutions(fc.jet(y), 3);
    CHECK(sc.h1[1].max_abs() == 0.0);
    CHECK(sc.h1[2].max_abs() == 0.0);
    CHECK(sc.h1[0].coefficient(MultiIndex{0, 1, 0}) == -1.2);

    const auto fl = ExternalVelocityField::linear({{0.5, -1.0, 0.2}, {1.5, 0.1, -0.7}, {0.3, 0.9, -0.4}});
    const auto rl = h_solution_residuals(fl, y, 0.0);
    CHECK(rl.max_coefficient() < 1e-10);
    CHECK(rl.parity_ok);
    CHECK(rl.mean_coefficient == 0.0);
    CHECK(rl.mean_quadrature < 1e-12);
}

TEST_CASE("h-solutions: random trigonometric fields at random points") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int dim = 1; dim <= 3; ++dim) {
        const auto f = ExternalVelocityField::random_trigonometric(dim, 6, 40 + static_cast<std::uint64_t>(dim));
        for (int p = 0; p < 20; ++p) {
            const double y[3] = {u(rng), u(rng), u(rng)};
            const auto r = h_solution_residuals(f, y, u(rng));
            CHECK(r.max_coefficient() < 1e-8);
            CHECK(r.parity_ok);
            CHECK(r.mean_quadrature < 1e-12);
        }
    }
}

TEST_CASE("h-solutions: pointwise check of the first-order equations") {
    // Independent path: B h by finite differences against the right-hand
    // side written directly as a polynomial in sigma.
    const int n = 2;
    const auto f = ExternalVelocityField::random_trigonometric(n, 4, 8);
    const double y[2] = {0.37, 0.61};
    const auto j = f.jet(y, 0.25);
    const auto sol = build_h_solutions(j, n);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int q = 0; q < 10; ++q) {
        const double s[2] = {g(rng), g(rng)};
        double rhs0 = 0.0, rhs1 = 0.0, rhs2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            rhs0 -= j.v[uk] * s[k];
            rhs1 += j.dv[uk][uk];
            for (int i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                rhs1 -= s[k] * s[i] * j.dv[uk][ui];
                rhs2 += s[k] * j.d2v[ui][uk][ui];
                for (int l = 0; l < n; ++l) rhs2 -= 0.5 * s[k] * s[i] * s[l] * j.d2v[uk][ui][static_cast<std::size_t>(l)];
            }
        }
        const double rhs[3] = {rhs0, rhs1, rhs2};
        for (std::size_t c = 0; c < 3; ++c) {
            const double fd = apply_B_fd([&](std::span<const double> x) { return evaluate(sol.h1[c], x); }, s);
            CHECK(std::abs(fd - rhs[c]) < 1e-8 * (1.0 + std::abs(rhs[c])));
        }
    }
}

TEST_CASE("h-solutions need second derivatives") {
    const auto f = ExternalVelocityField::random_trigonometric(2, 3, 1).without_second_derivatives();
    const double y[2] = {0.1, 0.2};
    CHECK_THROWS_AS(h_solution_residuals(f, y), Error);
}

TEST_CASE("parity rule detects violations") {
    HermiteExpansion bad(1, {{MultiIndex{2}, 1.0}});
    CHECK_FALSE(parity_rule_holds(bad, 1, 0));
    CHECK(parity_rule_holds(bad, 2, 0));
    HermiteExpansion deep(1, {{MultiIndex{4}, 1.0}});
    CHECK_FALSE(parity_rule_holds(deep, 2, 0));
    CHECK(parity_rule_holds(deep, 2, 2));
}

TEST_CASE("spectral derivatives and moment formulas") {
    const Grid1D grid(64);
    DensityField s(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) s[i] = std::sin(2 * pi * 3 * grid.x(i));
    const auto d1 = spectral_derivative(s, 1);
    const auto d3 = spectral_derivative(s, 3);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double c = std::cos(2 * pi * 3 * grid.x(i));
        CHECK(d1[i] == doctest::Approx(6 * pi * c).scale(1.0).epsilon(1e-10));
        CHECK(d3[i] == doctest::Approx(-std::pow(6 * pi, 3) * c).scale(1.0).epsilon(1e-10));
    }

    const auto shear = sample_velocity(ExternalVelocityField::shear_2d(2.0), 32, 16);
    CHECK(rho_f_moment_formulas(shear, 0.0).rho_f1.max_abs() < 1e-10);

    // 1D: for v = sin(4 pi x), rho_f1 = -v' - (delta/2) v^(3) and rho_f2 = 0.
    SampledVelocity1D sv{DensityField(Grid1D(32)), DensityField(Grid1D(32))};
    for (std::size_t i = 0; i < 32; ++i) sv.v[i] = std::sin(4 * pi * sv.v.grid().x(i));
    const auto m = rho_f_moment_formulas(sv, 0.01);
    for (std::size_t i = 0; i < 32; ++i) {
        const double c = std::cos(4 * pi * sv.v.grid().x(i));
        CHECK(m.rho_f1[i] == doctest::Approx(-4 * pi * c + 0.005 * std::pow(4 * pi, 3) * c).scale(1.0));
        CHECK(std::abs(m.rho_f2[i]) < 1e-12);
    }
}

TEST_CASE("local first-order moment agrees with the nonlocal closure to second order in delta") {
    const Grid1D grid(128);
    DensityField rho_bar(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) rho_bar[i] = std::cos(2 * pi * grid.x(i));
    SampledVelocity1D s{spectral_derivative(rho_bar, 1), DensityField(grid)};
    for (double& v : s.v.data()) v = -v;
    for (double delta : {1e-3, 1e-4}) {
        const auto local = rho_f_moment_formulas(s, delta).rho_f1;
        const auto nonlocal = nonlocal_first_order(rho_bar, 1.0, delta);
        // Single mode k: gap = (delta^2 k^6 / 6) cos up to O(delta^3).
        const double k = 2 * pi;
        for (std::size_t i = 0; i < grid.size(); i += 9)
            CHECK(local[i] - nonlocal[i] ==
                  doctest::Approx(delta * delta * std::pow(k, 6) / 6.0 * rho_bar[i]).epsilon(0.05).scale(1e-12));
    }
    CHECK_THROWS_AS(nonlocal_first_order(rho_bar, 1.0, 0.0), Error);
}

TEST_CASE("drift-density identity: examples and grid convergence") {
    const auto flat = lemma2_identity_check([](double) { return 1.0; }, [](double) { return 0.0; }, 0.01);
    CHECK(flat.identity_residual < 1e-12);
    CHECK(flat.normalization < 1e-12);
    auto V = [](double x) { return std::cos(2 * pi * x); };
    auto dV = [](double x) { return -2 * pi * std::sin(2 * pi * x); };
    const auto r = lemma2_identity_check(V, dV, 0.01);
    CHECK(r.identity_residual < 1e-8);
    CHECK(r.normalization < 1e-10);
    Lemma2Options coarse;
    coarse.fd_order = 2;
    coarse.nx_per_unit = 256;
    coarse.ny = 8;
    Lemma2Options fine = coarse;
    fine.nx_per_unit = 512;
    const double ratio = lemma2_identity_check(V, dV, 0.01, coarse).identity_residual /
                         lemma2_identity_check(V, dV, 0.01, fine).identity_residual;
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
    CHECK_THROWS_AS(lemma2_identity_check(V, dV, 0.0), Error);
    CHECK_THROWS_AS(lemma2_identity_check(V, dV, -1.0), Error);
    coarse.fd_order = 3;
    CHECK_THROWS_AS(lemma2_identity_check(V, dV, 0.01, coarse), Error);
}

TEST_CASE("jacobian density") {
    MacroParams p;
    const Grid1D grid(128);
    DensityField rho(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) rho[i] = 1.0 + 0.5 * std::sin(2 * pi * grid.x(i));
    const auto j = jacobian_density(rho, p);
    const auto g = obstacle_density_gamma1(rho, p);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(j[i] == g[i]);
    const auto uniform = jacobian_density(DensityField(grid, 2.0), p);
    for (double v : uniform.values()) CHECK(v == doctest::Approx(1.0));

    // 2D: det(I + aH) - (1 + a Lap) is exactly a^2 N for a 2x2 Hessian.
    const double a = 0.01;
    const auto rb = PeriodicField2D::sample(32, 32, [](double x, double y) {
        return std::cos(2 * pi * x) * std::cos(2 * pi * y);
    });
    const auto det = jacobian_density(rb, a);
    const auto N = hessian_nonlinearity(rb);
    for (std::size_t ix = 0; ix < 32; ix += 5)
        for (std::size_t iy = 0; iy < 32; iy += 3) {
            const double x = rb.x(ix), y = rb.y(iy);
            // Analytic Hessian of cos cos: Hxx = Hyy = -(2 pi)^2 cos cos, Hxy = (2 pi)^2 sin sin.
            const double k2 = 4 * pi * pi;
            const double hxx = -k2 * std::cos(2 * pi * x) * std::cos(2 * pi * y);
            const double hxy = k2 * std::sin(2 * pi * x) * std::sin(2 * pi * y);
            CHECK(det.at(ix, iy) == doctest::Approx((1 + a * hxx) * (1 + a * hxx) - a * a * hxy * hxy));
            CHECK(N.at(ix, iy) == doctest::Approx(hxx * hxx - hxy * hxy).scale(1.0));
            CHECK(std::abs(det.at(ix, iy) - (1 + 2 * a * hxx) - a * a * N.at(ix, iy)) < 1e-12);
        }
    const KernelSpec k2d{KernelFamily::QuadraticCompact, 1.0, 0.1, 2};
    const PeriodicField2D flat(16, 16, 1.0, 1.0, 3.0);
    const auto flat_det = jacobian_density(flat, k2d, a);
    for (double v : flat_det.values) CHECK(v == doctest::Approx(1.0));
    // Convolution of a constant multiplies by the integral of the kernel,
    // int 3A/(2 pi r^3) (r - s)^2 2 pi s ds = A r / 4.
    const auto conv = convolve_2d(PeriodicField2D(64, 64, 1.0, 1.0, 1.0), k2d);
    CHECK(conv.at(3, 7) == doctest::Approx(0.025).epsilon(0.02));
    CHECK_THROWS_AS(convolve_2d(flat, KernelSpec{}), Error);
}

TEST_CASE("OU ensemble: validation and thread-count reproducibility") {
    const DensityField zero(Grid1D(64), 0.0);
    OuOptions o;
    o.dt = 2e-3 / 5.0;
    CHECK_THROWS_AS(ou_monte_carlo(zero, 2e-3, 1e-4, 100, o), Error);
    CHECK_THROWS_AS(ou_monte_carlo(zero, 2e-3, 1e-4, 0), Error);
    CHECK_THROWS_AS(ou_monte_carlo(zero, 0.0, 1e-4, 10), Error);
    OuOptions small;
    small.snapshots = 10;
    small.batches = 5;
    small.bins = 16;
    small.batches = 11;
    CHECK_THROWS_AS(ou_monte_carlo(zero, 2e-3, 1e-4, 10, small), Error);
    small.batches = 5;

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a = ou_monte_carlo(zero, 2e-3, 1e-4, 3000, small);
    omp_set_num_threads(3);
    const auto b = ou_monte_carlo(zero, 2e-3, 1e-4, 3000, small);
    omp_set_num_threads(saved);
    CHECK(a.rho_f.data() == b.rho_f.data());
    CHECK(a.displacements == b.displacements);
    CHECK(a.rho_f.mass() == doctest::Approx(1.0));
    CHECK(a.steps == 500 + 9 * 50);
}

TEST_CASE("OU ensemble: stationary displacement variance and closure trend") {
    // Euler-Maruyama variance of the discrete OU recursion is delta / (1 - a/2)
    // with a = dt / gamma.
    OuOptions o;
    o.snapshots = 10;
    o.batches = 5;
    const double gamma = 2e-3, delta = 1e-4;
    const auto r = ou_monte_carlo(DensityField(Grid1D(100), 0.0), gamma, delta, 20000, o);
    double var = 0.0;
    for (double d : r.displacements) var += d * d;
    var /= static_cast<double>(r.displacements.size());
    CHECK(var == doctest::Approx(delta / (1.0 - 0.5 / 50.0)).epsilon(0.05));

    // Smaller ensemble than the acceptance run; the error bar is wider.
    const Grid1D grid(1000);
    DensityField rho_g(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double z = grid.x(i) - 0.5;
        rho_g[i] = std::exp(-z * z / 0.02) / std::sqrt(0.02 * pi);
    }
    const KernelSpec kernel{KernelFamily::QuadraticCompact, 1.0, 0.1, 1};
    o.snapshots = 20;
    const auto cmp = compare_ou_with_closure(rho_g, kernel, 1.0, gamma, delta, 20000, o);
    CHECK(cmp.relative_l2 < 0.2);
    CHECK(cmp.deviation_rms == doctest::Approx(cmp.target_rms).epsilon(0.2));
    CHECK_THROWS_AS(compare_ou_with_closure(DensityField(Grid1D(90), 1.0), kernel, 1.0, gamma, delta, 10, OuOptions{}), Error);
}

TEST_CASE("verification suite passes and writes its table") {
    const auto checks = run_asymptotics_suite();
    CHECK(checks.size() >= 25);
    for (const auto& c : checks) {
        INFO(c.name << " residual " << c.residual << " tolerance " << c.tolerance);
        CHECK(c.passed());
    }
    CHECK(all_passed(checks));
    const auto dir = std::filesystem::temp_directory_path() / "tether_suite_test";
    std::filesystem::create_directories(dir);
    write_check_csv(checks, dir / "checks.csv");
    const auto t = read_csv(dir / "checks.csv");
    CHECK(t.header == std::vector<std::string>{"check", "residual", "tolerance", "status"});
    CHECK(t.rows.size() == checks.size());
    CHECK(t.rows[0][3] == "pass");
    std::filesystem::remove_all(dir);
}
