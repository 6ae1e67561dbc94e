#include "tether/asymptotics/suite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tether/asymptotics/h_solutions.hpp"
#include "tether/asymptotics/hermite.hpp"
#include "tether/asymptotics/moments.hpp"
#include "tether/asymptotics/ou.hpp"
#include "tether/asymptotics/velocity.hpp"
#include "tether/core/csv.hpp"
#include "tether/core/rng.hpp"

namespace tether {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::vector<MultiIndex> indices_up_to(int dim, int max_order) {
    std::vector<MultiIndex> out;
    const int top = max_order;
    for (int a = 0; a <= top; ++a)
        for (int b = 0; b <= (dim > 1 ? top : 0); ++b)
            for (int c = 0; c <= (dim > 2 ? top : 0); ++c) {
                if (a + b + c > max_order) continue;
                MultiIndex m = MultiIndex::zero(dim).shifted(0, a);
                if (dim > 1) m = m.shifted(1, b);
                if (dim > 2) m = m.shifted(2, c);
                out.push_back(m);
            }
    return out;
}

/// He_j from its defining derivative formula: with d/ds[p e^{-s^2/2}] =
/// (p' - s p) e^{-s^2/2}, the polynomial part obeys p_{j+1} = s p_j - p_j'.
std::vector<double> rodrigues_coefficients(int j) {
    std::vector<double> p{1.0};
    for (int step = 0; step < j; ++step) {
        std::vector<double> next(p.size() + 1, 0.0);
        for (std::size_t k = 0; k < p.size(); ++k) next[k + 1] += p[k];
        for (std::size_t k = 1; k < p.size(); ++k) next[k - 1] -= static_cast<double>(k) * p[k];
        p = std::move(next);
    }
    return p;
}

double polyval(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
    return v;
}

std::array<double, 3> random_point(RngStream& rng) {
    return {rng.uniform(), rng.uniform(), rng.uniform()};
}

std::array<double, 3> random_sigma(RngStream& rng) {
    return {rng.normal(), rng.normal(), rng.normal()};
}

void hermite_checks(std::vector<CheckResult>& out, std::uint64_t seed) {
    RngStream rng(seed, StreamPurpose::Test, 1, 0);
    double rec = 0.0;
    for (int j = 0; j <= 6; ++j) {
        const auto c = rodrigues_coefficients(j);
        for (int q = 0; q < 20; ++q) {
            const double s = rng.uniform(-3.0, 3.0);
            rec = std::max(rec, std::abs(hermite_1d(j, s) - polyval(c, s)));
        }
    }
    out.push_back({"hermite_recurrence_vs_rodrigues", rec, 1e-10});

    double orth = 0.0;
    const auto idx = indices_up_to(3, 4);
    for (const auto& i : idx)
        for (const auto& j : idx) {
            const HermiteExpansion hi(3, {{i, 1.0}});
            const HermiteExpansion hj(3, {{j, 1.0}});
            const double expect = i == j ? i.factorial() : 0.0;
            orth = std::max(orth, std::abs(weighted_inner_product(hi, hj) - expect));
        }
    out.push_back({"hermite_orthogonality", orth, 1e-8});

    const HermiteExpansion one(3, {{MultiIndex::zero(3), 1.0}});
    out.push_back({"weight_normalization", std::abs(weighted_inner_product(one, one) - 1.0), 1e-14});

    // Product rules against direct multiplication at random points.
    double prod = 0.0;
    for (const auto& i : indices_up_to(3, 1)) {
        if (i.order() != 1) continue;
        for (const auto& j : indices_up_to(3, 2)) {
            if (j.order() == 0) continue;
            const auto h = hermite_product(i, j);
            for (int q = 0; q < 5; ++q) {
                const auto s = random_sigma(rng);
                prod = std::max(prod, std::abs(evaluate(h, s) - hermite_eval(i, s) * hermite_eval(j, s)));
            }
        }
    }
    const MultiIndex e1{1, 0, 0}, e2{0, 1, 0};
    const double p4 = weighted_inner_product(hermite_product(e1, e2), HermiteExpansion(3, {{e1 + e2, 1.0}}));
    prod = std::max(prod, std::abs(p4 - 1.0));
    out.push_back({"hermite_product_rules", prod, 1e-12});

    double basis = 0.0;
    for (const auto& i : idx) {
        const HermiteExpansion h(3, {{i, 1.0}});
        auto back = to_hermite(to_polynomial(h)) - h;
        basis = std::max(basis, back.max_abs());
        const auto p = to_polynomial(h);
        for (int q = 0; q < 3; ++q) {
            const auto s = random_sigma(rng);
            basis = std::max(basis, std::abs(evaluate(p, s) - evaluate(h, s)));
        }
    }
    out.push_back({"basis_change_consistency", basis, 1e-12});

    double eig = 0.0, eig_fd = 0.0;
    for (const auto& i : idx) {
        const HermiteExpansion h(3, {{i, 1.0}});
        eig = std::max(eig, (apply_B(h) + static_cast<double>(i.order()) * h).max_abs());
        for (int q = 0; q < 3; ++q) {
            const auto s = random_sigma(rng);
            const double fd = apply_B_fd([&](std::span<const double> x) { return hermite_eval(i, x); }, s);
            eig_fd = std::max(eig_fd, std::abs(fd + i.order() * hermite_eval(i, s)));
        }
    }
    out.push_back({"eigen_relation_coefficients", eig, 0.0});
    out.push_back({"eigen_relation_finite_difference", eig_fd, 1e-8});
}

void h_solution_checks(std::vector<CheckResult>& out, std::uint64_t seed, int points) {
    RngStream rng(seed, StreamPurpose::Test, 2, 0);
    HResiduals worst_const, worst_lin, worst_trig;
    auto merge = [](HResiduals& acc, const HResiduals& r) {
        for (std::size_t c = 0; c < 5; ++c) acc.coefficient[c] = std::max(acc.coefficient[c], r.coefficient[c]);
        acc.mean_coefficient = std::max(acc.mean_coefficient, r.mean_coefficient);
        acc.mean_quadrature = std::max(acc.mean_quadrature, r.mean_quadrature);
        acc.parity_ok = acc.parity_ok && r.parity_ok;
    };
    double const_extra = 0.0;
    for (int dim = 1; dim <= 3; ++dim) {
        std::vector<double> c(static_cast<std::size_t>(dim));
        for (double& x : c) x = rng.normal();
        const auto fc = ExternalVelocityField::constant(c);
        std::vector<std::vector<double>> A(static_cast<std::size_t>(dim), std::vector<double>(static_cast<std::size_t>(dim)));
        for (auto& row : A)
            for (double& x : row) x = rng.normal();
        const auto fl = ExternalVelocityField::linear(A);
        const auto ft = ExternalVelocityField::random_trigonometric(dim, 6, seed + static_cast<std::uint64_t>(dim));
        const auto fg = ExternalVelocityField::random_trigonometric(dim, 6, seed + 10 + static_cast<std::uint64_t>(dim), true);
        for (int p = 0; p < points; ++p) {
            const auto y = random_point(rng);
            const double t = rng.uniform();
            merge(worst_const, h_solution_residuals(fc, y, t));
            const auto sol = build_h_solutions(fc.jet(y, t), dim);
            const_extra = std::max({const_extra, sol.h1[1].max_abs(), sol.h1[2].max_abs()});
            merge(worst_lin, h_solution_residuals(fl, y, t));
            merge(worst_trig, h_solution_residuals(ft, y, t));
            merge(worst_trig, h_solution_residuals(fg, y, t));
        }
    }
    out.push_back({"h_constant_field", worst_const.max_coefficient(), 0.0});
    out.push_back({"h_constant_higher_correctors_vanish", const_extra, 0.0});
    out.push_back({"h_linear_field", worst_lin.max_coefficient(), 1e-10});
    const char* names[5] = {"h1_0_random_trig", "h1_1_random_trig", "h1_2_random_trig",
                            "h2_0_random_trig", "h2_1_random_trig"};
    for (std::size_t c = 0; c < 5; ++c) out.push_back({names[c], worst_trig.coefficient[c], 1e-8});
    out.push_back({"h_zero_mean_coefficient",
                   std::max({worst_const.mean_coefficient, worst_lin.mean_coefficient, worst_trig.mean_coefficient}), 0.0});
    out.push_back({"h_zero_mean_quadrature",
                   std::max({worst_const.mean_quadrature, worst_lin.mean_quadrature, worst_trig.mean_quadrature}), 1e-12});
    const bool parity = worst_const.parity_ok && worst_lin.parity_ok && worst_trig.parity_ok;
    out.push_back({"h_parity_rules", parity ? 0.0 : 1.0, 0.0});

    std::vector<std::array<double, 3>> pts;
    for (int p = 0; p < points; ++p) pts.push_back(random_point(rng));
    double curl = 0.0;
    for (int dim = 2; dim <= 3; ++dim)
        curl = std::max(curl, curl_residual(ExternalVelocityField::random_trigonometric(dim, 6, seed + 20, true), pts, 0.3));
    out.push_back({"conservative_field_curl", curl, 1e-10});
}

void moment_checks(std::vector<CheckResult>& out) {
    const auto shear = sample_velocity(ExternalVelocityField::shear_2d(1.3), 32, 32);
    out.push_back({"moments_shear_rho_f1", rho_f_moment_formulas(shear, 0.0).rho_f1.max_abs(), 1e-10});

    // Conservative field from a smooth rho_bar; the local formula agrees with
    // the nonlocal closure up to O(delta^2): halving delta divides the gap by 4.
    const Grid1D grid(128);
    DensityField rho_bar(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        rho_bar[i] = std::cos(two_pi * grid.x(i)) + 0.5 * std::sin(2.0 * two_pi * grid.x(i));
    const double eta = 1.0;
    auto gap = [&](double delta) {
        SampledVelocity1D s{spectral_derivative(rho_bar, 1), DensityField(grid)};
        for (double& v : s.v.data()) v /= -eta;
        const auto local = rho_f_moment_formulas(s, delta).rho_f1;
        const auto nonlocal = nonlocal_first_order(rho_bar, eta, delta);
        double m = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) m = std::max(m, std::abs(local[i] - nonlocal[i]));
        return m;
    };
    const double order = std::log2(gap(2e-4) / gap(1e-4));
    out.push_back({"moments_conservative_delta_order", std::abs(order - 2.0), 0.05});

    // 1D: the advective bracket cancels, leaving d_t div v.
    const auto f1d = ExternalVelocityField::random_trigonometric(1, 4, 99);
    const auto s1 = sample_velocity(f1d, Grid1D(64), 0.4);
    const auto m1 = rho_f_moment_formulas(s1, 0.0);
    const auto dtdiv = spectral_derivative(s1.dt_v, 1);
    double cancel = 0.0;
    for (std::size_t i = 0; i < dtdiv.size(); ++i) cancel = std::max(cancel, std::abs(m1.rho_f2[i] - dtdiv[i]));
    out.push_back({"moments_1d_bracket_cancels", cancel, 1e-12});

    // Moment formulas against analytic derivatives of a 2D trigonometric field.
    const auto f2 = ExternalVelocityField::random_trigonometric(2, 3, 5);
    const auto s2 = sample_velocity(f2, 32, 32, 0.2);
    const double delta = 1e-3;
    const auto m2 = rho_f_moment_formulas(s2, delta);
    double analytic = 0.0;
    const double h = 1e-4;
    for (std::size_t a = 0; a < 32; a += 5)
        for (std::size_t b = 0; b < 32; b += 7) {
            const double y[2] = {s2.v[0].x(a), s2.v[0].y(b)};
            const auto j = f2.jet(y, 0.2);
            const double div = j.dv[0][0] + j.dv[1][1];
            // Lap div from the analytic second derivatives by a central difference.
            auto div_at = [&](double yx, double yy) {
                const double p[2] = {yx, yy};
                const auto q = f2.jet(p, 0.2);
                return q.dv[0][0] + q.dv[1][1];
            };
            double lap_div = 0.0;
            for (int ax = 0; ax < 2; ++ax) {
                double pp[2] = {y[0], y[1]}, mm[2] = {y[0], y[1]};
                pp[ax] += h;
                mm[ax] -= h;
                lap_div += (div_at(pp[0], pp[1]) - 2.0 * div + div_at(mm[0], mm[1])) / (h * h);
            }
            const double expect = -div - 0.5 * delta * lap_div;
            analytic = std::max(analytic, std::abs(m2.rho_f1.at(a, b) - expect));
        }
    out.push_back({"moments_rho_f1_vs_analytic", analytic, 1e-5});
}

void lemma2_checks(std::vector<CheckResult>& out) {
    const auto flat = lemma2_identity_check([](double) { return 2.5; }, [](double) { return 0.0; }, 0.01);
    out.push_back({"lemma2_constant_potential", std::max(flat.identity_residual, flat.normalization), 1e-12});
    const auto r = lemma2_identity_check([](double x) { return std::cos(two_pi * x); },
                                         [](double x) { return -two_pi * std::sin(two_pi * x); }, 0.01);
    out.push_back({"lemma2_identity", r.identity_residual, 1e-8});
    out.push_back({"lemma2_normalization", r.normalization, 1e-10});
}

void jacobian_checks(std::vector<CheckResult>& out) {
    MacroParams params;
    params.gamma = 2e-3;
    const Grid1D grid(256);
    DensityField rho(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        rho[i] = 1.0 + 0.3 * std::cos(two_pi * grid.x(i)) + 0.1 * std::sin(3.0 * two_pi * grid.x(i));
    const auto j1 = jacobian_density(rho, params);
    const auto g1 = obstacle_density_gamma1(rho, params);
    double mismatched = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) mismatched += j1[i] == g1[i] ? 0.0 : 1.0;
    out.push_back({"jacobian_1d_equals_first_order_closure", mismatched, 0.0});

    const auto uniform = jacobian_density(DensityField(grid, 1.0), params);
    double dev = 0.0;
    for (double v : uniform.values()) dev = std::max(dev, std::abs(v - 1.0));
    out.push_back({"jacobian_uniform_density", dev, 1e-12});

    const double a = 2e-3;
    const auto rb = PeriodicField2D::sample(64, 64, [](double x, double y) {
        return std::cos(two_pi * x) * std::cos(two_pi * y);
    });
    const auto det = jacobian_density(rb, a);
    const auto lap = spectral_derivative(rb, 2, 0);
    const auto lap_y = spectral_derivative(rb, 0, 2);
    const auto N = hessian_nonlinearity(rb);
    double rel = 0.0;
    for (std::size_t p = 0; p < det.values.size(); ++p) {
        const double linear = 1.0 + a * (lap.values[p] + lap_y.values[p]);
        rel = std::max(rel, std::abs((det.values[p] - linear) - a * a * N.values[p]) / (a * a));
    }
    out.push_back({"jacobian_2d_nonlinear_term", rel, 1e-6});
}

}  // namespace

std::vector<CheckResult> run_monte_carlo_checks(std::size_t anchors, std::uint64_t seed) {
    std::vector<CheckResult> out;
    const double gamma = 2e-3, delta = 1e-4, eta = 1.0;
    OuOptions opt;
    opt.seed = seed;
    const Grid1D grid(1000);

    const auto zero = ou_monte_carlo(DensityField(grid, 0.0), gamma, delta, anchors, opt);
    double dev2 = 0.0, se2 = 0.0;
    for (std::size_t b = 0; b < zero.rho_f.size(); ++b) {
        dev2 += (zero.rho_f[b] - 1.0) * (zero.rho_f[b] - 1.0);
        se2 += zero.standard_error[b] * zero.standard_error[b];
    }
    out.push_back({"ou_zero_field_uniform_sigma", std::sqrt(dev2 / se2), 3.0});
    double var = 0.0;
    for (double d : zero.displacements) var += d * d;
    var /= static_cast<double>(zero.displacements.size());
    out.push_back({"ou_zero_field_displacement_variance", std::abs(var / delta - 1.0), 0.03});

    DensityField rho_g(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double z = grid.x(i) - 0.5;
        rho_g[i] = std::exp(-z * z / 0.02) / std::sqrt(0.02 * std::numbers::pi);
    }
    const KernelSpec kernel{KernelFamily::QuadraticCompact, 1.0, 0.1, 1};
    const auto full = compare_ou_with_closure(rho_g, kernel, eta, gamma, delta, anchors, opt);
    out.push_back({"ou_closure_relative_l2", full.relative_l2, 0.1});

    const auto half = compare_ou_with_closure(rho_g, kernel, eta, gamma / 2.0, delta, anchors, opt);
    // Project both deviations on the shape of the closure.
    double tt = 0.0;
    for (double t : full.target) tt += t * t;
    double a_full = 0.0, a_half = 0.0, v_full = 0.0, v_half = 0.0;
    for (std::size_t b = 0; b < full.target.size(); ++b) {
        const double w = full.target[b] / tt;
        a_full += w * (full.run.rho_f[b] - 1.0);
        a_half += w * (half.run.rho_f[b] - 1.0);
        v_full += w * w * full.run.standard_error[b] * full.run.standard_error[b];
        v_half += w * w * half.run.standard_error[b] * half.run.standard_error[b];
    }
    const double ratio = a_full / a_half;
    const double ratio_se = ratio * std::sqrt(v_full / (a_full * a_full) + v_half / (a_half * a_half));
    out.push_back({"ou_gamma_scaling_sigma", std::abs(ratio - 2.0) / ratio_se, 3.0});
    return out;
}

std::vector<CheckResult> run_asymptotics_suite(const VerificationOptions& options) {
    std::vector<CheckResult> out;
    hermite_checks(out, options.seed);
    h_solution_checks(out, options.seed, options.random_points);
    moment_checks(out);
    lemma2_checks(out);
    jacobian_checks(out);
    if (options.monte_carlo) {
        auto mc = run_monte_carlo_checks(options.monte_carlo_anchors, options.seed);
        out.insert(out.end(), mc.begin(), mc.end());
    }
    return out;
}

void write_check_csv(std::span<const CheckResult> checks, const std::filesystem::path& path) {
    CsvWriter out(path, {"check", "residual", "tolerance", "status"});
    for (const auto& c : checks)
        out.cell(c.name).cell(c.residual).cell(c.tolerance).cell(c.passed() ? "pass" : "fail").end_row();
    out.close();
}

bool all_passed(std::span<const CheckResult> checks) noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

}  // namespace tether
