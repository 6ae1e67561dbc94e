#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <json.hpp>

#include "tether/core/error.hpp"
#include "tether/stability.hpp"

using namespace tether;
using std::numbers::pi;

namespace {

MacroParams fig7(double r) {
    MacroParams p;
    p.c1 = 1.0;
    p.zeta = 8.0;
    p.gamma = 2e-3;
    p.mu = 6.7e-3;
    p.eta = 1.0;
    p.kernel = {KernelFamily::QuadraticCompact, 0.17, r, 1};
    return p;
}

/// First-order, noiseless growth rate written out by hand.
double re_alpha_oracle(const MacroParams& p, double k) {
    const double C = p.kernel.mass, r = p.kernel.radius, s = r * k;
    const double ph = 6 * C * (s - std::sin(s)) / (s * s * s);
    return p.rho0 / p.zeta * k * k * (p.gamma / p.eta * (k * ph) * (k * ph) - p.mu);
}

MacroParams random_params(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MacroParams p;
    p.zeta = 1 + 10 * u(gen);
    p.gamma = 1e-4 + 5e-3 * u(gen);
    p.mu = 1e-4 + 1e-2 * u(gen);
    p.eta = 0.5 + u(gen);
    p.delta = 1e-4 * u(gen);
    p.kernel = {KernelFamily::QuadraticCompact, 0.05 + 0.4 * u(gen), 0.05 + 0.3 * u(gen), 1};
    return p;
}

}  // namespace

TEST_CASE("dispersion at k = 0 and against the first-order oracle") {
    auto p = fig7(0.12);
    const auto z = dispersion(0.0, p);
    CHECK(z.alpha_re == 0.0);
    CHECK(z.alpha_im == 0.0);
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.1, 200.0);
    for (int j = 0; j < 100; ++j) {
        const double k = u(gen);
        const auto d = dispersion(k, p);
        CHECK(d.alpha_re == doctest::Approx(re_alpha_oracle(p, k)).epsilon(1e-11).scale(1e-12));
        CHECK(d.alpha_im == doctest::Approx(-k * p.c1));
        const auto m = dispersion(-k, p);
        CHECK(m.alpha_re == d.alpha_re);
        CHECK(m.alpha_im == -d.alpha_im);
    }
}

TEST_CASE("local limit destabilises every mode without self-repulsion") {
    auto p = fig7(0.12);
    p.mu = 0.0;
    for (int j = 1; j <= 400; ++j) {
        const double k = 0.5 * j;
        if (std::abs(fourier_coefficient(p.kernel, k)) > 1e-12) CHECK(dispersion(k, p).alpha_re > 0.0);
    }
    CHECK(std::isinf(stability_threshold_r_I(p)));
}

TEST_CASE("closed-form threshold for the reference parameters") {
    const auto p = fig7(0.1);
    const double expected = 6 * 0.17 / (pi * std::sqrt(6.7e-3 / 2e-3));
    CHECK(stability_threshold_r_I(p) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(std::abs(stability_threshold_r_I(p) - 0.17740) < 1e-4);
    CHECK(is_linearly_stable(fig7(0.25), ModeSet::continuous()).stable);
    CHECK_FALSE(is_linearly_stable(fig7(0.10), ModeSet::continuous()).stable);
    CHECK(is_linearly_stable(fig7(0.25), ModeSet::discrete(200)).stable);
    CHECK_FALSE(is_linearly_stable(fig7(0.10), ModeSet::discrete(200)).stable);

    const auto modes = ModeSet::continuous(10 * pi / 0.05, 100000);
    const double grid_step = 1e-4;
    const double bis = stability_threshold_bisection(p, 0.05, 0.45, grid_step, modes);
    CHECK(std::abs(bis - expected) <= grid_step);

    auto q = p;
    q.kernel.mass *= 2;
    CHECK(stability_threshold_r_I(q) == doctest::Approx(2 * expected));
    q = p;
    q.gamma = 1e-12;
    CHECK(stability_threshold_r_I(q) < 1e-4);
}

TEST_CASE("exponential family threshold") {
    MacroParams p = fig7(0.05);
    p.kernel.family = KernelFamily::ExponentialForce;
    const double rstar = stability_threshold_r_I(p);
    CHECK(rstar == doctest::Approx(0.17 / (2 * std::sqrt(6.7e-3 / 2e-3))));
    p.kernel.radius = rstar * 1.01;
    CHECK(is_linearly_stable(p, ModeSet::continuous(10 / rstar, 100000)).stable);
    p.kernel.radius = rstar * 0.99;
    CHECK_FALSE(is_linearly_stable(p, ModeSet::continuous(10 / rstar, 100000)).stable);
}

TEST_CASE("noise threshold lies below the noiseless one") {
    auto p = fig7(0.1);
    p.delta = 1e-3;
    const double r = stability_threshold_r_I(p);
    CHECK(r < stability_threshold_r_I(fig7(0.1)));
    auto q = p;
    q.kernel.radius = r * 1.01;
    CHECK(is_linearly_stable(q, ModeSet::continuous(10 * pi / (0.5 * r), 200000)).stable);
    q.kernel.radius = r * 0.99;
    CHECK_FALSE(is_linearly_stable(q, ModeSet::continuous(10 * pi / (0.5 * r), 200000)).stable);
}

TEST_CASE("stability properties over random parameters") {
    std::mt19937_64 gen(99);
    int continuous_stable = 0;
    for (int j = 0; j < 200; ++j) {
        auto p = random_params(gen);
        const auto cont = is_linearly_stable(p, ModeSet::continuous(0.0, 4000));
        const auto disc = is_linearly_stable(p, ModeSet::discrete());
        if (cont.stable) {
            ++continuous_stable;
            CHECK(disc.stable);
        }
        // noise never destabilises
        auto q = p;
        q.delta = 0.0;
        if (is_linearly_stable(q, ModeSet::continuous(0.0, 4000)).stable) CHECK(cont.stable);
        // high frequencies are damped: (k phi_k)^2 ~ 36 C^2 / (r^4 k^2) eventually
        // falls below mu eta / gamma
        const double r = p.kernel.radius;
        const double tail = 6 * std::abs(p.kernel.mass) / (r * r) * std::sqrt(p.gamma / (p.mu * p.eta));
        const double kmax = std::max(10 * pi / r, 2 * tail);
        for (double k : {0.9 * kmax, 0.95 * kmax, kmax}) CHECK(dispersion(k, p).alpha_re < 0.0);
        // second-order denominator changes magnitudes only
        for (int l = 1; l <= 30; ++l) {
            const double k = 2 * pi * l;
            const double a = dispersion(k, p).alpha_re;
            for (bool quartic : {false, true}) {
                const double b = dispersion(k, p, {ClosureOrder::Gamma2, quartic, 1.0}).alpha_re;
                CHECK((a > 0) == (b > 0));
                CHECK(std::abs(b) <= std::abs(a));
            }
        }
    }
    CHECK(continuous_stable > 10);
    CHECK(continuous_stable < 190);
}

TEST_CASE("predicted peak counts") {
    MacroParams fig5;
    fig5.mu = 5e-4;
    fig5.kernel = {KernelFamily::QuadraticCompact, 0.25, 0.18, 1};
    CHECK(predicted_peak_count(fig5) == 4);
    CHECK(predicted_peak_count(fig7(0.10)) == 6);
    CHECK(predicted_peak_count(fig7(0.14)) == 4);
    CHECK(predicted_peak_count(fig7(0.18)) == 0);
    CHECK(predicted_peak_count(fig7(0.22)) == 0);
    int prev = 100;
    for (double r = 0.06; r < 0.2; r += 0.01) {
        const int c = predicted_peak_count(fig7(r));
        CHECK(c <= prev);
        prev = c;
    }
    // the undamped factor (k phi_k)^2 peaks at k = pi / r
    const double r = 0.13;
    double best = 0.0, kbest = 0.0;
    for (int j = 1; j < 200000; ++j) {
        const double k = 1e-3 * j;
        const double f = std::pow(k * fourier_coefficient(fig7(r).kernel, k), 2);
        if (f > best) { best = f; kbest = k; }
    }
    CHECK(kbest == doctest::Approx(pi / r).epsilon(1e-3));
}

TEST_CASE("stability report output") {
    const auto rep = is_linearly_stable(fig7(0.1), ModeSet::discrete());
    CHECK(rep.curve.size() == static_cast<std::size_t>(default_mode_cutoff(0.1)));
    CHECK(rep.predicted_peaks == 6);
    CHECK(rep.predicted_pattern_size == doctest::Approx(1.0 / 6));
    const auto j = nlohmann::json::parse(report_json(rep));
    CHECK(j["stable"] == false);
    CHECK(j["l_max"] == 6);
    CHECK(j["r_I_threshold"].get<double>() == doctest::Approx(0.1774).epsilon(1e-3));
    CHECK_THROWS_AS(is_linearly_stable(fig7(0.1), ModeSet::continuous(1.0, 0)), Error);
    auto wide = fig7(0.6);
    const auto w = is_linearly_stable(wide, ModeSet::discrete(5));
    CHECK(w.periodised_coefficients);
}
