#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include <omp.h>

#include "tether/core/convolution.hpp"
#include "tether/core/csv.hpp"
#include "tether/core/domain.hpp"
#include "tether/core/error.hpp"
#include "tether/core/finite_difference.hpp"
#include "tether/core/grid.hpp"
#include "tether/core/quadrature.hpp"
#include "tether/core/rng.hpp"

using namespace tether;
using std::numbers::pi;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST_CASE("wrap maps into the half-open period") {
    CHECK(wrap(1.2, 1.0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(wrap(-0.1, 1.0) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(wrap(0.5, 1.0) == 0.5);
    CHECK(wrap(1.0, 1.0) == 0.0);
    CHECK(wrap(-1e-18, 1.0) < 1.0);
    CHECK_THROWS_AS(wrap(std::nan(""), 1.0), Error);
    CHECK_THROWS_AS(wrap(INFINITY, 1.0), Error);
}

TEST_CASE("wrap is idempotent and preserves residue") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int t = 0; t < 2000; ++t) {
        const double x = u(gen);
        const double w = wrap(x, 1.0);
        REQUIRE(w >= 0.0);
        REQUIRE(w < 1.0);
        CHECK(wrap(w, 1.0) == w);
        const double k = std::round(x - w);
        CHECK(std::abs(x - w - k) < 1e-12);
    }
    const PeriodicDomain d(2.0, 3.0);
    const Vec2 p = wrap(Vec2{-0.5, 7.0}, d);
    CHECK(p.x == doctest::Approx(1.5));
    CHECK(p.y == doctest::Approx(1.0));
}

TEST_CASE("min_image follows the [-L/2, L/2) convention") {
    CHECK(min_image(0.9, 0.1, 1.0) == doctest::Approx(-0.2));
    CHECK(min_image(0.1, 0.9, 1.0) == doctest::Approx(0.2));
    CHECK(min_image(0.3, 0.3, 1.0) == 0.0);
    CHECK(min_image(0.5, 0.0, 1.0) == -0.5);
    CHECK(min_image(0.0, 0.5, 1.0) == -0.5);
    CHECK_THROWS_AS(min_image(NAN, 0.0, 1.0), Error);

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
        const double a = u(gen), b = u(gen);
        const double d = min_image(a, b, 1.0);
        REQUIRE(d >= -0.5);
        REQUIRE(d < 0.5);
        CHECK(d == doctest::Approx(-min_image(b, a, 1.0)).epsilon(1e-14));
    }
}

TEST_CASE("grid geometry") {
    const Grid1D g(333, 1.0);
    CHECK(g.dx() * 333 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.x(0) == doctest::Approx(0.5 / 333));
    CHECK_THROWS_AS(Grid1D(7), Error);
    CHECK_THROWS_AS(Grid1D(16, -1.0), Error);
}

TEST_CASE("density csv round-trips") {
    const Grid1D g(16);
    DensityField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::sin(0.3 * i) + 1.0 / 3.0;
    const auto path = std::filesystem::temp_directory_path() / "tether_density_rt.csv";
    write_csv(f, path);
    const DensityField back = read_density_csv(path);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(back[i] == f[i]);
    const auto table = read_csv(path);
    CHECK(table.header == std::vector<std::string>{"x", "value"});
    CHECK(std::stod(table.rows[3][table.column("x")]) == doctest::Approx(3.5 / 16));
    std::filesystem::remove(path);
}

TEST_CASE("convolution of a constant is a constant times kernel mass") {
    const Grid1D g(128);
    const auto k = sample_kernel(g, [](double x) { return std::exp(-x * x / 0.002); });
    double kmass = 0.0;
    for (double v : k) kmass += v * g.dx();
    const DensityField rho(g, 2.5);
    for (auto m : {ConvolutionMethod::Spectral, ConvolutionMethod::Direct}) {
        const auto out = convolve_periodic(rho, k, m);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(out[i] == doctest::Approx(2.5 * kmass));
        CHECK(out.mass() == doctest::Approx(rho.mass() * kmass));
    }
}

TEST_CASE("convolution of a cosine mode against direct quadrature of the integral") {
    // Oracle: (k * rho)(x) = int k(y) rho(x - y) dy computed with an
    // independent fine trapezoid rule on the continuous kernel.
    const double r = 0.18, C = 0.25, eps = 0.1;
    const int l = 3;
    auto kern = [&](double x) {
        const double a = std::abs(x);
        return a < r ? C * 1.5 / r * (1 - a / r) * (1 - a / r) : 0.0;
    };
    const Grid1D g(2048);
    DensityField rho(g);
    for (std::size_t i = 0; i < g.size(); ++i) rho[i] = 1.0 + eps * std::cos(2 * pi * l * g.x(i));
    const auto out = convolve_periodic(rho, sample_kernel(g, kern));
    for (std::size_t i : {0u, 100u, 777u, 2000u}) {
        const double x = g.x(i);
        const int nq = 200000;
        const double h = 2 * r / nq;
        double s = 0.0;
        for (int q = 0; q <= nq; ++q) {
            const double y = -r + q * h;
            const double w = (q == 0 || q == nq) ? 0.5 : 1.0;
            s += w * kern(y) * (1.0 + eps * std::cos(2 * pi * l * (x - y)));
        }
        s *= h;
        CHECK(out[i] == doctest::Approx(s).epsilon(1e-5));
    }
}

TEST_CASE("single-cell field reproduces the shifted kernel") {
    const Grid1D g(64);
    const auto k = sample_kernel(g, [](double x) { return std::exp(-std::abs(x) / 0.05); });
    DensityField delta(g);
    delta[10] = 1.0 / g.dx();
    const auto out = convolve_periodic(delta, k);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(out[i] == doctest::Approx(k[(i + 64 - 10) % 64]).epsilon(1e-12));
}

TEST_CASE("spectral and direct convolution agree on random fields") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t n : {8u, 9u, 17u, 64u, 100u, 333u, 1000u}) {
        const Grid1D g(n);
        std::vector<double> v(n);
        for (auto& x : v) x = u(gen);
        const DensityField rho(g, v);
        std::vector<double> k(n);
        for (auto& x : k) x = u(gen) - 0.5;
        const auto a = convolve_periodic(rho, k, ConvolutionMethod::Spectral);
        const auto b = convolve_periodic(rho, k, ConvolutionMethod::Direct);
        CHECK(rel_l2(a.data(), b.data()) < 1e-10);
    }
    const DensityField rho(Grid1D(16), 1.0);
    CHECK_THROWS_AS(convolve_periodic(rho, std::vector<double>(17, 0.0)), Error);
}

TEST_CASE("second difference: constant, spike and convergence") {
    const Grid1D g(32);
    const DensityField c(g, 4.0);
    const auto dc = second_derivative_periodic(c);
    for (double v : dc.values()) CHECK(v == 0.0);

    DensityField spike(g);
    spike[0] = 1.0;
    const auto s = second_derivative_periodic(spike);
    const double idx2 = 1.0 / (g.dx() * g.dx());
    CHECK(s[0] == doctest::Approx(-2 * idx2));
    CHECK(s[1] == doctest::Approx(idx2));
    CHECK(s[31] == doctest::Approx(idx2));
    CHECK(s[5] == 0.0);

    CHECK_THROWS_AS(second_difference_periodic(std::vector<double>{1.0, 2.0}, 0.1), Error);

    const int l = 2;
    double prev = 0.0;
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
        const Grid1D gg(n);
        DensityField f(gg);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::cos(2 * pi * l * gg.x(i));
        const auto d = second_derivative_periodic(f);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            err = std::max(err, std::abs(d[i] + std::pow(2 * pi * l, 2) * f[i]));
        if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.02));
        prev = err;
    }
}

TEST_CASE("discrete laplacian symbol matches the stencil") {
    const std::size_t n = 40;
    const Grid1D g(n);
    for (std::size_t m : {0u, 1u, 7u, 20u}) {
        DensityField f(g);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::cos(2 * pi * m * i / double(n));
        const auto d = second_derivative_periodic(f);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(d[i] == doctest::Approx(-discrete_laplacian_symbol(m, n, g.dx()) * f[i]).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("philox known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("rng streams are keyed, reproducible and well distributed") {
    RngStream a(42, StreamPurpose::Test, 5, 10);
    RngStream b(42, StreamPurpose::Test, 5, 10);
    RngStream c(42, StreamPurpose::Test, 6, 10);
    RngStream d(42, StreamPurpose::Test, 5, 11);
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs_c |= x != c.next_u64();
        differs_d |= x != d.next_u64();
    }
    CHECK(differs_c);
    CHECK(differs_d);

    RngStream s(1, StreamPurpose::Test, 0, 0);
    const int n = 200000;
    double m1 = 0, m2 = 0, u1 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        m1 += z;
        m2 += z * z;
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        u1 += u;
    }
    CHECK(std::abs(m1 / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(m2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(u1 / n - 0.5) < 5.0 * std::sqrt(1.0 / 12 / n));
    CHECK(derive_seed(7, 0) != derive_seed(7, 1));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("rng draws do not depend on thread schedule") {
    const int n = 4096;
    auto run = [&](int threads) {
        std::vector<double> out(n);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 7)
        for (int i = 0; i < n; ++i) {
            RngStream r(9, StreamPurpose::Test, static_cast<std::uint64_t>(i), 3);
            out[i] = r.normal() + r.uniform();
        }
        return out;
    };
    CHECK(run(1) == run(4));
}

TEST_CASE("gauss rules integrate polynomials exactly") {
    const auto gl = gauss_legendre(6);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 10);
    CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
    const auto gh = gauss_hermite_probabilist(5);
    double m0 = 0, m4 = 0, m8 = 0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        m0 += gh.weights[i];
        m4 += gh.weights[i] * std::pow(gh.nodes[i], 4);
        m8 += gh.weights[i] * std::pow(gh.nodes[i], 8);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(m8 == doctest::Approx(105.0).epsilon(1e-12));
    const double pw = integrate_piecewise([](double x) { return std::abs(x - 0.3); }, -1, 1, {0.3}, 2);
    CHECK(pw == doctest::Approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-14));
}

TEST_CASE("csv writer is atomic and round-trips doubles") {
    const auto path = std::filesystem::temp_directory_path() / "tether_csv_rt.csv";
    {
        CsvWriter w(path, {"a", "b"});
        w.cell(0.1).cell(1e-300).end_row();
        w.cell(-3).cell("x").end_row();
        CHECK_FALSE(std::filesystem::exists(path));
        w.close();
    }
    const auto t = read_csv(path);
    CHECK(std::stod(t.rows[0][0]) == 0.1);
    CHECK(std::stod(t.rows[0][1]) == 1e-300);
    CHECK(t.rows[1][1] == "x");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    std::filesystem::remove(path);
}

TEST_CASE("csv text cells with separators are quoted") {
    const auto path = std::filesystem::temp_directory_path() / "tether_csv_quote.csv";
    CsvWriter w(path, {"a", "b", "c"});
    w.cell("x, y").cell("say \"hi\"").cell("").end_row();
    w.close();
    const auto t = read_csv(path);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0] == std::vector<std::string>{"x, y", "say \"hi\"", ""});
    std::filesystem::remove(path);
}
