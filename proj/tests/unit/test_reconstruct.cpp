#include <doctest.h>

#include <cmath>

#include "tether/core/error.hpp"
#include "tether/ibm/statistics.hpp"
#include "tether/reconstruct.hpp"

using namespace tether;

TEST_CASE("minimum offsets use the nearest periodic image") {
    const auto o = minimum_offsets({0.1, 0.6}, {0.08, 0.95}, 1.0);
    REQUIRE(o.offsets.size() == 2);
    CHECK(o.offsets[0] == doctest::Approx(-0.02));
    CHECK(o.offsets[1] == doctest::Approx(0.35));
    CHECK(o.mean == doctest::Approx(0.165));
    CHECK(o.max_abs == doctest::Approx(0.35));
    // across the boundary
    CHECK(minimum_offsets({0.98}, {0.01}, 1.0).offsets[0] == doctest::Approx(0.03));
    const auto none = minimum_offsets({0.5}, {}, 1.0);
    CHECK(none.offsets.empty());
    CHECK(none.max_abs == 0.0);
}

TEST_CASE("obstacle reconstruction from particle states") {
    IbmParams p;
    p.N = 60;
    p.M = 60;
    p.phi = {KernelFamily::QuadraticCompact, 0.25, 0.18, 1};
    p.psi = {KernelFamily::QuadraticCompact, 5e-4, 0.02, 1};
    auto prev = make_initial_state_1d(p, 1.0, 3);
    // SPPs bunched around x = 0.3 so the density has one clear maximum
    for (std::size_t k = 0; k < prev.Z.size(); ++k)
        prev.Z[k].x = 0.3 + 0.1 * (static_cast<double>(k) / 59.0 - 0.5);
    auto cur = prev;
    cur.t = prev.t + 0.01;
    for (auto& z : cur.Z) z.x += 0.01;

    MacroParams closure;
    const Grid1D grid(200);
    const double var = 1e-3;
    const auto rec = reconstruct_obstacles(cur, prev, closure, grid, var);

    const auto rho_now = estimate_density_1d(spp_x(cur), var, grid);
    const auto rho_before = estimate_density_1d(spp_x(prev), var, grid);
    CHECK(rec.rho_g.data() == rho_now.data());
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(rec.drho_g_dt[i] == doctest::Approx((rho_now[i] - rho_before[i]) / 0.01));
    CHECK(rec.rho_f_gamma1.data() == obstacle_density_gamma1(rho_now, closure).data());
    CHECK(rec.rho_f_gamma2.data() ==
          obstacle_density_gamma2(rho_now, rec.drho_g_dt, closure).data());
    CHECK(rec.rho_f_measured.mass() == doctest::Approx(1.0));

    REQUIRE(rec.spp_maxima.size() == 1);
    CHECK(std::abs(rec.spp_maxima[0] - 0.31) < 2 * grid.dx());
    // repulsive kernel: the first-order closure is depleted where the SPPs are
    const auto off = minimum_offsets(rec.spp_maxima, rec.gamma1_minima, 1.0);
    CHECK(off.max_abs <= 1.5 * grid.dx());

    auto flat = prev;
    flat.domain = PeriodicDomain(2, 1.0);
    CHECK_THROWS_AS(reconstruct_obstacles(flat, prev, closure, grid, var), Error);
}
