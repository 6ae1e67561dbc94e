#include "tether/reconstruct.hpp"

#include <cmath>
#include <limits>

#include "tether/core/error.hpp"
#include "tether/ibm/statistics.hpp"
#include "tether/macro1d/diagnostics.hpp"

namespace tether {

namespace {

std::vector<double> positions_of(const std::vector<std::size_t>& cells, const Grid1D& grid) {
    std::vector<double> out;
    out.reserve(cells.size());
    for (std::size_t c : cells) out.push_back(grid.x(c));
    return out;
}

std::vector<double> minima_of(const DensityField& f) {
    std::vector<double> depth(f.data());
    const double top = f.max();
    for (double& v : depth) v = top - v;
    return positions_of(peak_positions(depth), f.grid());
}

}  // namespace

ObstacleReconstruction reconstruct_obstacles(const IbmState& current, const IbmState& previous,
                                             const MacroParams& closure, const Grid1D& grid,
                                             double bandwidth_variance) {
    if (current.domain.dimension() != 1 || previous.domain.dimension() != 1)
        throw Error("obstacle reconstruction needs 1D states");
    const double dt = current.t - previous.t;
    auto rho_g = estimate_density_1d(spp_x(current), bandwidth_variance, grid);
    DensityField drho(grid);
    if (dt > 0.0) {
        const auto prev = estimate_density_1d(spp_x(previous), bandwidth_variance, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) drho[i] = (rho_g[i] - prev[i]) / dt;
    }
    auto measured = estimate_density_1d(obstacle_x(current), bandwidth_variance, grid);
    auto g1 = obstacle_density_gamma1(rho_g, closure);
    auto g2 = obstacle_density_gamma2(rho_g, drho, closure);
    ObstacleReconstruction out{std::move(rho_g), std::move(drho), std::move(measured),
                               std::move(g1), std::move(g2), {}, {}, {}, {}};
    out.spp_maxima = positions_of(peak_positions(out.rho_g.values()), grid);
    out.measured_minima = minima_of(out.rho_f_measured);
    out.gamma1_minima = minima_of(out.rho_f_gamma1);
    out.gamma2_minima = minima_of(out.rho_f_gamma2);
    return out;
}

MinimumOffsets minimum_offsets(const std::vector<double>& maxima, const std::vector<double>& minima,
                               double length) {
    MinimumOffsets out;
    if (maxima.empty() || minima.empty()) return out;
    for (double p : maxima) {
        double best = std::numeric_limits<double>::infinity();
        for (double m : minima) {
            double d = std::remainder(m - p, length);
            if (std::abs(d) < std::abs(best)) best = d;
        }
        out.offsets.push_back(best);
        out.mean += best;
        out.max_abs = std::max(out.max_abs, std::abs(best));
    }
    out.mean /= static_cast<double>(out.offsets.size());
    return out;
}

}  // namespace tether
