#pragma once

#include <vector>

#include "tether/core/grid.hpp"
#include "tether/ibm/model.hpp"
#include "tether/macro1d/model.hpp"

namespace tether {

/// Obstacle densities recovered from a 1D particle state: the measured one
/// and the order-gamma and order-gamma^2 closures applied to the estimated
/// SPP density. The time derivative of the SPP density is the backward
/// difference between `previous` and `current`.
struct ObstacleReconstruction {
    DensityField rho_g;
    DensityField drho_g_dt;
    DensityField rho_f_measured;
    DensityField rho_f_gamma1;
    DensityField rho_f_gamma2;
    /// Cell-centre positions of SPP maxima and of the minima of each rho_f.
    std::vector<double> spp_maxima;
    std::vector<double> measured_minima;
    std::vector<double> gamma1_minima;
    std::vector<double> gamma2_minima;
};

ObstacleReconstruction reconstruct_obstacles(const IbmState& current, const IbmState& previous,
                                             const MacroParams& closure, const Grid1D& grid,
                                             double bandwidth_variance);

/// Signed periodic offset from each SPP maximum to the nearest minimum, in
/// units of length; negative values lie behind a maximum moving towards +x.
struct MinimumOffsets {
    std::vector<double> offsets;
    double mean = 0.0;
    double max_abs = 0.0;
};

MinimumOffsets minimum_offsets(const std::vector<double>& maxima, const std::vector<double>& minima,
                               double length);

}  // namespace tether
