#pragma once

#include <span>
#include <vector>

#include "tether/core/grid.hpp"

namespace tether {

struct PeakOptions {
    /// A peak must reach this fraction of the field maximum.
    double relative_threshold = 0.1;
    /// Minimum prominence as a fraction of (max - min); suppresses ripples.
    double relative_prominence = 0.1;
    /// Fields with (max - min) <= flat_tolerance * |max| count as flat.
    double flat_tolerance = 1e-2;
};

/// Number of local maxima on the periodic grid. Plateaus count once; flat
/// fields have no peaks.
int peak_count(std::span<const double> values, const PeakOptions& options = {});
int peak_count(const DensityField& field, double relative_threshold = 0.1);

/// Cell indices of the peaks counted by peak_count (plateau centres).
std::vector<std::size_t> peak_positions(std::span<const double> values,
                                        const PeakOptions& options = {});

/// Periodic shift s (in cells, sub-cell refined, in [-n/2, n/2)) maximising
/// the mean-free correlation sum_i a_i b_{i+s}, so b is a translated by +s
/// cells. Among local maxima within 80% of the best, the smallest |s| wins,
/// which resolves the aliasing of multi-bump patterns as long as each step
/// moves less than half a bump spacing.
double correlation_shift(std::span<const double> a, std::span<const double> b);

/// Mean translation speed of a trajectory sampled every dt_out. Shifts of
/// consecutive snapshots are accumulated, so dt_out must be small enough
/// that each pair moves less than half a bump spacing.
double wave_speed(std::span<const DensityField> trajectory, double dt_out);

}  // namespace tether
