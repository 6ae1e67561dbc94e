#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "tether/core/grid.hpp"
#include "tether/ibm/model.hpp"

namespace tether {

/// Per-SPP count of SPPs (self included) within `radius`, per unit area
/// (length in 1D), divided by the mean density M / |domain|.
std::vector<double> neighborhood_density(const IbmState& state, double radius);

/// Circular variance 1 - |mean orientation|.
double direction_variance(const IbmState& state);

/// Periodic Gaussian kernel density estimate with total mass 1. Each
/// particle contributes the exact cell averages of its wrapped Gaussian.
DensityField estimate_density_1d(std::span<const double> positions, double bandwidth_variance,
                                 const Grid1D& grid);

/// x coordinates of SPPs and obstacles, as used by the 1D density estimate.
std::vector<double> spp_x(const IbmState& state);
std::vector<double> obstacle_x(const IbmState& state);

struct IbmStatistics {
    double t = 0.0;
    double direction_variance = 0.0;
    double mean_neighborhood_density = 0.0;
    double std_neighborhood_density = 0.0;
};

IbmStatistics compute_statistics(const IbmState& state, double radius);

/// Snapshots: SPPs `id,x,y,angle`; obstacles `id,x,y,anchor_x,anchor_y`.
void write_spp_csv(const IbmState& state, const std::filesystem::path& path);
void write_obstacle_csv(const IbmState& state, const std::filesystem::path& path);
/// `t,direction_variance,mean_neighborhood_density,std_neighborhood_density`.
void write_statistics_csv(std::span<const IbmStatistics> rows, const std::filesystem::path& path);

}  // namespace tether
