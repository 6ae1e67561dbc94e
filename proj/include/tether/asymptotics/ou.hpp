#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tether/core/grid.hpp"
#include "tether/kernels.hpp"

namespace tether {

struct OuOptions {
    /// Euler-Maruyama step; 0 selects gamma / 50. Must not exceed gamma / 10.
    double dt = 0.0;
    /// Relaxation time before the first snapshot; 0 selects 10 gamma.
    double burn_in = 0.0;
    /// Time between snapshots; 0 selects gamma.
    double snapshot_interval = 0.0;
    std::size_t snapshots = 50;
    /// Snapshots are grouped into this many batches for the error estimate.
    std::size_t batches = 10;
    std::size_t bins = 100;
    std::uint64_t seed = 1;
};

struct OuResult {
    /// Histogram density of X on [0, L), averaged over all snapshots.
    DensityField rho_f;
    /// Batch-means standard error of each bin.
    std::vector<double> standard_error;
    /// Final periodic displacements X_i - Y_i.
    std::vector<double> displacements;
    double dt = 0.0;
    std::size_t steps = 0;
};

/// Brute-force obstacle ensemble in a frozen 1D velocity field:
///   dX = -(1/gamma)(X - Y) dt + v(X) dt + sqrt(2 delta / gamma) dB
/// with N anchors equally spaced on the period of `velocity`'s grid. The
/// field is interpolated linearly between cell centres. Each anchor owns an
/// independent random stream, so results do not depend on the thread count.
OuResult ou_monte_carlo(const DensityField& velocity, double gamma, double delta, std::size_t N,
                        const OuOptions& options = {});

struct OuClosureComparison {
    /// ||(rho_f - 1) - target|| / ||target|| over the bins.
    double relative_l2 = 0.0;
    /// RMS of the empirical deviation rho_f - 1 and of its standard error.
    double deviation_rms = 0.0;
    double noise_rms = 0.0;
    double target_rms = 0.0;
    OuResult run;
    /// First-order closure (gamma/eta) d_xx rho_bar, averaged over each bin.
    std::vector<double> target;
};

/// Runs the ensemble in v = -(1/eta) d_x (phi * rho_g) and compares the
/// empirical obstacle deviation with the first-order closure. The grid of
/// rho_g must have a multiple of options.bins cells.
OuClosureComparison compare_ou_with_closure(const DensityField& rho_g, const KernelSpec& kernel,
                                            double eta, double gamma, double delta, std::size_t N,
                                            const OuOptions& options = {});

}  // namespace tether
