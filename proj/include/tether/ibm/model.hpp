#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tether/core/domain.hpp"
#include "tether/core/vec2.hpp"
#include "tether/kernels.hpp"

namespace tether {

/// Parameters of the coupled SPP / tethered-obstacle particle model.
struct IbmParams {
    double kappa = 100.0;  ///< spring stiffness
    double eta = 1.0;      ///< obstacle friction
    double zeta = 1.0;     ///< SPP friction
    double nu = 10.0;      ///< alignment frequency
    double d_s = 0.1;      ///< orientation noise intensity
    double d_o = 0.0;      ///< obstacle position noise intensity
    double r_A = 0.05;     ///< alignment radius
    KernelSpec phi{KernelFamily::QuadraticCompact, 1.0, 0.05, 2};   ///< SPP-obstacle
    KernelSpec psi{KernelFamily::QuadraticCompact, 0.01, 0.05, 2};  ///< SPP-SPP
    double dt = 1e-3;
    std::size_t N = 5000;  ///< obstacles
    std::size_t M = 5000;  ///< SPPs

    double r_R() const noexcept { return psi.radius; }
    /// Throws ConfigError. `dimension` selects the kernel dimension expected.
    void validate(int dimension) const;
};

/// Particle state. In 1D only the x components are used and every
/// orientation is (1, 0).
struct IbmState {
    PeriodicDomain domain{2, 1.0};
    std::vector<Vec2> Z;      ///< SPP positions
    std::vector<Vec2> alpha;  ///< SPP orientations (unit vectors)
    std::vector<Vec2> X;      ///< obstacle positions
    std::vector<Vec2> Y;      ///< anchors, never modified by the steppers
    double t = 0.0;
    std::uint64_t step = 0;
    /// Alignment sums that vanished and fell back to the own orientation.
    std::uint64_t degenerate_alignments = 0;

    std::size_t n_spp() const noexcept { return Z.size(); }
    std::size_t n_obstacles() const noexcept { return X.size(); }
    void check_consistent() const;
};

/// Uniform anchors with X = Y, uniform SPP positions and angles.
IbmState make_initial_state_2d(const IbmParams& params, const PeriodicDomain& domain,
                               std::uint64_t seed);

/// Equally spaced anchors with X = Y and uniformly random SPP positions.
IbmState make_initial_state_1d(const IbmParams& params, double length, std::uint64_t seed);

/// Normalised mean flux of SPPs within r_A of SPP k (periodic distances).
/// When the flux is below 1e-14 the particle keeps its own orientation and
/// `degenerate`, if given, is incremented.
Vec2 mean_direction(const IbmState& state, std::size_t k, double r_A, bool include_self = true,
                    std::uint64_t* degenerate = nullptr);

/// One Euler-Maruyama step. Random draws use counter streams keyed by
/// (seed, particle, step), so results do not depend on the thread count.
IbmState ibm_step_2d(const IbmState& state, const IbmParams& params, std::uint64_t seed);
IbmState ibm_step_1d(const IbmState& state, const IbmParams& params, std::uint64_t seed);

/// Dispatches on the domain dimension.
IbmState ibm_step(const IbmState& state, const IbmParams& params, std::uint64_t seed);

}  // namespace tether
