#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tether/core/convolution.hpp"
#include "tether/core/grid.hpp"
#include "tether/kernels.hpp"

namespace tether {

enum class ClosureOrder { Gamma1, Gamma2 };

std::string_view to_string(ClosureOrder order) noexcept;
ClosureOrder closure_order_from_string(std::string_view name);

/// Parameters of the 1D macroscopic SPP equation with obstacle closure.
struct MacroParams {
    double c1 = 1.0;      ///< transport speed
    double zeta = 8.0;    ///< SPP friction
    double mu = 5e-4;     ///< SPP self-repulsion strength (mass of psi)
    double gamma = 2e-3;  ///< eta / kappa
    double eta = 1.0;     ///< obstacle friction
    double delta = 0.0;   ///< obstacle noise
    double rho0 = 1.0;    ///< mean SPP density
    KernelSpec kernel{KernelFamily::QuadraticCompact, 0.25, 0.18, 1};
    ClosureOrder closure = ClosureOrder::Gamma1;

    void validate() const;
};

/// Diagnostics of an obstacle-density field (negativity is reported, never clamped).
struct ClosureDiagnostics {
    double min_rho_f = 0.0;
    std::size_t negative_cells = 0;
    bool valid() const noexcept { return negative_cells == 0; }
};

ClosureDiagnostics diagnose_obstacle_density(const DensityField& rho_f);

/// Spectral operators of the closure on a fixed grid. The kernel K is
/// convolution with phi; D2 is the periodic second difference with symbol
/// -lambda_m; the heat kernel of variance 2 delta uses exp(-delta lambda_m)
/// so that the delta -> 0 limit reproduces D2 exactly.
class MacroOperator {
public:
    MacroOperator(const MacroParams& params, const Grid1D& grid);

    const MacroParams& params() const noexcept { return params_; }
    const Grid1D& grid() const noexcept { return grid_; }

    /// rho_f - 1 for the selected closure; drho_dt is ignored by gamma1 and
    /// treated as zero when absent.
    DensityField obstacle_deviation(const DensityField& rho_g,
                                    const DensityField* drho_dt = nullptr) const;
    DensityField obstacle_deviation(const DensityField& rho_g, ClosureOrder order,
                                    const DensityField* drho_dt) const;

    /// phi * (rho_f - 1) for the selected closure.
    std::vector<double> smoothed_obstacle_deviation(const DensityField& rho_g,
                                                    const DensityField* drho_dt) const;

    /// K-hat_m (real part of dx * DFT of the sampled kernel).
    double kernel_symbol(std::size_t m) const { return k_hat_.at(m); }

private:
    std::vector<double> apply(const std::vector<double>& multiplier,
                              std::span<const double> values) const;

    MacroParams params_;
    Grid1D grid_;
    std::shared_ptr<const RealFft> fft_;
    std::vector<double> k_hat_;
    std::vector<double> lambda_;
    std::vector<double> first_order_;   ///< multiplier of K rho in rho_f - 1
    std::vector<double> time_term_;     ///< multiplier of K d_t rho in rho_f - 1
};

/// rho_f = 1 + (gamma/eta) d_xx (phi * rho_g).
DensityField obstacle_density_gamma1(const DensityField& rho_g, const MacroParams& params);

/// rho_f = 1 - gamma/(delta eta) [rho_bar - M_{2 delta} * rho_bar]
///         - (gamma^2/eta) d_t d_xx rho_bar, with rho_bar = phi * rho_g.
DensityField obstacle_density_gamma2(const DensityField& rho_g, const DensityField& drho_g_dt,
                                     const MacroParams& params);

enum class FluxScheme {
    Upwind,    ///< first-order upwind in the face velocity (the solver scheme)
    Centered,  ///< arithmetic face average; used for consistency checks
};

/// Face velocities u_{i+1/2} = c1 - (Pi_{i+1} - Pi_i) / (zeta dx) with
/// Pi = mu rho + phi * (rho_f - 1).
std::vector<double> face_velocities(const MacroOperator& op, const DensityField& rho_g,
                                    const DensityField* drho_dt = nullptr);

/// d_t rho_g = -d_x [rho_g u] in conservative finite-volume form.
DensityField macro_rhs(const MacroOperator& op, const DensityField& rho_g,
                       const DensityField* drho_dt = nullptr,
                       FluxScheme scheme = FluxScheme::Upwind);
DensityField macro_rhs(const DensityField& rho_g, const MacroParams& params,
                       FluxScheme scheme = FluxScheme::Upwind);

/// Discrete obstacle-induced kernel w = D2 (k * k) on the grid, the exact
/// discrete counterpart of W = phi' * phi'.
std::vector<double> discrete_macro_kernel(const KernelSpec& kernel, const Grid1D& grid);

/// (1/zeta) d_x [rho d_x (mu rho + (gamma/eta) W * rho)] with centred faces,
/// for a W sampled on the grid.
DensityField gradient_flow_rhs(const DensityField& rho_g, const MacroParams& params,
                               std::span<const double> w_kernel);

/// Centred discrete -c1 d_x rho (face averages), the advection part of the
/// centred macro_rhs.
DensityField centered_advection(const DensityField& rho_g, double c1);

/// Solver state. With a non-zero frame_velocity the density is stored in a
/// frame translating at that speed; `shift` is the accumulated frame offset
/// and lab_density() maps back. The uniform drift c1 is then carried exactly
/// by the frame instead of by the upwind flux, which removes the O(c1 dx)
/// numerical diffusion of first-order upwinding.
struct MacroState {
    DensityField rho_g;
    double t = 0.0;
    std::optional<DensityField> rho_g_prev;
    double dt_prev = 0.0;
    std::int64_t step = 0;
    double frame_velocity = 0.0;
    double shift = 0.0;
};

/// Translates a field by `distance` with conservative linear interpolation
/// (mass and positivity preserving; exact for whole-cell shifts).
DensityField translate(const DensityField& field, double distance);

/// rho_g in the lab frame.
DensityField lab_density(const MacroState& state);

/// Face velocities relative to the state's frame.
std::vector<double> transport_velocities(const MacroOperator& op, const MacroState& state);

/// Largest admissible explicit step for the current state:
/// dx / max_i (u+_{i+1/2} - u-_{i-1/2}). Infinity for a motionless state.
double max_stable_dt(const MacroOperator& op, const MacroState& state);

/// One explicit upwind step. Throws NumericalError when dt violates the
/// positivity CFL bound or the state becomes non-finite.
MacroState macro_step(const MacroState& state, double dt, const MacroOperator& op);
MacroState macro_step(const MacroState& state, double dt, const MacroParams& params);

/// Backward-difference estimate of the lab-frame d_t rho_g, expressed in the
/// state's frame (zero before the first step).
DensityField time_derivative_estimate(const MacroState& state);

}  // namespace tether
