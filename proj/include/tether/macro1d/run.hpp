#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "tether/macro1d/diagnostics.hpp"
#include "tether/macro1d/model.hpp"

namespace tether {

struct InitialCondition {
    enum class Kind { PerturbedUniform, Gaussian };
    Kind kind = Kind::PerturbedUniform;
    double amplitude = 0.01;   ///< perturbed-uniform: relative uniform white noise
    std::uint64_t seed = 1;    ///< perturbed-uniform noise seed
    double center = 0.5;       ///< gaussian
    double variance = 0.01;    ///< gaussian
};

std::string_view to_string(InitialCondition::Kind kind) noexcept;
InitialCondition::Kind initial_condition_from_string(std::string_view name);

/// Initial SPP density with total mass rho0 * length.
DensityField make_initial_density(const InitialCondition& ic, const Grid1D& grid, double rho0);

struct MacroNumerics {
    std::size_t n_cells = 333;
    double dt = 1e-3;            ///< fixed step, or the largest step when adaptive
    double t_end = 30.0;
    double output_interval = 1.0;
    bool adaptive = false;       ///< shrink steps to cfl_target of the positivity bound
    double cfl_target = 0.9;
    /// Solve in the frame moving with c1 (default) or in the lab frame.
    bool comoving = true;

    void validate() const;
};

struct MacroOutput {
    double t = 0.0;
    std::int64_t step = 0;
    const DensityField* rho_g = nullptr;
    const DensityField* rho_f = nullptr;
    double mass = 0.0;
    double min_rho_f = 0.0;
    int peaks = 0;
};

struct MacroRunResult {
    MacroState final_state;
    std::vector<double> times;
    std::vector<DensityField> rho_g;   ///< filled when store_snapshots is set
    std::vector<DensityField> rho_f;
    std::vector<double> mass;
    std::vector<double> min_rho_f_at_output;
    std::vector<int> peaks;
    double min_rho_f = 0.0;            ///< over every step of the run
    std::int64_t negative_steps = 0;   ///< steps with a negative obstacle density
    bool valid() const noexcept { return negative_steps == 0; }
};

struct MacroRunOptions {
    bool store_snapshots = true;
    PeakOptions peaks{};
    std::function<void(const MacroOutput&)> on_output;
};

/// Lab-frame obstacle density 1 + deviation for the state (the closure in params).
DensityField obstacle_density(const MacroOperator& op, const MacroState& state);

/// Integrates from `initial` to numerics.t_end, emitting outputs at every
/// multiple of output_interval (including the start).
MacroRunResult run_macro(const MacroParams& params, const MacroNumerics& numerics,
                         MacroState initial, const MacroRunOptions& options = {});
MacroRunResult run_macro(const MacroParams& params, const MacroNumerics& numerics,
                         const InitialCondition& ic, const MacroRunOptions& options = {});

}  // namespace tether
