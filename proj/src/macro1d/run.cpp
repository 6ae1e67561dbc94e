#include "tether/macro1d/run.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tether/core/domain.hpp"
#include "tether/core/error.hpp"
#include "tether/core/rng.hpp"

namespace tether {

std::string_view to_string(InitialCondition::Kind kind) noexcept {
    return kind == InitialCondition::Kind::Gaussian ? "gaussian" : "perturbed-uniform";
}

InitialCondition::Kind initial_condition_from_string(std::string_view name) {
    if (name == "perturbed-uniform") return InitialCondition::Kind::PerturbedUniform;
    if (name == "gaussian") return InitialCondition::Kind::Gaussian;
    throw Error("unknown initial condition '" + std::string(name) + "'");
}

DensityField make_initial_density(const InitialCondition& ic, const Grid1D& grid, double rho0) {
    DensityField rho(grid);
    const double L = grid.length();
    if (ic.kind == InitialCondition::Kind::PerturbedUniform) {
        if (!(ic.amplitude >= 0.0 && ic.amplitude < 1.0))
            throw Error("perturbation amplitude must lie in [0, 1)");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            RngStream rng(ic.seed, StreamPurpose::MacroInitial, i, 0);
            rho[i] = rho0 * (1.0 + ic.amplitude * (2.0 * rng.uniform() - 1.0));
        }
    } else {
        if (!(ic.variance > 0.0)) throw Error("gaussian variance must be positive");
        const double s = std::sqrt(ic.variance);
        const int images = static_cast<int>(std::ceil(8.0 * s / L));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double d = min_image(grid.x(i), wrap(ic.center, L), L);
            double v = 0.0;
            for (int j = -images; j <= images; ++j) {
                const double z = (d + j * L) / s;
                v += std::exp(-0.5 * z * z);
            }
            rho[i] = v;
        }
    }
    const double scale = rho0 * L / rho.mass();
    for (double& v : rho.values()) v *= scale;
    return rho;
}

void MacroNumerics::validate() const {
    if (n_cells < Grid1D::min_cells) throw Error("n_cells must be at least 8");
    if (!(dt > 0.0)) throw Error("dt must be positive");
    if (!(t_end >= 0.0)) throw Error("t_end must be non-negative");
    if (!(output_interval > 0.0)) throw Error("output_interval must be positive");
    if (!(cfl_target > 0.0 && cfl_target <= 1.0)) throw Error("cfl_target must lie in (0, 1]");
}

namespace {

/// rho_f in the state's own frame.
DensityField frame_obstacle_density(const MacroOperator& op, const MacroState& state) {
    std::optional<DensityField> d;
    if (op.params().closure == ClosureOrder::Gamma2) d = time_derivative_estimate(state);
    auto dev = op.obstacle_deviation(state.rho_g, d ? &*d : nullptr);
    for (double& v : dev.values()) v += 1.0;
    return dev;
}

}  // namespace

DensityField obstacle_density(const MacroOperator& op, const MacroState& state) {
    auto f = frame_obstacle_density(op, state);
    return state.shift == 0.0 ? f : translate(f, state.shift);
}

MacroRunResult run_macro(const MacroParams& params, const MacroNumerics& numerics,
                         MacroState initial, const MacroRunOptions& options) {
    numerics.validate();
    const MacroOperator op(params, initial.rho_g.grid());
    MacroRunResult result{std::move(initial), {}, {}, {}, {}, {}, {}, 0.0, 0};
    MacroState& s = result.final_state;
    const double t0 = s.t;
    result.min_rho_f = frame_obstacle_density(op, s).min();

    auto emit = [&]() {
        const auto rho_g = lab_density(s);
        const auto rho_f = obstacle_density(op, s);
        MacroOutput out{s.t, s.step, &rho_g, &rho_f, s.rho_g.mass(), rho_f.min(),
                        peak_count(rho_g.values(), options.peaks)};
        result.times.push_back(out.t);
        result.mass.push_back(out.mass);
        result.min_rho_f_at_output.push_back(out.min_rho_f);
        result.peaks.push_back(out.peaks);
        if (options.store_snapshots) {
            result.rho_g.push_back(rho_g);
            result.rho_f.push_back(rho_f);
        }
        if (options.on_output) options.on_output(out);
    };

    emit();
    const double eps = 1e-9 * numerics.output_interval;
    std::int64_t k = 1;
    double next_out = t0 + numerics.output_interval;
    while (s.t < numerics.t_end - eps) {
        const double target = std::min(next_out, numerics.t_end);
        double h = std::min(numerics.dt, target - s.t);
        if (numerics.adaptive) h = std::min(h, numerics.cfl_target * max_stable_dt(op, s));
        // Avoid a sliver step just before an output time.
        if (target - (s.t + h) < 1e-6 * h) h = target - s.t;
        s = macro_step(s, h, op);
        if (std::abs(s.t - target) <= eps) s.t = target;
        const double mrf = frame_obstacle_density(op, s).min();
        result.min_rho_f = std::min(result.min_rho_f, mrf);
        if (mrf < 0.0) ++result.negative_steps;
        if (s.t >= next_out - eps) {
            emit();
            ++k;
            next_out = t0 + static_cast<double>(k) * numerics.output_interval;
        }
    }
    if (result.times.back() < s.t - eps) emit();
    return result;
}

MacroRunResult run_macro(const MacroParams& params, const MacroNumerics& numerics,
                         const InitialCondition& ic, const MacroRunOptions& options) {
    const Grid1D grid(numerics.n_cells);
    MacroState s{make_initial_density(ic, grid, params.rho0), 0.0, std::nullopt, 0.0, 0,
                 numerics.comoving ? params.c1 : 0.0, 0.0};
    return run_macro(params, numerics, std::move(s), options);
}

}  // namespace tether
