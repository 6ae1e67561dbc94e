#include "tether/ibm/run.hpp"

#include <cmath>

#include "tether/core/error.hpp"

namespace tether {

namespace {

std::uint64_t steps_for(double span, double dt) {
    return static_cast<std::uint64_t>(std::llround(span / dt));
}

}  // namespace

void IbmNumerics::validate(double dt) const {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
    if (!(output_interval > 0.0) || !std::isfinite(output_interval))
        throw ConfigError("output_interval must be > 0");
    if (steps_for(output_interval, dt) == 0)
        throw ConfigError("output_interval must be at least one time step");
    if (!(stats_radius >= 0.0)) throw ConfigError("stats_radius must be >= 0");
}

IbmRunResult run_ibm(const IbmParams& params, const IbmNumerics& numerics, IbmState initial,
                     const IbmRunOptions& options) {
    const int dim = initial.domain.dimension();
    params.validate(dim);
    numerics.validate(params.dt);
    initial.check_consistent();
    const double radius = numerics.stats_radius > 0.0 ? numerics.stats_radius : params.r_A;
    const std::uint64_t n_steps = steps_for(numerics.t_end, params.dt);
    const std::uint64_t every = steps_for(numerics.output_interval, params.dt);

    IbmRunResult result;
    auto emit = [&](const IbmState& cur, const IbmState& prev) {
        if (options.statistics && cur.n_spp() > 0 && radius > 0.0)
            result.statistics.push_back(compute_statistics(cur, radius));
        if (options.on_output) options.on_output(cur, prev);
    };

    IbmState state = std::move(initial);
    IbmState previous = state;
    emit(state, previous);
    for (std::uint64_t s = 1; s <= n_steps; ++s) {
        IbmState next = ibm_step(state, params, numerics.seed);
        previous = std::move(state);
        state = std::move(next);
        if (s % every == 0 || s == n_steps) emit(state, previous);
    }
    result.final_state = std::move(state);
    result.previous_state = std::move(previous);
    return result;
}

}  // namespace tether
