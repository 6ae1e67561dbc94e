#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tether/ibm/model.hpp"
#include "tether/ibm/statistics.hpp"

namespace tether {

struct IbmNumerics {
    double t_end = 30.0;
    double output_interval = 1.0;
    /// Radius for the neighbourhood density statistic; 0 selects r_A.
    double stats_radius = 0.0;
    std::uint64_t seed = 1;

    void validate(double dt) const;
};

struct IbmRunOptions {
    /// Called at t = 0 and at every output time with the current state and
    /// the state one step earlier (equal to the current one at t = 0).
    std::function<void(const IbmState& current, const IbmState& previous)> on_output;
    bool statistics = true;
};

struct IbmRunResult {
    IbmState final_state;
    IbmState previous_state;
    std::vector<IbmStatistics> statistics;
};

IbmRunResult run_ibm(const IbmParams& params, const IbmNumerics& numerics, IbmState initial,
                     const IbmRunOptions& options = {});

}  // namespace tether
