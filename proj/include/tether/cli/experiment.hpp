#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "tether/cli/config.hpp"

namespace tether::cli {

/// Headline numbers of one run; -1 and NaN mark quantities the mode does not produce.
struct RunSummary {
    int predicted_peaks = -1;
    int macro_peaks = -1;
    int ibm_peaks = -1;
    double min_rho_f = std::numeric_limits<double>::quiet_NaN();
    bool valid = true;
};

/// Runs one experiment into `out_dir`, which is created if needed. The
/// resolved configuration is written there first as config.yaml. Solver
/// failures propagate as NumericalError, bad input as ConfigError or Error.
/// Progress lines go to `log` when given.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          std::ostream* log = nullptr);

struct SweepRow {
    std::size_t cell = 0;
    double value = 0.0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    RunSummary summary;
    bool ok = true;
    std::string message;
};

/// Configuration of one sweep cell: the base mode, the swept value and the
/// seed derived from the master seed and the cell index.
ExperimentConfig sweep_cell_config(const ExperimentConfig& config, std::size_t value_index,
                                   std::size_t replicate);

/// Output subdirectory of a cell, `cell_000` style.
std::string sweep_cell_name(std::size_t cell);

/// Runs every (value, replicate) cell in a worker pool, each into its own
/// subdirectory, then writes sweep_summary.csv. Failed cells are recorded and
/// the sweep continues.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                std::ostream* log = nullptr);

}  // namespace tether::cli
