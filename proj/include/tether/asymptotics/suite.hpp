#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tether {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed() const noexcept { return residual <= tolerance; }
};

struct VerificationOptions {
    std::uint64_t seed = 7;
    /// Random evaluation points per dimension for the h-solution checks.
    int random_points = 20;
    /// Adds the Monte-Carlo obstacle-ensemble checks (tens of seconds).
    bool monte_carlo = false;
    std::size_t monte_carlo_anchors = 100000;
};

/// Runs every check of the expansion machinery; residuals are compared
/// against fixed tolerances.
std::vector<CheckResult> run_asymptotics_suite(const VerificationOptions& options = {});

/// The Monte-Carlo checks alone: zero field, closure match and the linear
/// scaling of the deviation with gamma.
std::vector<CheckResult> run_monte_carlo_checks(std::size_t anchors, std::uint64_t seed);

/// `check,residual,tolerance,status` with status pass or fail.
void write_check_csv(std::span<const CheckResult> checks, const std::filesystem::path& path);

bool all_passed(std::span<const CheckResult> checks) noexcept;

}  // namespace tether
