#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tether/asymptotics/suite.hpp"
#include "tether/ibm/model.hpp"
#include "tether/ibm/run.hpp"
#include "tether/kernels.hpp"
#include "tether/macro1d/run.hpp"
#include "tether/stability.hpp"

namespace tether::cli {

enum class Mode { Ibm2d, Ibm1d, Macro1d, Stability, Reconstruct, VerifyAsymptotics, Sweep };

std::string_view to_string(Mode mode) noexcept;
Mode mode_from_string(std::string_view name);
const std::vector<Mode>& all_modes();

struct KernelConfig {
    KernelFamily family = KernelFamily::QuadraticCompact;
    double mass = 1.0;
    double radius = 0.1;

    friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

/// One experiment. Every field has a default, so a config file only lists
/// what differs; `mode` is required unless the command line supplies it.
struct ExperimentConfig {
    Mode mode = Mode::Macro1d;
    std::uint64_t seed = 1;
    std::string output = "output";

    struct Domain {
        double length = 1.0;
        friend bool operator==(const Domain&, const Domain&) = default;
    } domain;

    /// SPP-obstacle interaction; the macro closure and the stability analysis use it too.
    KernelConfig kernel{KernelFamily::QuadraticCompact, 0.25, 0.18};
    /// SPP-SPP repulsion of the particle models.
    KernelConfig repulsion{KernelFamily::QuadraticCompact, 0.01, 0.05};

    struct Parameters {
        double c1 = 1.0;
        double zeta = 8.0;
        double mu = 5e-4;
        double eta = 1.0;
        double kappa = 500.0;  ///< gamma = eta / kappa everywhere
        double delta = 0.0;
        double rho0 = 1.0;
        ClosureOrder closure = ClosureOrder::Gamma1;
        double nu = 10.0;
        double d_s = 0.1;
        double d_o = 0.0;
        double r_A = 0.05;
        std::size_t N = 5000;
        std::size_t M = 5000;
        friend bool operator==(const Parameters&, const Parameters&) = default;
    } parameters;

    struct Numerics {
        double dt = 1e-3;
        std::size_t n_cells = 333;
        double t_end = 30.0;
        double output_interval = 1.0;
        bool adaptive = false;
        double cfl_target = 0.9;
        bool comoving = true;
        double stats_radius = 0.0;      ///< 0 picks the alignment radius
        double density_variance = 1e-4;  ///< Gaussian estimate of particle densities
        bool snapshots = true;           ///< write every output time, not only the last
        friend bool operator==(const Numerics&, const Numerics&) = default;
    } numerics;

    struct Initial {
        InitialCondition::Kind kind = InitialCondition::Kind::PerturbedUniform;
        double amplitude = 0.01;
        double center = 0.5;
        double variance = 0.01;
        friend bool operator==(const Initial&, const Initial&) = default;
    } initial;

    struct Stability {
        ModeSet::Kind modes = ModeSet::Kind::Discrete;
        int l_max = 0;        ///< 0 derives the cutoff from the kernel radius
        double k_max = 0.0;   ///< continuous scan; 0 derives it
        std::size_t n_points = 20000;
        ClosureOrder order = ClosureOrder::Gamma1;
        bool quartic_denominator = false;
        friend bool operator==(const Stability&, const Stability&) = default;
    } stability;

    struct Verify {
        bool monte_carlo = false;
        std::size_t anchors = 100000;
        friend bool operator==(const Verify&, const Verify&) = default;
    } verify;

    struct Sweep {
        Mode base = Mode::Macro1d;
        std::string parameter = "kernel.radius";
        std::vector<double> values;
        std::size_t replicates = 1;
        std::size_t workers = 0;  ///< 0 uses the hardware concurrency
        bool ibm = false;         ///< also run the matched 1D particle model per cell
        friend bool operator==(const Sweep&, const Sweep&) = default;
    } sweep;

    double gamma() const noexcept { return parameters.eta / parameters.kappa; }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses YAML text. Unknown keys, wrong types and out-of-range values raise
/// ConfigError naming the dotted key and, when known, the line. `source`
/// prefixes messages (a file name). When `mode_override` is set the file may
/// omit `mode`.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "config",
                              const Mode* mode_override = nullptr);
ExperimentConfig load_config(const std::string& path, const Mode* mode_override = nullptr);

/// Cross-field checks that do not depend on a single key.
void validate(const ExperimentConfig& config);

/// Deterministic YAML with every field; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Dotted keys that a sweep may vary (every numeric field).
std::vector<std::string> sweepable_parameters();
/// Sets a numeric field by dotted key; integer fields must receive integral values.
void set_parameter(ExperimentConfig& config, std::string_view key, double value);
double get_parameter(const ExperimentConfig& config, std::string_view key);

MacroParams to_macro_params(const ExperimentConfig& config);
MacroNumerics to_macro_numerics(const ExperimentConfig& config);
InitialCondition to_initial_condition(const ExperimentConfig& config);
IbmParams to_ibm_params(const ExperimentConfig& config, int dimension);
IbmNumerics to_ibm_numerics(const ExperimentConfig& config);
ModeSet to_mode_set(const ExperimentConfig& config);
DispersionOptions to_dispersion_options(const ExperimentConfig& config);
VerificationOptions to_verification_options(const ExperimentConfig& config);

}  // namespace tether::cli
