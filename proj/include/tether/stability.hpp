#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "tether/macro1d/model.hpp"

namespace tether {

struct DispersionPoint {
    double k = 0.0;
    double alpha_re = 0.0;
    double alpha_im = 0.0;
};

struct DispersionOptions {
    ClosureOrder order = ClosureOrder::Gamma1;
    /// The second-order denominator as printed has k^2; linearising the
    /// closure gives k^4. Off by default (printed form); sign unaffected.
    bool quartic_denominator = false;
    /// Domain length for periodised Fourier coefficients.
    double length = 1.0;
};

/// Fourier coefficient used by the analysis: closed form when the kernel
/// fits the periodic cell (2 r < length), periodised DFT otherwise.
double analysis_fourier_coefficient(const KernelSpec& kernel, double k, double length,
                                    bool* used_dft = nullptr);

/// Complex growth rate alpha(k) of a plane-wave perturbation.
DispersionPoint dispersion(double k, const MacroParams& params, const DispersionOptions& opt = {});

struct ModeSet {
    enum class Kind { Continuous, Discrete };
    Kind kind = Kind::Discrete;
    /// Continuous: k in (0, k_max] on n_points uniformly spaced points
    /// (k_max <= 0 selects 10 pi / r_I).
    double k_max = 0.0;
    std::size_t n_points = 20000;
    /// Discrete: k = 2 pi l / length for 1 <= l <= l_max (0 selects ceil(10 / (2 r_I))).
    int l_max = 0;

    static ModeSet continuous(double k_max = 0.0, std::size_t n_points = 20000) {
        return {Kind::Continuous, k_max, n_points, 0};
    }
    static ModeSet discrete(int l_max = 0) { return {Kind::Discrete, 0.0, 0, l_max}; }
};

struct StabilityReport {
    bool stable = true;
    double max_re_alpha = 0.0;
    double k_max = 0.0;          ///< argmax of Re alpha over the mode set
    int l_max = 0;               ///< mode index of k_max (rounded for continuous sets)
    int predicted_peaks = 0;     ///< l_max when unstable, else 0
    double predicted_pattern_size = 0.0;  ///< 1 / l_max, 0 when stable
    double threshold_r_I = 0.0;  ///< closed-form noiseless threshold
    bool periodised_coefficients = false;
    std::vector<DispersionPoint> curve;
};

/// Verdict: stable iff max Re alpha <= 0 over the mode set.
StabilityReport is_linearly_stable(const MacroParams& params, const ModeSet& modes,
                                   const DispersionOptions& opt = {});

/// argmax_l Re alpha(2 pi l) at delta = 0, first order; ties toward smaller
/// l; 0 when every mode is stable. l_max <= 0 selects the default cutoff.
int predicted_peak_count(const MacroParams& params, int l_max = 0);

/// Kernel radius at which the continuous spectrum loses stability. Closed
/// form at delta = 0; bisection on the scanned dispersion relation for
/// delta > 0. Returns +infinity when mu = 0.
double stability_threshold_r_I(const MacroParams& params);

/// Bisection on the verdict of is_linearly_stable over a continuous grid.
double stability_threshold_bisection(const MacroParams& params, double lo, double hi,
                                     double tolerance, const ModeSet& modes);

int default_mode_cutoff(double radius) noexcept;

void write_dispersion_csv(const StabilityReport& report, const std::filesystem::path& path);
std::string report_json(const StabilityReport& report);

}  // namespace tether
