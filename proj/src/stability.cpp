#include "tether/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "tether/core/csv.hpp"
#include "tether/core/error.hpp"

namespace tether {

using std::numbers::pi;

double analysis_fourier_coefficient(const KernelSpec& kernel, double k, double length,
                                    bool* used_dft) {
    const bool wide = kernel.family == KernelFamily::QuadraticCompact && 2.0 * kernel.radius >= length;
    if (used_dft) *used_dft = wide;
    if (wide) return fourier_coefficient_dft(kernel, k, 4096, length);
    return fourier_coefficient(kernel, k);
}

DispersionPoint dispersion(double k, const MacroParams& p, const DispersionOptions& opt) {
    if (k == 0.0) return {0.0, 0.0, 0.0};
    const double phi = analysis_fourier_coefficient(p.kernel, k, opt.length);
    const double k2 = k * k;
    const double smoothing = p.delta > 0.0 ? -std::expm1(-p.delta * k2) / p.delta : k2;
    double denom = 1.0;
    if (opt.order == ClosureOrder::Gamma2) {
        const double kk = opt.quartic_denominator ? k2 * k2 : k2;
        denom += p.gamma * p.gamma * p.rho0 / (p.eta * p.zeta) * kk * phi * phi;
    }
    const double numer = (p.gamma / p.eta) * smoothing * phi * phi - p.mu;
    return {k, p.rho0 / p.zeta * k2 * numer / denom, -k * p.c1 / denom};
}

int default_mode_cutoff(double radius) noexcept {
    return static_cast<int>(std::ceil(10.0 / (2.0 * radius)));
}

namespace {

StabilityReport scan_modes(const MacroParams& params, const ModeSet& modes,
                           const DispersionOptions& opt) {
    params.validate();
    StabilityReport rep;
    const double r = params.kernel.radius;
    std::vector<double> ks;
    if (modes.kind == ModeSet::Kind::Continuous) {
        const double kmax = modes.k_max > 0.0 ? modes.k_max : 10.0 * pi / r;
        if (modes.n_points == 0) throw Error("empty mode set");
        for (std::size_t j = 1; j <= modes.n_points; ++j)
            ks.push_back(kmax * static_cast<double>(j) / static_cast<double>(modes.n_points));
    } else {
        const int lmax = modes.l_max > 0 ? modes.l_max : default_mode_cutoff(r);
        if (lmax < 1) throw Error("empty mode set");
        for (int l = 1; l <= lmax; ++l) ks.push_back(2.0 * pi * l / opt.length);
    }
    analysis_fourier_coefficient(params.kernel, 1.0, opt.length, &rep.periodised_coefficients);
    rep.curve.reserve(ks.size());
    double best = -std::numeric_limits<double>::infinity();
    for (double k : ks) {
        const auto d = dispersion(k, params, opt);
        rep.curve.push_back(d);
        if (d.alpha_re > best) {
            best = d.alpha_re;
            rep.k_max = k;
        }
    }
    rep.max_re_alpha = best;
    rep.stable = best <= 0.0;
    rep.l_max = static_cast<int>(std::lround(rep.k_max * opt.length / (2.0 * pi)));
    rep.predicted_peaks = rep.stable ? 0 : std::max(rep.l_max, 1);
    rep.predicted_pattern_size = rep.stable ? 0.0 : 1.0 / rep.predicted_peaks;
    return rep;
}

}  // namespace

StabilityReport is_linearly_stable(const MacroParams& params, const ModeSet& modes,
                                   const DispersionOptions& opt) {
    auto rep = scan_modes(params, modes, opt);
    MacroParams noiseless = params;
    noiseless.delta = 0.0;
    rep.threshold_r_I = stability_threshold_r_I(noiseless);
    return rep;
}

int predicted_peak_count(const MacroParams& params, int l_max) {
    MacroParams p = params;
    p.delta = 0.0;
    const auto rep = scan_modes(p, ModeSet::discrete(l_max), {});
    return rep.stable ? 0 : rep.l_max;
}

double stability_threshold_bisection(const MacroParams& params, double lo, double hi,
                                     double tolerance, const ModeSet& modes) {
    auto stable_at = [&](double r) {
        MacroParams p = params;
        p.kernel.radius = r;
        // modes should carry an explicit k band so the grid does not move with r.
        return scan_modes(p, modes, {}).stable;
    };
    if (stable_at(lo)) return lo;
    if (!stable_at(hi)) return std::numeric_limits<double>::infinity();
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (stable_at(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double stability_threshold_r_I(const MacroParams& p) {
    if (p.mu <= 0.0) return std::numeric_limits<double>::infinity();
    if (p.gamma <= 0.0) return 0.0;
    const double s = std::sqrt(p.mu * p.eta / p.gamma);
    const double C = std::abs(p.kernel.mass);
    const double closed = p.kernel.family == KernelFamily::QuadraticCompact
                              ? 6.0 * C / (pi * s)
                              : C / (2.0 * s);
    if (p.delta <= 0.0) return closed;
    // Noise only stabilises, so the threshold lies below the noiseless one.
    const double lo = 0.05 * closed;
    return stability_threshold_bisection(p, lo, closed, 1e-6 * closed,
                                         ModeSet::continuous(10.0 * pi / lo, 200000));
}

void write_dispersion_csv(const StabilityReport& report, const std::filesystem::path& path) {
    CsvWriter out(path, {"k", "re_alpha", "im_alpha"});
    for (const auto& d : report.curve) out.cell(d.k).cell(d.alpha_re).cell(d.alpha_im).end_row();
    out.close();
}

std::string report_json(const StabilityReport& r) {
    nlohmann::ordered_json j;
    j["stable"] = r.stable;
    j["max_re_alpha"] = r.max_re_alpha;
    j["k_max"] = r.k_max;
    j["l_max"] = r.l_max;
    j["predicted_peaks"] = r.predicted_peaks;
    j["predicted_pattern_size"] = r.predicted_pattern_size;
    if (std::isfinite(r.threshold_r_I))
        j["r_I_threshold"] = r.threshold_r_I;
    else
        j["r_I_threshold"] = "inf";
    j["periodised_coefficients"] = r.periodised_coefficients;
    return j.dump(2) + "\n";
}

}  // namespace tether
