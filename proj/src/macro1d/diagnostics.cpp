#include "tether/macro1d/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "tether/core/error.hpp"
#include "tether/core/fft.hpp"

namespace tether {

namespace {

struct Plateau {
    std::size_t first;
    std::size_t length;
    double value;
};

/// Runs of equal values around the circle. The first run starts right after
/// a value change so no run straddles the wrap.
std::vector<Plateau> plateaus(std::span<const double> v) {
    const std::size_t n = v.size();
    std::size_t start = 0;
    while (start < n && v[start] == v[(start + n - 1) % n]) ++start;
    std::vector<Plateau> runs;
    if (start == n) return runs;  // constant
    std::size_t i = 0;
    while (i < n) {
        const std::size_t first = (start + i) % n;
        std::size_t len = 1;
        while (i + len < n && v[(start + i + len) % n] == v[first]) ++len;
        runs.push_back({first, len, v[first]});
        i += len;
    }
    return runs;
}

}  // namespace

std::vector<std::size_t> peak_positions(std::span<const double> v, const PeakOptions& opt) {
    std::vector<std::size_t> out;
    const std::size_t n = v.size();
    if (n < 3) return out;
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx - mn > opt.flat_tolerance * std::abs(mx))) return out;
    const auto runs = plateaus(v);
    const std::size_t r = runs.size();
    const double range = mx - mn;
    for (std::size_t k = 0; k < r; ++k) {
        const auto& p = runs[k];
        const double left = runs[(k + r - 1) % r].value;
        const double right = runs[(k + 1) % r].value;
        if (!(p.value > left && p.value > right)) continue;
        if (p.value < opt.relative_threshold * mx) continue;
        // Prominence: descend on each side until a higher run appears.
        double lmin = p.value, rmin = p.value;
        bool lhigher = false, rhigher = false;
        for (std::size_t s = 1; s < r; ++s) {
            const double q = runs[(k + r - s) % r].value;
            if (q > p.value) { lhigher = true; break; }
            lmin = std::min(lmin, q);
        }
        for (std::size_t s = 1; s < r; ++s) {
            const double q = runs[(k + s) % r].value;
            if (q > p.value) { rhigher = true; break; }
            rmin = std::min(rmin, q);
        }
        double base = mn;
        if (lhigher && rhigher) base = std::max(lmin, rmin);
        else if (lhigher) base = lmin;
        else if (rhigher) base = rmin;
        if (p.value - base < opt.relative_prominence * range) continue;
        out.push_back((p.first + p.length / 2) % n);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int peak_count(std::span<const double> values, const PeakOptions& options) {
    return static_cast<int>(peak_positions(values, options).size());
}

int peak_count(const DensityField& field, double relative_threshold) {
    PeakOptions opt;
    opt.relative_threshold = relative_threshold;
    return peak_count(field.values(), opt);
}

double correlation_shift(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw Error("correlation_shift: size mismatch");
    const RealFft fft(n);
    auto fa = fft.forward(a);
    auto fb = fft.forward(b);
    // Drop the means; c_s = sum_i a_i b_{i+s}  <=>  C_m = conj(A_m) B_m.
    fa[0] = 0.0;
    fb[0] = 0.0;
    for (std::size_t m = 0; m < fa.size(); ++m) fa[m] = std::conj(fa[m]) * fb[m];
    const auto c = fft.inverse(fa);
    const double cmax = *std::max_element(c.begin(), c.end());
    // Patterns with several similar bumps correlate almost equally well at
    // shifts one bump apart; take the smallest displacement among the
    // near-maximal local maxima.
    const auto signed_shift = [n](std::size_t s) {
        const double d = static_cast<double>(s);
        return d >= 0.5 * static_cast<double>(n) ? d - static_cast<double>(n) : d;
    };
    std::size_t best = 0;
    double best_abs = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n; ++s) {
        const double v = c[s];
        if (v < c[(s + n - 1) % n] || v < c[(s + 1) % n]) continue;
        if (v < 0.8 * cmax) continue;
        const double d = std::abs(signed_shift(s));
        if (d < best_abs) {
            best_abs = d;
            best = s;
        }
    }
    const double cm = c[(best + n - 1) % n], c0 = c[best], cp = c[(best + 1) % n];
    const double denom = cm - 2.0 * c0 + cp;
    double frac = denom < 0.0 ? 0.5 * (cm - cp) / denom : 0.0;
    frac = std::clamp(frac, -0.5, 0.5);
    return signed_shift(best) + frac;
}

double wave_speed(std::span<const DensityField> trajectory, double dt_out) {
    if (trajectory.size() < 2) throw Error("wave_speed needs at least two snapshots");
    if (!(dt_out > 0.0)) throw Error("wave_speed: dt_out must be positive");
    double cells = 0.0;
    for (std::size_t j = 0; j < trajectory.size(); ++j) {
        const auto& f = trajectory[j];
        if (!(f.max() - f.min() > 1e-12 * std::max(1.0, std::abs(f.max()))))
            throw Error("wave_speed: featureless snapshot");
        if (j > 0) {
            require_same_grid(trajectory[j - 1], f);
            cells += correlation_shift(trajectory[j - 1].values(), f.values());
        }
    }
    const double dx = trajectory.front().grid().dx();
    return cells * dx / (dt_out * static_cast<double>(trajectory.size() - 1));
}

}  // namespace tether
