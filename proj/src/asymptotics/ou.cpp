#include "tether/asymptotics/ou.hpp"

#include <algorithm>
#include <cmath>

#include "tether/asymptotics/moments.hpp"
#include "tether/core/domain.hpp"
#include "tether/core/error.hpp"
#include "tether/core/rng.hpp"

namespace tether {

namespace {

std::size_t count_steps(double span, double dt) {
    return static_cast<std::size_t>(std::llround(span / dt));
}

}  // namespace

OuResult ou_monte_carlo(const DensityField& velocity, double gamma, double delta, std::size_t N,
                        const OuOptions& opt) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error("gamma must be > 0");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error("delta must be >= 0");
    if (N == 0) throw Error("need at least one anchor");
    if (opt.bins < 2) throw Error("need at least two histogram bins");
    if (opt.snapshots == 0) throw Error("need at least one snapshot");
    if (opt.batches == 0 || opt.batches > opt.snapshots)
        throw Error("batches must be between 1 and the number of snapshots");
    if (!velocity.all_finite()) throw Error("velocity field is not finite");
    const double dt = opt.dt > 0.0 ? opt.dt : gamma / 50.0;
    if (dt > gamma / 10.0) throw Error("time step must be at most gamma / 10");
    const double burn = opt.burn_in > 0.0 ? opt.burn_in : 10.0 * gamma;
    const double spacing = opt.snapshot_interval > 0.0 ? opt.snapshot_interval : gamma;
    const std::size_t burn_steps = count_steps(burn, dt);
    const std::size_t every = std::max<std::size_t>(1, count_steps(spacing, dt));
    const std::size_t total = burn_steps + (opt.snapshots - 1) * every;

    const Grid1D& grid = velocity.grid();
    const double L = grid.length();
    const double gdx = grid.dx();
    const std::size_t ng = grid.size();
    const std::span<const double> v = velocity.values();
    auto interp = [&](double x) {
        // Cell centres sit at (i + 1/2) dx.
        const double s = x / gdx - 0.5;
        const double fl = std::floor(s);
        const double w = s - fl;
        const auto n = static_cast<long long>(ng);
        const auto i0 = static_cast<std::size_t>(((static_cast<long long>(fl) % n) + n) % n);
        const std::size_t i1 = i0 + 1 == ng ? 0 : i0 + 1;
        return (1.0 - w) * v[i0] + w * v[i1];
    };

    const std::size_t bins = opt.bins;
    const double bin_width = L / static_cast<double>(bins);
    const double relax = dt / gamma;
    const double noise = std::sqrt(2.0 * delta * dt / gamma);
    std::vector<std::uint64_t> counts(opt.snapshots * bins, 0);
    std::vector<double> disp(N);

#pragma omp parallel
    {
        std::vector<std::uint64_t> local(counts.size(), 0);
#pragma omp for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(N); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            RngStream rng(opt.seed, StreamPurpose::OuNoise, i, 0);
            const double Y = (static_cast<double>(i) + 0.5) * L / static_cast<double>(N);
            // Track the unwrapped offset from the anchor.
            double u = 0.0;
            std::size_t snap = 0;
            for (std::size_t s = 1; s <= total; ++s) {
                const double x = Y + u;
                u += -relax * u + dt * interp(wrap(x, L)) + noise * rng.normal();
                if (s >= burn_steps && (s - burn_steps) % every == 0 && snap < opt.snapshots) {
                    const double xw = wrap(Y + u, L);
                    auto b = static_cast<std::size_t>(xw / bin_width);
                    if (b >= bins) b = bins - 1;
                    ++local[snap * bins + b];
                    ++snap;
                }
            }
            disp[i] = u;
        }
#pragma omp critical
        for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += local[c];
    }

    OuResult out{DensityField(Grid1D(bins, L)), std::vector<double>(bins, 0.0), std::move(disp), dt, total};
    const double norm = 1.0 / (static_cast<double>(N) * bin_width / L);
    const std::size_t per_batch = opt.snapshots / opt.batches;
    const std::size_t used = per_batch * opt.batches;
    for (std::size_t b = 0; b < bins; ++b) {
        double all = 0.0;
        for (std::size_t s = 0; s < opt.snapshots; ++s) all += static_cast<double>(counts[s * bins + b]);
        out.rho_f[b] = all * norm / static_cast<double>(opt.snapshots);
        if (opt.batches < 2) continue;
        std::vector<double> means(opt.batches, 0.0);
        for (std::size_t s = 0; s < used; ++s)
            means[s / per_batch] += static_cast<double>(counts[s * bins + b]) * norm;
        double mean = 0.0;
        for (double& m : means) mean += (m /= static_cast<double>(per_batch));
        mean /= static_cast<double>(opt.batches);
        double var = 0.0;
        for (double m : means) var += (m - mean) * (m - mean);
        var /= static_cast<double>(opt.batches - 1);
        out.standard_error[b] = std::sqrt(var / static_cast<double>(opt.batches));
    }
    return out;
}

OuClosureComparison compare_ou_with_closure(const DensityField& rho_g, const KernelSpec& kernel,
                                            double eta, double gamma, double delta, std::size_t N,
                                            const OuOptions& options) {
    if (!(eta > 0.0)) throw Error("eta must be > 0");
    const std::size_t n = rho_g.size();
    if (options.bins == 0 || n % options.bins != 0)
        throw Error("density grid size must be a multiple of the bin count");
    const SmoothedDensity sm = smooth_density(rho_g, kernel);
    DensityField v(rho_g.grid());
    for (std::size_t i = 0; i < n; ++i) v[i] = -sm.d1[i] / eta;

    OuClosureComparison out{0.0, 0.0, 0.0, 0.0, ou_monte_carlo(v, gamma, delta, N, options), {}};
    const std::size_t per = n / options.bins;
    out.target.assign(options.bins, 0.0);
    double err = 0.0, tgt = 0.0, dev = 0.0, noise = 0.0;
    for (std::size_t b = 0; b < options.bins; ++b) {
        for (std::size_t j = 0; j < per; ++j) out.target[b] += sm.d2[b * per + j];
        out.target[b] *= gamma / eta / static_cast<double>(per);
        const double d = out.run.rho_f[b] - 1.0;
        err += (d - out.target[b]) * (d - out.target[b]);
        tgt += out.target[b] * out.target[b];
        dev += d * d;
        noise += out.run.standard_error[b] * out.run.standard_error[b];
    }
    const auto nb = static_cast<double>(options.bins);
    out.relative_l2 = tgt > 0.0 ? std::sqrt(err / tgt) : std::sqrt(err / nb);
    out.deviation_rms = std::sqrt(dev / nb);
    out.noise_rms = std::sqrt(noise / nb);
    out.target_rms = std::sqrt(tgt / nb);
    return out;
}

}  // namespace tether
