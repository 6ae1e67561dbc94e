#include "tether/ibm/statistics.hpp"

#include <cmath>
#include <numbers>

#include "tether/core/csv.hpp"
#include "tether/core/error.hpp"
#include "tether/ibm/neighbors.hpp"

namespace tether {

std::vector<double> neighborhood_density(const IbmState& state, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw Error("neighborhood radius must be > 0");
    const std::size_t M = state.n_spp();
    if (M == 0) return {};
    const auto& dom = state.domain;
    const double area = dom.dimension() == 2 ? std::numbers::pi * radius * radius : 2.0 * radius;
    const double mean_density = static_cast<double>(M) / dom.volume();
    const double r2 = radius * radius;
    const CellList cells(state.Z, dom, radius);
    std::vector<double> out(M);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(M); ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        std::size_t count = 0;
        cells.for_each_candidate(state.Z[k], [&](std::size_t j) {
            if (norm2(min_image(state.Z[k], state.Z[j], dom)) <= r2) ++count;
        });
        out[k] = static_cast<double>(count) / area / mean_density;
    }
    return out;
}

double direction_variance(const IbmState& state) {
    if (state.alpha.empty()) throw Error("direction_variance needs at least one SPP");
    Vec2 sum{};
    for (const Vec2& a : state.alpha) sum += a;
    const double v = 1.0 - norm(sum) / static_cast<double>(state.alpha.size());
    return std::max(0.0, v);
}

DensityField estimate_density_1d(std::span<const double> positions, double bandwidth_variance,
                                 const Grid1D& grid) {
    if (!(bandwidth_variance > 0.0) || !std::isfinite(bandwidth_variance))
        throw Error("bandwidth variance must be > 0");
    if (positions.empty()) throw Error("density estimate needs at least one particle");
    const double sigma = std::sqrt(bandwidth_variance);
    const double dx = grid.dx();
    const auto n = static_cast<long long>(grid.size());
    const double reach = 8.0 * sigma;
    const double weight = 1.0 / static_cast<double>(positions.size());
    DensityField out(grid, 0.0);
    const double inv = 1.0 / (sigma * std::numbers::sqrt2);
    for (double p : positions) {
        if (!std::isfinite(p)) throw Error("non-finite particle position");
        const double x = wrap(p, grid.length());
        // Walking the unwrapped cell range sums all periodic images.
        const auto lo = static_cast<long long>(std::floor((x - reach) / dx));
        const auto hi = static_cast<long long>(std::floor((x + reach) / dx));
        double prev = std::erf((static_cast<double>(lo) * dx - x) * inv);
        for (long long j = lo; j <= hi; ++j) {
            const double next = std::erf((static_cast<double>(j + 1) * dx - x) * inv);
            const auto c = static_cast<std::size_t>(((j % n) + n) % n);
            out[c] += 0.5 * (next - prev) * weight / dx;
            prev = next;
        }
    }
    const double m = out.mass();
    for (double& v : out.data()) v /= m;
    return out;
}

std::vector<double> spp_x(const IbmState& state) {
    std::vector<double> x(state.Z.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = state.Z[k].x;
    return x;
}

std::vector<double> obstacle_x(const IbmState& state) {
    std::vector<double> x(state.X.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = state.X[i].x;
    return x;
}

IbmStatistics compute_statistics(const IbmState& state, double radius) {
    IbmStatistics s;
    s.t = state.t;
    s.direction_variance = direction_variance(state);
    const auto nd = neighborhood_density(state, radius);
    double mean = 0.0;
    for (double v : nd) mean += v;
    mean /= static_cast<double>(nd.size());
    double var = 0.0;
    for (double v : nd) var += (v - mean) * (v - mean);
    s.mean_neighborhood_density = mean;
    s.std_neighborhood_density = nd.size() > 1 ? std::sqrt(var / static_cast<double>(nd.size() - 1)) : 0.0;
    return s;
}

void write_spp_csv(const IbmState& state, const std::filesystem::path& path) {
    CsvWriter out(path, {"id", "x", "y", "angle"});
    for (std::size_t k = 0; k < state.Z.size(); ++k) {
        const Vec2 a = state.alpha[k];
        out.cell(k).cell(state.Z[k].x).cell(state.Z[k].y).cell(std::atan2(a.y, a.x)).end_row();
    }
    out.close();
}

void write_obstacle_csv(const IbmState& state, const std::filesystem::path& path) {
    CsvWriter out(path, {"id", "x", "y", "anchor_x", "anchor_y"});
    for (std::size_t i = 0; i < state.X.size(); ++i)
        out.cell(i).cell(state.X[i].x).cell(state.X[i].y).cell(state.Y[i].x).cell(state.Y[i].y).end_row();
    out.close();
}

void write_statistics_csv(std::span<const IbmStatistics> rows, const std::filesystem::path& path) {
    CsvWriter out(path, {"t", "direction_variance", "mean_neighborhood_density",
                         "std_neighborhood_density"});
    for (const auto& r : rows)
        out.cell(r.t).cell(r.direction_variance).cell(r.mean_neighborhood_density)
            .cell(r.std_neighborhood_density).end_row();
    out.close();
}

}  // namespace tether
