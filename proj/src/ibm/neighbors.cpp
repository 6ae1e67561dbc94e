#include "tether/ibm/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tether/core/error.hpp"

namespace tether {

namespace {

int cells_along(double length, double cutoff, int reach) {
    if (!std::isfinite(cutoff)) return 1;
    if (cutoff <= 0.0) throw Error("cell list cutoff must be positive");
    const double n = std::floor(reach * length / cutoff);
    return n >= 2.0 * reach + 1.0 ? static_cast<int>(std::min(n, 4096.0)) : 1;
}

}  // namespace

CellList::CellList(std::span<const Vec2> positions, const PeriodicDomain& domain, double cutoff)
    : dimension_(domain.dimension()) {
    nx_ = cells_along(domain.length(0), cutoff, reach);
    ny_ = dimension_ == 2 ? cells_along(domain.length(1), cutoff, reach) : 1;
    all_pairs_ = nx_ < 2 * reach + 1 || (dimension_ == 2 && ny_ < 2 * reach + 1);
    if (all_pairs_) {
        nx_ = ny_ = 1;
        order_.resize(positions.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        start_ = {0, positions.size()};
        return;
    }
    wx_ = domain.length(0) / nx_;
    wy_ = dimension_ == 2 ? domain.length(1) / ny_ : 1.0;

    // Counting sort keeps particles within a cell in increasing index order.
    const std::size_t n_cells = static_cast<std::size_t>(nx_) * ny_;
    std::vector<std::size_t> cell(positions.size());
    start_.assign(n_cells + 1, 0);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const int cx = cell_of(positions[i].x, 0);
        const int cy = dimension_ == 2 ? cell_of(positions[i].y, 1) : 0;
        cell[i] = static_cast<std::size_t>(cy) * nx_ + cx;
        ++start_[cell[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    order_.resize(positions.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < positions.size(); ++i) order_[fill[cell[i]]++] = i;
}

int CellList::cell_of(double coord, int axis) const noexcept {
    const int n = axis == 0 ? nx_ : ny_;
    const double w = axis == 0 ? wx_ : wy_;
    const int c = static_cast<int>(coord / w);
    return std::clamp(c, 0, n - 1);
}

}  // namespace tether
