#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tether/core/domain.hpp"
#include "tether/core/vec2.hpp"

namespace tether {

/// Uniform cell list on a periodic box. Cells are at least cutoff / 2 wide so
/// all partners within the cutoff lie in the 5x5 (or 5 in 1D) block around a
/// particle's cell. With fewer than five cells along an axis the list
/// degenerates to a single cell and queries visit every particle.
class CellList {
public:
    CellList(std::span<const Vec2> positions, const PeriodicDomain& domain, double cutoff);

    bool all_pairs() const noexcept { return all_pairs_; }

    /// Calls fn(j) for every candidate j near p, in a fixed order.
    template <class Fn>
    void for_each_candidate(Vec2 p, Fn&& fn) const {
        if (all_pairs_) {
            for (std::size_t j : order_) fn(j);
            return;
        }
        const int cx = cell_of(p.x, 0);
        const int cy = dimension_ == 2 ? cell_of(p.y, 1) : 0;
        const int dy_lo = dimension_ == 2 ? -reach : 0;
        const int dy_hi = dimension_ == 2 ? reach : 0;
        for (int dy = dy_lo; dy <= dy_hi; ++dy) {
            const int yy = (cy + dy + ny_) % ny_;
            for (int dx = -reach; dx <= reach; ++dx) {
                const int xx = (cx + dx + nx_) % nx_;
                const std::size_t c = static_cast<std::size_t>(yy) * nx_ + xx;
                for (std::size_t a = start_[c]; a < start_[c + 1]; ++a) fn(order_[a]);
            }
        }
    }

private:
    static constexpr int reach = 2;

    int cell_of(double coord, int axis) const noexcept;

    int dimension_;
    int nx_ = 1;
    int ny_ = 1;
    double wx_ = 1.0;
    double wy_ = 1.0;
    bool all_pairs_ = false;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> order_;
};

}  // namespace tether
