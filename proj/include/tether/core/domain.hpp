#pragma once

#include <array>

#include "tether/core/vec2.hpp"

namespace tether {

/// Periodic box [0, L_x) x [0, L_y) in one or two dimensions.
class PeriodicDomain {
public:
    explicit PeriodicDomain(int dimension = 1, double length = 1.0);
    PeriodicDomain(double length_x, double length_y);

    int dimension() const noexcept { return dimension_; }
    double length(int axis = 0) const { return lengths_.at(axis); }
    /// Length in 1D, area in 2D.
    double volume() const noexcept;

    friend bool operator==(const PeriodicDomain&, const PeriodicDomain&) = default;

private:
    int dimension_;
    std::array<double, 2> lengths_;
};

/// Maps x into [0, length).
double wrap(double x, double length);
Vec2 wrap(Vec2 p, const PeriodicDomain& domain);

/// a - b shifted by multiples of length into [-length/2, length/2).
double min_image(double a, double b, double length);
Vec2 min_image(Vec2 a, Vec2 b, const PeriodicDomain& domain);

/// min_image for coordinates already wrapped into [0, length); no checks.
inline double min_image_wrapped(double a, double b, double length) noexcept {
    double d = a - b;
    const double half = 0.5 * length;
    if (d >= half) d -= length;
    else if (d < -half) d += length;
    return d;
}

inline Vec2 min_image_wrapped(Vec2 a, Vec2 b, Vec2 lengths) noexcept {
    return {min_image_wrapped(a.x, b.x, lengths.x), min_image_wrapped(a.y, b.y, lengths.y)};
}

}  // namespace tether
