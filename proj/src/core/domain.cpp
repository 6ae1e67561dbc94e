#include "tether/core/domain.hpp"

#include <cmath>

#include "tether/core/error.hpp"

namespace tether {

PeriodicDomain::PeriodicDomain(int dimension, double length)
    : dimension_(dimension), lengths_{length, length} {
    if (dimension != 1 && dimension != 2) throw Error("domain dimension must be 1 or 2");
    if (!(length > 0.0) || !std::isfinite(length)) throw Error("domain length must be positive");
}

PeriodicDomain::PeriodicDomain(double length_x, double length_y)
    : dimension_(2), lengths_{length_x, length_y} {
    if (!(length_x > 0.0) || !(length_y > 0.0) || !std::isfinite(length_x) ||
        !std::isfinite(length_y))
        throw Error("domain lengths must be positive");
}

double PeriodicDomain::volume() const noexcept {
    return dimension_ == 1 ? lengths_[0] : lengths_[0] * lengths_[1];
}

double wrap(double x, double length) {
    if (!std::isfinite(x)) throw Error("wrap: non-finite position");
    double r = std::fmod(x, length);
    if (r < 0.0) r += length;
    // fmod of a tiny negative value plus length can round up to length.
    if (r >= length) r = 0.0;
    return r;
}

Vec2 wrap(Vec2 p, const PeriodicDomain& domain) {
    return {wrap(p.x, domain.length(0)), wrap(p.y, domain.length(1))};
}

double min_image(double a, double b, double length) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw Error("min_image: non-finite position");
    double d = a - b;
    d -= length * std::floor(d / length + 0.5);
    const double half = 0.5 * length;
    if (d >= half) d -= length;
    if (d < -half) d += length;
    return d;
}

Vec2 min_image(Vec2 a, Vec2 b, const PeriodicDomain& domain) {
    return {min_image(a.x, b.x, domain.length(0)), min_image(a.y, b.y, domain.length(1))};
}

}  // namespace tether
