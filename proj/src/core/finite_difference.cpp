#include "tether/core/finite_difference.hpp"

#include <cmath>
#include <numbers>

#include "tether/core/error.hpp"

namespace tether {

std::vector<double> second_difference_periodic(std::span<const double> f, double dx) {
    const std::size_t n = f.size();
    if (n < 3) throw Error("second_derivative_periodic needs at least 3 cells");
    const double inv = 1.0 / (dx * dx);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = f[(i + n - 1) % n];
        const double right = f[(i + 1) % n];
        out[i] = (right - 2.0 * f[i] + left) * inv;
    }
    return out;
}

DensityField second_derivative_periodic(const DensityField& field) {
    return DensityField(field.grid(), second_difference_periodic(field.values(), field.grid().dx()));
}

double discrete_laplacian_symbol(std::size_t m, std::size_t n, double dx) noexcept {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    const double s = std::sin(0.5 * theta);
    return 4.0 * s * s / (dx * dx);
}

}  // namespace tether
