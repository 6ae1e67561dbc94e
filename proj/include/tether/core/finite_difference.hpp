#pragma once

#include <span>
#include <vector>

#include "tether/core/grid.hpp"

namespace tether {

/// Central second difference (f[i+1] - 2 f[i] + f[i-1]) / dx^2 with periodic wrap.
std::vector<double> second_difference_periodic(std::span<const double> f, double dx);
DensityField second_derivative_periodic(const DensityField& field);

/// Symbol of the negated discrete Laplacian at spectral index m:
/// (2 - 2 cos(2 pi m / n)) / dx^2.
double discrete_laplacian_symbol(std::size_t m, std::size_t n, double dx) noexcept;

}  // namespace tether
