#pragma once

#include <functional>
#include <vector>

namespace tether {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
QuadratureRule gauss_legendre(int n);

/// n-point Gauss-Hermite rule for the standard normal weight
/// exp(-s^2/2)/sqrt(2 pi); weights sum to 1. Exact for degree <= 2n - 1.
QuadratureRule gauss_hermite_probabilist(int n);

/// Integral of f over [lo, hi], split at every breakpoint inside the
/// interval, with a Gauss-Legendre rule of `order` points per piece.
/// Exact for piecewise polynomials of degree <= 2 order - 1.
double integrate_piecewise(const std::function<double(double)>& f, double lo, double hi,
                           std::vector<double> breakpoints, int order = 12);

}  // namespace tether
