#pragma once

#include <array>
#include <span>

#include "tether/asymptotics/hermite.hpp"
#include "tether/asymptotics/velocity.hpp"

namespace tether {

/// Correctors of the obstacle distribution in the variable sigma, indexed
/// as h1[k] (order gamma, delta^{k/2}) and h2[k] (order gamma^2).
struct HSolutions {
    std::array<HermiteExpansion, 3> h1{HermiteExpansion(1), HermiteExpansion(1), HermiteExpansion(1)};
    std::array<HermiteExpansion, 2> h2{HermiteExpansion(1), HermiteExpansion(1)};
};

/// Closed-form solutions from the velocity jet at one point.
HSolutions build_h_solutions(const VelocityJet& jet, int dimension);

/// Right-hand sides of B h = f for each corrector, assembled from the
/// monomial form (first order) or by Hermite algebra (second order).
HSolutions h_solution_rhs(const VelocityJet& jet, int dimension);

struct HResiduals {
    /// max |coefficient| of B(h) - rhs for h1^0, h1^1, h1^2, h2^0, h2^1.
    std::array<double, 5> coefficient{};
    /// max |int h M_1| over the five correctors, by coefficient and by quadrature.
    double mean_coefficient = 0.0;
    double mean_quadrature = 0.0;
    /// True when every corrector obeys the parity and degree rules.
    bool parity_ok = true;

    double max_coefficient() const noexcept;
};

/// Builds the correctors for the field at (y, t), applies B symbolically and
/// compares with the right-hand sides. Throws when the field lacks the
/// second derivatives needed for h1^2.
HResiduals h_solution_residuals(const ExternalVelocityField& field, std::span<const double> y,
                                double t = 0.0);

/// Parity rule: h1^k holds only |i| of parity opposite to k with
/// |i| <= k + 1; h2^k only matching parity with |i| <= k + 2.
bool parity_rule_holds(const HermiteExpansion& h, int order_gamma, int k);

}  // namespace tether
