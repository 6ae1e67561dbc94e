#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tether {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Value and derivatives of a velocity field at one point. Entries beyond
/// the field dimension are zero.
struct VelocityJet {
    std::array<double, 3> v{};
    /// dv[k][j] = d_k v_j
    Mat3 dv{};
    /// d2v[k][i][j] = d_i d_j v_k
    std::array<Mat3, 3> d2v{};
    /// dt_v[k] = d_t v_k
    std::array<double, 3> dt_v{};
    bool has_second = true;
    bool has_time = true;
};

/// Smooth periodic velocity field on the unit cell with analytic
/// derivatives; optionally the gradient of a potential V.
class ExternalVelocityField {
public:
    using JetFn = std::function<VelocityJet(std::span<const double> y, double t)>;
    using PotentialFn = std::function<double(std::span<const double> y, double t)>;

    ExternalVelocityField(int dimension, JetFn jet, PotentialFn potential = {});

    int dimension() const noexcept { return dim_; }
    VelocityJet jet(std::span<const double> y, double t = 0.0) const;
    bool conservative() const noexcept { return static_cast<bool>(potential_); }
    /// Throws for a non-conservative field.
    double potential(std::span<const double> y, double t = 0.0) const;

    /// v = c.
    static ExternalVelocityField constant(std::vector<double> c);
    /// v(y) = A y with A given row-major (A[j][k] multiplies y_k in v_j).
    /// Not periodic; meant for pointwise checks.
    static ExternalVelocityField linear(const std::vector<std::vector<double>>& A);
    /// v = (amplitude sin(2 pi y_2), 0); divergence free.
    static ExternalVelocityField shear_2d(double amplitude);
    /// Sum of `modes` travelling cosines with integer wave vectors and
    /// normal amplitudes. With `conservative` the field is grad V for
    /// V = sum b_m sin(2 pi q_m . y + omega_m t + p_m).
    static ExternalVelocityField random_trigonometric(int dimension, int modes, std::uint64_t seed,
                                                      bool conservative = false);
    /// Same field with the second derivatives reported as unavailable.
    ExternalVelocityField without_second_derivatives() const;

private:
    int dim_;
    JetFn jet_;
    PotentialFn potential_;
};

/// Largest |curl v| estimated as circulation / area around a square loop of
/// side `side` centred at each point, with Gauss-Legendre line integrals.
/// Zero for 1D fields.
double curl_residual(const ExternalVelocityField& field,
                     std::span<const std::array<double, 3>> points, double t = 0.0,
                     double side = 0.1);

}  // namespace tether
