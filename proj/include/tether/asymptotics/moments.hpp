#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tether/asymptotics/velocity.hpp"
#include "tether/core/grid.hpp"
#include "tether/kernels.hpp"
#include "tether/macro1d/model.hpp"

namespace tether {

/// Scalar field on a periodic nx-by-ny cell-centred grid over
/// [0, lx) x [0, ly), stored row-major (index ix * ny + iy).
struct PeriodicField2D {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double lx = 1.0;
    double ly = 1.0;
    std::vector<double> values;

    PeriodicField2D() = default;
    PeriodicField2D(std::size_t nx, std::size_t ny, double lx = 1.0, double ly = 1.0, double fill = 0.0);

    double x(std::size_t ix) const noexcept { return (static_cast<double>(ix) + 0.5) * lx / static_cast<double>(nx); }
    double y(std::size_t iy) const noexcept { return (static_cast<double>(iy) + 0.5) * ly / static_cast<double>(ny); }
    double& at(std::size_t ix, std::size_t iy) { return values[ix * ny + iy]; }
    double at(std::size_t ix, std::size_t iy) const { return values[ix * ny + iy]; }
    double max_abs() const noexcept;
    bool same_grid(const PeriodicField2D& other) const noexcept;

    static PeriodicField2D sample(std::size_t nx, std::size_t ny,
                                  const std::function<double(double, double)>& f,
                                  double lx = 1.0, double ly = 1.0);
};

/// Spectral derivative d^ox_x d^oy_y of a periodic field (odd-order Nyquist
/// modes are dropped).
PeriodicField2D spectral_derivative(const PeriodicField2D& f, int order_x, int order_y);
DensityField spectral_derivative(const DensityField& f, int order);

/// Velocity components and their time derivatives sampled on a grid.
struct SampledVelocity1D {
    DensityField v;
    DensityField dt_v;
};
struct SampledVelocity2D {
    std::array<PeriodicField2D, 2> v;
    std::array<PeriodicField2D, 2> dt_v;
};

SampledVelocity1D sample_velocity(const ExternalVelocityField& field, const Grid1D& grid, double t = 0.0);
SampledVelocity2D sample_velocity(const ExternalVelocityField& field, std::size_t nx, std::size_t ny,
                                  double t = 0.0);

/// First and second moment corrections of the obstacle density:
///   rho_f1 = -div v - (delta/2) Lap div v
///   rho_f2 = (1/2) div[v div v - (v . grad) v] + d_t div v
/// by spectral differentiation.
struct MomentFields1D {
    DensityField rho_f1;
    DensityField rho_f2;
};
struct MomentFields2D {
    PeriodicField2D rho_f1;
    PeriodicField2D rho_f2;
};
MomentFields1D rho_f_moment_formulas(const SampledVelocity1D& v, double delta);
MomentFields2D rho_f_moment_formulas(const SampledVelocity2D& v, double delta);

/// Nonlocal first-order obstacle deviation for a conservative field
/// v = -grad(rho_bar)/eta: -(1/(delta eta)) [rho_bar - M_{2 delta} * rho_bar],
/// with the exact Gaussian multiplier exp(-delta |k|^2).
DensityField nonlocal_first_order(const DensityField& rho_bar, double eta, double delta);

/// rho_bar = phi * rho_g and its first two derivatives, from the closed-form
/// kernel transform (1D kernels).
struct SmoothedDensity {
    DensityField rho_bar;
    DensityField d1;
    DensityField d2;
};
SmoothedDensity smooth_density(const DensityField& rho_g, const KernelSpec& kernel);

/// Obstacle density as the Jacobian determinant of Y(x) = x + (gamma/eta) grad rho_bar.
/// In 1D this is 1 + (gamma/eta) d_xx rho_bar, evaluated by the same discrete
/// operator as the first-order closure.
DensityField jacobian_density(const DensityField& rho_g, const MacroParams& params);
/// 2D: det(I + a H) with a = gamma/eta and H the spectral Hessian of rho_bar.
PeriodicField2D jacobian_density(const PeriodicField2D& rho_bar, double gamma_over_eta);
/// 2D with rho_bar = phi * rho_g for a 2D kernel sampled on the grid.
PeriodicField2D jacobian_density(const PeriodicField2D& rho_g, const KernelSpec& kernel,
                                 double gamma_over_eta);
/// Periodic convolution with a 2D radial kernel sampled at cell offsets.
PeriodicField2D convolve_2d(const PeriodicField2D& f, const KernelSpec& kernel);
/// N(rho_bar) = (1/2) [(Lap rho_bar)^2 - H : H].
PeriodicField2D hessian_nonlinearity(const PeriodicField2D& rho_bar);

struct Lemma2Options {
    /// x grid points per unit length; x spans [-1, 2] and y spans [0, 1).
    std::size_t nx_per_unit = 1024;
    std::size_t ny = 32;
    /// Order of the central difference for d_x f_1 (2, 4, 6 or 8).
    int fd_order = 8;
    int hermite_order = 60;
};

struct Lemma2Result {
    /// max |(x - y) f1 + delta d_x f1 - M_delta(x - y) v(x)|
    double identity_residual = 0.0;
    /// max over y of |int f1 dx|
    double normalization = 0.0;
};

/// f1(x, y) = M_delta(x - y) (1/delta) [V(x) - (M_delta * V)(y)] for a 1D
/// potential V with derivative dV, checked against the identity it solves.
Lemma2Result lemma2_identity_check(const std::function<double(double)>& V,
                                   const std::function<double(double)>& dV, double delta,
                                   const Lemma2Options& options = {});

}  // namespace tether
