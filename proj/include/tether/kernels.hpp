#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tether/core/grid.hpp"
#include "tether/core/vec2.hpp"

namespace tether {

enum class KernelFamily {
    /// phi(x) = C (3 / (2 r)) (1 - |x|/r)^2 on |x| < r (1D);
    /// 3A / (2 pi r^3) (r - |x|)^2 on the disc (2D). Force decreases linearly.
    QuadraticCompact,
    /// phi(x) = C / (2 r) exp(-|x|/r) (1D); C / (2 pi r^2) exp(-|x|/r) (2D).
    ExponentialForce,
};

std::string_view to_string(KernelFamily family) noexcept;
KernelFamily kernel_family_from_string(std::string_view name);

/// Interaction potential. `mass` is signed: positive is repulsive.
struct KernelSpec {
    KernelFamily family = KernelFamily::QuadraticCompact;
    double mass = 1.0;
    double radius = 0.1;
    int dimension = 1;

    void validate() const;
    /// Largest distance at which the potential is non-zero (infinity for the
    /// exponential family).
    double support() const noexcept;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// phi(x) for a 1D kernel, or phi at distance |x| for a 2D kernel.
double potential(const KernelSpec& kernel, double x);
double potential(const KernelSpec& kernel, Vec2 x);

/// phi'(x) for a 1D kernel.
double force(const KernelSpec& kernel, double x);
/// grad phi(x) for a 2D kernel.
Vec2 force(const KernelSpec& kernel, Vec2 x);

/// Fourier transform of a 1D kernel, int exp(-ikx) phi(x) dx, in closed form.
double fourier_coefficient(const KernelSpec& kernel, double k);

/// Fourier coefficient at k = 2 pi l / length of the kernel sampled (and
/// periodised) on n cells. Used for wide kernels and as a cross-check.
double fourier_coefficient_dft(const KernelSpec& kernel, double k, std::size_t n_cells = 4096,
                               double length = 1.0);

/// Upper bound on the mass lost when the exponential family is truncated at
/// half a periodic domain of the given length (zero for compact kernels).
double truncation_error_bound(const KernelSpec& kernel, double length) noexcept;

/// Obstacle-induced macroscopic potential W = phi' * phi' and its derivative
/// W' = phi'' * phi' (1D kernels).
double macro_kernel(const KernelSpec& kernel, double x);
double macro_kernel_force(const KernelSpec& kernel, double x);

/// W and W' sampled on a grid (layout of sample_kernel).
struct MacroKernel {
    KernelSpec source;
    Grid1D grid;
    std::vector<double> w;
    std::vector<double> dw;
};

MacroKernel make_macro_kernel(const KernelSpec& kernel, const Grid1D& grid);

/// Writes `x,phi,dphi,W,dW` on the grid's cell-centre offsets in [-L/2, L/2).
void dump_kernel_csv(const KernelSpec& kernel, const Grid1D& grid,
                     const std::filesystem::path& path);

}  // namespace tether
