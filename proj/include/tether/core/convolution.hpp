#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "tether/core/fft.hpp"
#include "tether/core/grid.hpp"

namespace tether {

enum class ConvolutionMethod { Spectral, Direct };

/// Samples f at the periodic offsets m * dx (m = 0..n-1) taken in their
/// minimum-image form, i.e. the layout expected by convolve_periodic.
std::vector<double> sample_kernel(const Grid1D& grid, const std::function<double(double)>& f);

/// (k * f)_i = sum_j k[(i - j) mod n] f_j dx.
DensityField convolve_periodic(const DensityField& field, std::span<const double> kernel,
                               ConvolutionMethod method = ConvolutionMethod::Spectral);

/// Periodic convolution with a fixed kernel; the kernel spectrum is cached.
class PeriodicConvolver {
public:
    PeriodicConvolver(const Grid1D& grid, std::span<const double> kernel);

    /// Convolver defined directly by its (real) Fourier multiplier per
    /// spectral index m = 0..n/2.
    static PeriodicConvolver from_multiplier(const Grid1D& grid, std::vector<double> multiplier);

    const Grid1D& grid() const noexcept { return grid_; }

    DensityField apply(const DensityField& field) const;
    std::vector<double> apply(std::span<const double> values) const;

    /// Multiplier at spectral index m (dx * DFT of the kernel).
    std::complex<double> spectrum(std::size_t m) const { return spectrum_.at(m); }

private:
    PeriodicConvolver(const Grid1D& grid, std::shared_ptr<const RealFft> fft,
                      std::vector<std::complex<double>> spectrum);

    Grid1D grid_;
    std::shared_ptr<const RealFft> fft_;
    std::vector<std::complex<double>> spectrum_;
};

}  // namespace tether
