#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tether {

/// Real-to-complex FFT of a fixed length backed by FFTW. Plans are created
/// under a global lock; execution is reentrant, so one instance may be
/// shared read-only between threads.
class RealFft {
public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    RealFft(RealFft&&) noexcept;
    RealFft& operator=(RealFft&&) noexcept;

    std::size_t size() const noexcept { return n_; }
    std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

    /// Unnormalised forward transform: X_m = sum_j x_j exp(-2 pi i j m / n).
    std::vector<std::complex<double>> forward(std::span<const double> x) const;
    /// Inverse transform including the 1/n factor.
    std::vector<double> inverse(std::span<const std::complex<double>> spectrum) const;

    /// Angular wavenumber of spectral index m on a domain of the given length.
    double wavenumber(std::size_t m, double length) const noexcept;

private:
    struct Plans;
    std::size_t n_;
    std::unique_ptr<Plans> plans_;
};

/// Complex 2D FFT on an nx-by-ny row-major array (index ix * ny + iy).
class Fft2D {
public:
    Fft2D(std::size_t nx, std::size_t ny);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }

    std::vector<std::complex<double>> forward(std::span<const double> x) const;
    /// Real part of the normalised inverse transform.
    std::vector<double> inverse_real(std::span<const std::complex<double>> spectrum) const;

    /// Signed integer frequency of index m for a transform of length n.
    static long signed_frequency(std::size_t m, std::size_t n) noexcept;

private:
    struct Plans;
    std::size_t nx_;
    std::size_t ny_;
    std::unique_ptr<Plans> plans_;
};

}  // namespace tether
