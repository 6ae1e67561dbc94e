#include "tether/core/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "tether/core/error.hpp"

namespace tether {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

}  // namespace

struct RealFft::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

RealFft::RealFft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
    if (n == 0) throw Error("RealFft: empty transform");
    std::unique_ptr<double, FftwDeleter> real(fftw_alloc_real(n));
    std::unique_ptr<fftw_complex, FftwDeleter> cplx(fftw_alloc_complex(n / 2 + 1));
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    plans_->forward = fftw_plan_dft_r2c_1d(len, real.get(), cplx.get(), FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_1d(len, cplx.get(), real.get(), FFTW_ESTIMATE);
    if (!plans_->forward || !plans_->backward) throw Error("RealFft: planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

std::vector<std::complex<double>> RealFft::forward(std::span<const double> x) const {
    if (x.size() != n_) throw Error("RealFft::forward: size mismatch");
    std::unique_ptr<double, FftwDeleter> in(fftw_alloc_real(n_));
    std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(spectrum_size()));
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute_dft_r2c(plans_->forward, in.get(), out.get());
    std::vector<std::complex<double>> result(spectrum_size());
    for (std::size_t m = 0; m < result.size(); ++m) result[m] = {out.get()[m][0], out.get()[m][1]};
    return result;
}

std::vector<double> RealFft::inverse(std::span<const std::complex<double>> spectrum) const {
    if (spectrum.size() != spectrum_size()) throw Error("RealFft::inverse: size mismatch");
    std::unique_ptr<fftw_complex, FftwDeleter> in(fftw_alloc_complex(spectrum_size()));
    std::unique_ptr<double, FftwDeleter> out(fftw_alloc_real(n_));
    for (std::size_t m = 0; m < spectrum.size(); ++m) {
        in.get()[m][0] = spectrum[m].real();
        in.get()[m][1] = spectrum[m].imag();
    }
    fftw_execute_dft_c2r(plans_->backward, in.get(), out.get());
    std::vector<double> result(out.get(), out.get() + n_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (double& v : result) v *= scale;
    return result;
}

double RealFft::wavenumber(std::size_t m, double length) const noexcept {
    return 2.0 * std::numbers::pi * static_cast<double>(m) / length;
}

struct Fft2D::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

Fft2D::Fft2D(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny), plans_(std::make_unique<Plans>()) {
    if (nx == 0 || ny == 0) throw Error("Fft2D: empty transform");
    std::unique_ptr<fftw_complex, FftwDeleter> a(fftw_alloc_complex(nx * ny));
    std::unique_ptr<fftw_complex, FftwDeleter> b(fftw_alloc_complex(nx * ny));
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), a.get(), b.get(),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), a.get(),
                                        b.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plans_->forward || !plans_->backward) throw Error("Fft2D: planning failed");
}

Fft2D::~Fft2D() = default;

std::vector<std::complex<double>> Fft2D::forward(std::span<const double> x) const {
    const std::size_t n = nx_ * ny_;
    if (x.size() != n) throw Error("Fft2D::forward: size mismatch");
    std::unique_ptr<fftw_complex, FftwDeleter> in(fftw_alloc_complex(n));
    std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(n));
    for (std::size_t i = 0; i < n; ++i) {
        in.get()[i][0] = x[i];
        in.get()[i][1] = 0.0;
    }
    fftw_execute_dft(plans_->forward, in.get(), out.get());
    std::vector<std::complex<double>> result(n);
    for (std::size_t i = 0; i < n; ++i) result[i] = {out.get()[i][0], out.get()[i][1]};
    return result;
}

std::vector<double> Fft2D::inverse_real(std::span<const std::complex<double>> spectrum) const {
    const std::size_t n = nx_ * ny_;
    if (spectrum.size() != n) throw Error("Fft2D::inverse_real: size mismatch");
    std::unique_ptr<fftw_complex, FftwDeleter> in(fftw_alloc_complex(n));
    std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(n));
    for (std::size_t i = 0; i < n; ++i) {
        in.get()[i][0] = spectrum[i].real();
        in.get()[i][1] = spectrum[i].imag();
    }
    fftw_execute_dft(plans_->backward, in.get(), out.get());
    std::vector<double> result(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) result[i] = out.get()[i][0] * scale;
    return result;
}

long Fft2D::signed_frequency(std::size_t m, std::size_t n) noexcept {
    const long mm = static_cast<long>(m);
    const long nn = static_cast<long>(n);
    return mm <= nn / 2 ? mm : mm - nn;
}

}  // namespace tether
