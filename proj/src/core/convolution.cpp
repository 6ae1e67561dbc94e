#include "tether/core/convolution.hpp"

#include "tether/core/domain.hpp"
#include "tether/core/error.hpp"

namespace tether {

std::vector<double> sample_kernel(const Grid1D& grid, const std::function<double(double)>& f) {
    std::vector<double> k(grid.size());
    for (std::size_t m = 0; m < k.size(); ++m) {
        const double offset = min_image(static_cast<double>(m) * grid.dx(), 0.0, grid.length());
        k[m] = f(offset);
    }
    return k;
}

namespace {

DensityField convolve_direct(const DensityField& field, std::span<const double> kernel) {
    const std::size_t n = field.size();
    const double dx = field.grid().dx();
    DensityField out(field.grid());
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += kernel[(i + n - j) % n] * field[j];
        out[i] = s * dx;
    }
    return out;
}

}  // namespace

DensityField convolve_periodic(const DensityField& field, std::span<const double> kernel,
                               ConvolutionMethod method) {
    if (kernel.size() != field.size())
        throw Error("convolve_periodic: kernel is not sampled on the field's grid");
    if (method == ConvolutionMethod::Direct) return convolve_direct(field, kernel);
    return PeriodicConvolver(field.grid(), kernel).apply(field);
}

PeriodicConvolver::PeriodicConvolver(const Grid1D& grid, std::span<const double> kernel)
    : grid_(grid), fft_(std::make_shared<RealFft>(grid.size())) {
    if (kernel.size() != grid.size())
        throw Error("PeriodicConvolver: kernel is not sampled on the grid");
    spectrum_ = fft_->forward(kernel);
    for (auto& c : spectrum_) c *= grid.dx();
}

PeriodicConvolver::PeriodicConvolver(const Grid1D& grid, std::shared_ptr<const RealFft> fft,
                                     std::vector<std::complex<double>> spectrum)
    : grid_(grid), fft_(std::move(fft)), spectrum_(std::move(spectrum)) {}

PeriodicConvolver PeriodicConvolver::from_multiplier(const Grid1D& grid,
                                                     std::vector<double> multiplier) {
    auto fft = std::make_shared<RealFft>(grid.size());
    if (multiplier.size() != fft->spectrum_size())
        throw Error("PeriodicConvolver: multiplier has the wrong length");
    std::vector<std::complex<double>> spectrum(multiplier.begin(), multiplier.end());
    return PeriodicConvolver(grid, std::move(fft), std::move(spectrum));
}

std::vector<double> PeriodicConvolver::apply(std::span<const double> values) const {
    if (values.size() != grid_.size()) throw Error("PeriodicConvolver: grid mismatch");
    auto hat = fft_->forward(values);
    for (std::size_t m = 0; m < hat.size(); ++m) hat[m] *= spectrum_[m];
    return fft_->inverse(hat);
}

DensityField PeriodicConvolver::apply(const DensityField& field) const {
    if (!(field.grid() == grid_)) throw Error("PeriodicConvolver: grid mismatch");
    return DensityField(grid_, apply(field.values()));
}

}  // namespace tether
