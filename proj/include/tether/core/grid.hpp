#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace tether {

/// Uniform periodic cell-centred grid on [0, length).
class Grid1D {
public:
    static constexpr std::size_t min_cells = 8;

    Grid1D(std::size_t n_cells, double length = 1.0);

    std::size_t size() const noexcept { return n_; }
    double length() const noexcept { return length_; }
    double dx() const noexcept { return dx_; }
    /// Cell centre (i + 1/2) dx.
    double x(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dx_; }

    friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
        return a.n_ == b.n_ && a.length_ == b.length_;
    }

private:
    std::size_t n_;
    double length_;
    double dx_;
};

/// Scalar field (mass per length) sampled at the cell centres of a Grid1D.
class DensityField {
public:
    explicit DensityField(Grid1D grid, double fill = 0.0);
    DensityField(Grid1D grid, std::vector<double> values);

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    /// Sum of value * dx.
    double mass() const noexcept;
    double min() const noexcept;
    double max() const noexcept;
    bool all_finite() const noexcept;

private:
    Grid1D grid_;
    std::vector<double> data_;
};

void require_same_grid(const DensityField& a, const DensityField& b);

/// CSV with header `x,value`, one row per cell.
void write_csv(const DensityField& field, const std::filesystem::path& path);
DensityField read_density_csv(const std::filesystem::path& path, double length = 1.0);

}  // namespace tether
