#include "tether/core/grid.hpp"

#include <algorithm>
#include <cmath>

#include "tether/core/csv.hpp"
#include "tether/core/error.hpp"

namespace tether {

Grid1D::Grid1D(std::size_t n_cells, double length) : n_(n_cells), length_(length) {
    if (n_cells < min_cells) throw Error("Grid1D needs at least 8 cells");
    if (!(length > 0.0) || !std::isfinite(length)) throw Error("Grid1D length must be positive");
    dx_ = length / static_cast<double>(n_cells);
}

DensityField::DensityField(Grid1D grid, double fill) : grid_(grid), data_(grid.size(), fill) {}

DensityField::DensityField(Grid1D grid, std::vector<double> values)
    : grid_(grid), data_(std::move(values)) {
    if (data_.size() != grid_.size()) throw Error("DensityField: value count does not match grid");
}

double DensityField::mass() const noexcept {
    double s = 0.0;
    for (double v : data_) s += v;
    return s * grid_.dx();
}

double DensityField::min() const noexcept { return *std::min_element(data_.begin(), data_.end()); }
double DensityField::max() const noexcept { return *std::max_element(data_.begin(), data_.end()); }

bool DensityField::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_grid(const DensityField& a, const DensityField& b) {
    if (!(a.grid() == b.grid())) throw Error("fields live on different grids");
}

void write_csv(const DensityField& field, const std::filesystem::path& path) {
    CsvWriter out(path, {"x", "value"});
    for (std::size_t i = 0; i < field.size(); ++i) {
        out.cell(field.grid().x(i)).cell(field[i]);
        out.end_row();
    }
    out.close();
}

DensityField read_density_csv(const std::filesystem::path& path, double length) {
    const CsvTable table = read_csv(path);
    const std::size_t col = table.column("value");
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) values.push_back(std::stod(row.at(col)));
    const std::size_t n = values.size();
    return DensityField(Grid1D(n, length), std::move(values));
}

}  // namespace tether
