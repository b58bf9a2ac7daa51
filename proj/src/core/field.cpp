#include "core/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace chinpaint {

Grid Grid::make(int nx, int ny, double lx, double ly) {
  if (nx < 4 || ny < 4)
    throw Error(ErrorCode::InvalidArgument,
                "grid needs at least 4 cells per axis, got " + std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw Error(ErrorCode::InvalidArgument, "grid lengths must be positive");
  return Grid{nx, ny, lx, ly};
}

Field::Field(const Grid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw Error(ErrorCode::DimensionMismatch, "field has " + std::to_string(values_.size()) +
                                                  " samples, grid needs " + std::to_string(grid_.size()));
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(grid_, o.grid_, "Field::operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(grid_, o.grid_, "Field::operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

Field& Field::axpy(double a, const Field& o) {
  require_same_grid(grid_, o.grid_, "Field::axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * o.values_[k];
  return *this;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, std::string(where) + ": fields live on different grids");
}

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  Field out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

}  // namespace chinpaint
