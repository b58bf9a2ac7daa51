#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chinpaint {

// Uniform cell-centred grid on the rectangle [0, lx] x [0, ly]. Cell (i, j)
// has its centre at ((i + 1/2) hx, (j + 1/2) hy), which is the sampling of
// the DCT-II, so homogeneous Neumann data are represented exactly.
struct Grid {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;

  // Throws InvalidArgument unless nx, ny >= 4 and lx, ly > 0.
  static Grid make(int nx, int ny, double lx, double ly);

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }
  double area() const { return lx * ly; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  double x(int i) const { return (i + 0.5) * hx(); }
  double y(int j) const { return (j + 0.5) * hy(); }

  friend bool operator==(const Grid&, const Grid&) = default;
};

// Scalar samples on a Grid, row-major with x fastest.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& grid, double value = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  template <class Fn>
  static Field from_function(const Grid& grid, Fn&& fn) {
    Field f(grid);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) f(i, j) = fn(grid.x(i), grid.y(j));
    return f;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double a);
  // this += a * o
  Field& axpy(double a, const Field& o);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double a, Field f) { return f *= a; }
  friend Field operator*(Field f, double a) { return f *= a; }

 private:
  Grid grid_{};
  std::vector<double> values_;
};

// Throws GridMismatch when the grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

// Pointwise product.
Field hadamard(const Field& a, const Field& b);

}  // namespace chinpaint
