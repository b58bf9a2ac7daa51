#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "core/field.hpp"

namespace chinpaint {

// Amplitudes in the tensor cosine basis:
//   f(x, y) = sum_{k,l} coeffs[l * nx + k] * cos(k pi x / lx) * cos(l pi y / ly).
// With this normalisation coeffs[0] is the mean of f.
struct SpectralField {
  Grid grid{};
  std::vector<double> coeffs;

  double& operator()(int k, int l) { return coeffs[grid.index(k, l)]; }
  double operator()(int k, int l) const { return coeffs[grid.index(k, l)]; }
};

SpectralField to_spectral(const Field& f);
Field from_spectral(const SpectralField& s);

// Eigenvalue of -Laplace (Neumann) for mode (k, l): (k pi / lx)^2 + (l pi / ly)^2.
double neumann_eigenvalue(const Grid& grid, int k, int l);
std::vector<double> neumann_eigenvalues(const Grid& grid);

// Multiplies the cosine amplitudes of f by `symbol` (same layout as coeffs).
Field apply_symbol(const Field& f, std::span<const double> symbol);

// The inverse transform leaves a rounding-level mean; it is subtracted so
// that the output sums to zero up to summation error.
Field laplacian(const Field& f);

void remove_mean(Field& f);

// Zero-mean w with -laplacian(w) = g. Throws NonZeroMean when
// |mean(g)| > 1e-10 * rms(g).
Field inv_neumann_laplacian(const Field& g);

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double mean(const Field& f);
double l2_inner(const Field& f, const Field& g);
double l2_norm(const Field& f);

// Squared L2 norm computed from the cosine amplitudes (Parseval).
double spectral_norm_sq(const SpectralField& s);

// sqrt(<f0, N^{-1} f0> + mean(f)^2 |Omega|) with f0 = f - mean(f).
double hminus1_norm(const Field& f);

// (epsilon-free) Dirichlet energy integral |grad f|^2 via Parseval.
double gradient_norm_sq(const Field& f);

// Throws NonBinaryMask unless every sample is exactly 0 or 1.
void require_binary_mask(const Field& mask);
Field masked(const Field& f, const Field& mask);

}  // namespace chinpaint
