#include "core/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "core/error.hpp"

namespace chinpaint {
namespace {

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is. Plans are created once per grid shape and kept for the process.
struct DctPlans {
  fftw_plan forward = nullptr;  // DCT-II (REDFT10) in both axes
  fftw_plan inverse = nullptr;  // DCT-III (REDFT01) in both axes
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plans] : plans_) {
      fftw_destroy_plan(plans.forward);
      fftw_destroy_plan(plans.inverse);
    }
  }

  DctPlans get(int nx, int ny) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find({nx, ny});
    if (it != plans_.end()) return it->second;
    std::vector<double> in(static_cast<std::size_t>(nx) * ny), out(in.size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    DctPlans p;
    p.forward = fftw_plan_r2r_2d(ny, nx, in.data(), out.data(), FFTW_REDFT10, FFTW_REDFT10, flags);
    p.inverse = fftw_plan_r2r_2d(ny, nx, in.data(), out.data(), FFTW_REDFT01, FFTW_REDFT01, flags);
    plans_.emplace(std::make_pair(nx, ny), p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, DctPlans> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

SpectralField to_spectral(const Field& f) {
  const Grid& g = f.grid();
  SpectralField s{g, std::vector<double>(g.size())};
  DctPlans plans = plan_cache().get(g.nx, g.ny);
  fftw_execute_r2r(plans.forward, const_cast<double*>(f.data()), s.coeffs.data());
  // REDFT10 returns 2 sum x_j cos(...) per axis; rescale to cosine amplitudes.
  const double base = 1.0 / (static_cast<double>(g.nx) * g.ny);
  for (int l = 0; l < g.ny; ++l) {
    const double sy = (l == 0) ? 0.5 : 1.0;
    for (int k = 0; k < g.nx; ++k) {
      const double sx = (k == 0) ? 0.5 : 1.0;
      s(k, l) *= base * sx * sy;
    }
  }
  return s;
}

Field from_spectral(const SpectralField& s) {
  const Grid& g = s.grid;
  std::vector<double> scaled(s.coeffs);
  for (int l = 0; l < g.ny; ++l) {
    const double ty = (l == 0) ? 1.0 : 0.5;
    for (int k = 0; k < g.nx; ++k) {
      const double tx = (k == 0) ? 1.0 : 0.5;
      scaled[g.index(k, l)] *= tx * ty;
    }
  }
  Field out(g);
  DctPlans plans = plan_cache().get(g.nx, g.ny);
  fftw_execute_r2r(plans.inverse, scaled.data(), out.data());
  return out;
}

double neumann_eigenvalue(const Grid& grid, int k, int l) {
  const double a = k * std::numbers::pi / grid.lx;
  const double b = l * std::numbers::pi / grid.ly;
  return a * a + b * b;
}

std::vector<double> neumann_eigenvalues(const Grid& grid) {
  std::vector<double> ev(grid.size());
  for (int l = 0; l < grid.ny; ++l)
    for (int k = 0; k < grid.nx; ++k) ev[grid.index(k, l)] = neumann_eigenvalue(grid, k, l);
  return ev;
}

Field apply_symbol(const Field& f, std::span<const double> symbol) {
  SpectralField s = to_spectral(f);
  for (std::size_t k = 0; k < s.coeffs.size(); ++k) s.coeffs[k] *= symbol[k];
  return from_spectral(s);
}

Field laplacian(const Field& f) {
  SpectralField s = to_spectral(f);
  const Grid& g = f.grid();
  for (int l = 0; l < g.ny; ++l)
    for (int k = 0; k < g.nx; ++k) s(k, l) *= -neumann_eigenvalue(g, k, l);
  s(0, 0) = 0.0;
  Field out = from_spectral(s);
  remove_mean(out);
  return out;
}

void remove_mean(Field& f) {
  const double m = mean(f);
  for (double& v : f.values()) v -= m;
}

Field inv_neumann_laplacian(const Field& g) {
  const Grid& grid = g.grid();
  const double m = mean(g);
  const double rms = l2_norm(g) / std::sqrt(grid.area());
  if (std::abs(m) > 1e-10 * rms)
    throw Error(ErrorCode::NonZeroMean, "inverse Neumann Laplacian needs zero-mean data, mean = " + num(m));
  SpectralField s = to_spectral(g);
  for (int l = 0; l < grid.ny; ++l)
    for (int k = 0; k < grid.nx; ++k)
      if (k != 0 || l != 0) s(k, l) /= neumann_eigenvalue(grid, k, l);
  s(0, 0) = 0.0;
  return from_spectral(s);
}

// Compensated: mass-balance checks divide mean differences by dt.
double mean(const Field& f) {
  CompensatedSum sum;
  for (double v : f.values()) sum.add(v);
  return sum.value() / static_cast<double>(f.size());
}

double l2_inner(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "l2_inner");
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) sum += f[k] * g[k];
  return sum * f.grid().cell_area();
}

double l2_norm(const Field& f) { return std::sqrt(l2_inner(f, f)); }

double spectral_norm_sq(const SpectralField& s) {
  const Grid& g = s.grid;
  double sum = 0.0;
  for (int l = 0; l < g.ny; ++l) {
    const double wy = (l == 0) ? 1.0 : 0.5;
    for (int k = 0; k < g.nx; ++k) {
      const double wx = (k == 0) ? 1.0 : 0.5;
      sum += wx * wy * s(k, l) * s(k, l);
    }
  }
  return sum * g.area();
}

double hminus1_norm(const Field& f) {
  const SpectralField s = to_spectral(f);
  const Grid& g = f.grid();
  double sum = 0.0;
  for (int l = 0; l < g.ny; ++l) {
    const double wy = (l == 0) ? 1.0 : 0.5;
    for (int k = 0; k < g.nx; ++k) {
      if (k == 0 && l == 0) continue;
      const double wx = (k == 0) ? 1.0 : 0.5;
      sum += wx * wy * s(k, l) * s(k, l) / neumann_eigenvalue(g, k, l);
    }
  }
  const double m = s(0, 0);
  return std::sqrt(sum * g.area() + m * m * g.area());
}

double gradient_norm_sq(const Field& f) {
  const SpectralField s = to_spectral(f);
  const Grid& g = f.grid();
  double sum = 0.0;
  for (int l = 0; l < g.ny; ++l) {
    const double wy = (l == 0) ? 1.0 : 0.5;
    for (int k = 0; k < g.nx; ++k) {
      const double wx = (k == 0) ? 1.0 : 0.5;
      sum += wx * wy * s(k, l) * s(k, l) * neumann_eigenvalue(g, k, l);
    }
  }
  return sum * g.area();
}

void require_binary_mask(const Field& mask) {
  for (double v : mask.values())
    if (v != 0.0 && v != 1.0) throw Error(ErrorCode::NonBinaryMask, "mask values must be 0 or 1");
}

Field masked(const Field& f, const Field& mask) {
  require_same_grid(f.grid(), mask.grid(), "masked");
  require_binary_mask(mask);
  return hadamard(f, mask);
}

}  // namespace chinpaint
