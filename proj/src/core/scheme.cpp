#include "core/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/spectral.hpp"

namespace chinpaint {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (n_steps < 0) throw Error(ErrorCode::InvalidArgument, "n_steps must be nonnegative");
  if (!(picard_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "picard_tol must be positive");
  if (picard_max < 1) throw Error(ErrorCode::InvalidArgument, "picard_max must be at least 1");
}

double default_stabilization(const Potential& potential) {
  const PotentialParams& p = potential.params();
  if (p.kind == PotentialKind::Quadratic) return 0.5 * potential.max_abs_f2(0.0);
  const double m_star = well_location(p);
  return 0.5 * potential.max_abs_f2(0.5 * (1.0 + m_star));
}

namespace {

double weighted_norm(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.grid().cell_area());
}

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

bool is_zero(const Field& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return v == 0.0; });
}

}  // namespace

StepOperators::StepOperators(const Grid& grid, const SolverConfig& cfg, const Potential& potential,
                             const Field& lambda)
    : grid_(grid),
      dt_(cfg.dt),
      eps_(potential.params().eps),
      stab_(cfg.stabilization >= 0.0 ? cfg.stabilization : default_stabilization(potential)),
      tol_(cfg.picard_tol),
      max_iter_(cfg.picard_max),
      lambda_(lambda) {
  cfg.validate();
  require_same_grid(grid, lambda.grid(), "StepOperators");
  // Balances the extreme eigenvalue ratios of the preconditioned operator:
  // (1 + dt c)^2 = (1 + dt lambda_min)(1 + dt lambda_max).
  const double lo = std::max(0.0, lambda.min()), hi = std::max(0.0, lambda.max());
  shift_ = (std::sqrt((1.0 + dt_ * lo) * (1.0 + dt_ * hi)) - 1.0) / dt_;
  const std::vector<double> mu = neumann_eigenvalues(grid);
  laplace_symbol_.resize(mu.size());
  a_symbol_.resize(mu.size());
  precond_symbol_.resize(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    laplace_symbol_[k] = -mu[k];
    a_symbol_[k] = 1.0 + dt_ * eps_ * mu[k] * mu[k] + dt_ * (stab_ / eps_) * mu[k];
    precond_symbol_[k] = 1.0 / (a_symbol_[k] + dt_ * shift_);
  }
  laplace_symbol_[0] = 0.0;
}

Field StepOperators::apply_K(const Field& x) const {
  Field out = apply_symbol(x, a_symbol_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += dt_ * lambda_[k] * x[k];
  return out;
}

Field StepOperators::precondition(const Field& r) const { return apply_symbol(r, precond_symbol_); }

Field StepOperators::solve_K(const Field& rhs, const Field* initial_guess, LinearSolveStats* stats) const {
  require_same_grid(grid_, rhs.grid(), "solve_K");
  if (!rhs.all_finite()) throw Error(ErrorCode::NonFinite, "non-finite right-hand side in implicit step");
  if (is_zero(rhs)) {
    if (stats) *stats = {};
    return Field(grid_);
  }

  Field x = initial_guess ? *initial_guess : Field(grid_);
  const double scale = weighted_norm(precondition(rhs));
  Field r = rhs;
  if (initial_guess) r -= apply_K(x);
  Field z = precondition(r);
  double correction = weighted_norm(z);
  if (correction <= tol_ * scale) {
    if (stats) *stats = {0, correction};
    return balance_mean(rhs, std::move(x));
  }

  Field p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter_; ++it) {
    const Field kp = apply_K(p);
    const double alpha = rz / dot(p, kp);
    x.axpy(alpha, p);
    r.axpy(-alpha, kp);
    z = precondition(r);
    correction = weighted_norm(z);
    if (!std::isfinite(correction)) throw Error(ErrorCode::NonFinite, "implicit solve produced non-finite values");
    if (correction <= tol_ * scale) {
      if (stats) *stats = {it, correction};
      return balance_mean(rhs, std::move(x));
    }
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta * p[k];
  }
  throw Error(ErrorCode::PicardDiverged, "fidelity iteration did not reach tolerance " + num(tol_) +
                                             " in " + std::to_string(max_iter_) +
                                             " iterations (last correction " + num(correction / scale) +
                                             " relative)");
}

// A preserves the mean, so mean(K x) = mean(x) + dt mean(lambda x). Shifting x
// by a constant removes the mean residual exactly; the mass balance of the
// scheme is then not limited by the iteration tolerance.
Field StepOperators::balance_mean(const Field& rhs, Field x) const {
  CompensatedSum mb, mx, mlx, ml;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mb.add(rhs[k]);
    mx.add(x[k]);
    mlx.add(lambda_[k] * x[k]);
    ml.add(lambda_[k]);
  }
  const double n = static_cast<double>(x.size());
  const double delta =
      (mb.value() / n - mx.value() / n - dt_ * mlx.value() / n) / (1.0 + dt_ * ml.value() / n);
  for (double& v : x.values()) v += delta;
  return x;
}

Field StepOperators::lap(const Field& x) const {
  Field out = apply_symbol(x, laplace_symbol_);
  remove_mean(out);
  return out;
}

Field StepOperators::apply_B(const Field& x, const Field& f2) const {
  Field w(grid_);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = (f2[k] - stab_) * x[k];
  Field out = lap(w);
  out *= dt_ / eps_;
  out += x;
  return out;
}

Field StepOperators::apply_BT(const Field& x, const Field& f2) const {
  Field lx = lap(x);
  Field out = x;
  const double c = dt_ / eps_;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += c * (f2[k] - stab_) * lx[k];
  return out;
}

Field StepOperators::explicit_part(const Field& phi, const Field& f1) const {
  Field w(grid_);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = f1[k] - stab_ * phi[k];
  Field out = lap(w);
  out *= dt_ / eps_;
  out += phi;
  return out;
}

Field sample_F1d(const Potential& potential, const Field& phi) {
  Field out(phi.grid());
  for (std::size_t k = 0; k < phi.size(); ++k) out[k] = potential.F1d(phi[k]);
  return out;
}

Field sample_F2d(const Potential& potential, const Field& phi) {
  Field out(phi.grid());
  for (std::size_t k = 0; k < phi.size(); ++k) out[k] = potential.F2d(phi[k]);
  return out;
}

Field sample_F3d(const Potential& potential, const Field& phi) {
  Field out(phi.grid());
  for (std::size_t k = 0; k < phi.size(); ++k) out[k] = potential.F3d(phi[k]);
  return out;
}

}  // namespace chinpaint
