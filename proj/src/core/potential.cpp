#include "core/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace chinpaint {

void PotentialParams::validate() const {
  if (!(theta > 0.0) || !(theta_c > 0.0))
    throw Error(ErrorCode::InvalidArgument, "theta and theta_c must be positive");
  if (!(theta < theta_c))
    throw Error(ErrorCode::InvalidArgument, "double-well condition requires theta < theta_c (theta=" +
                                                num(theta) + ", theta_c=" + num(theta_c) + ")");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (!(delta_clip > 0.0 && delta_clip < 0.5))
    throw Error(ErrorCode::InvalidArgument, "delta_clip must lie in (0, 0.5)");
}

Potential::Potential(const PotentialParams& params) : params_(params) { params_.validate(); }

Potential::Potential(const Potential& other) : params_(other.params_), clamps_(other.clamp_events()) {}

Potential& Potential::operator=(const Potential& other) {
  params_ = other.params_;
  clamps_.store(other.clamp_events(), std::memory_order_relaxed);
  return *this;
}

double Potential::clamp(double s) const {
  const double bound = 1.0 - params_.delta_clip;
  if (s > bound || s < -bound) {
    clamps_.fetch_add(1, std::memory_order_relaxed);
    return std::clamp(s, -bound, bound);
  }
  return s;
}

double Potential::F(double s) const {
  const double th = params_.theta, tc = params_.theta_c;
  if (params_.kind == PotentialKind::Quadratic) return 0.5 * (th - tc) * s * s;
  s = clamp(s);
  return 0.5 * th * ((1.0 - s) * std::log1p(-s) + (1.0 + s) * std::log1p(s)) - 0.5 * tc * s * s;
}

double Potential::F1d(double s) const {
  const double th = params_.theta, tc = params_.theta_c;
  if (params_.kind == PotentialKind::Quadratic) return (th - tc) * s;
  s = clamp(s);
  return 0.5 * th * (std::log1p(s) - std::log1p(-s)) - tc * s;
}

double Potential::F2d(double s) const {
  const double th = params_.theta, tc = params_.theta_c;
  if (params_.kind == PotentialKind::Quadratic) return th - tc;
  s = clamp(s);
  return th / (1.0 - s * s) - tc;
}

double Potential::F3d(double s) const {
  if (params_.kind == PotentialKind::Quadratic) return 0.0;
  s = clamp(s);
  const double d = 1.0 - s * s;
  return 2.0 * params_.theta * s / (d * d);
}

double Potential::F4d(double s) const {
  if (params_.kind == PotentialKind::Quadratic) return 0.0;
  s = clamp(s);
  const double d = 1.0 - s * s;
  return 2.0 * params_.theta * (1.0 + 3.0 * s * s) / (d * d * d);
}

SplitValues Potential::split_F0_F1(double s) const {
  const double th = params_.theta, tc = params_.theta_c;
  SplitValues v{};
  v.f1 = -0.5 * tc * s * s;
  v.f1_d1 = -tc * s;
  v.f1_d2 = -tc;
  if (params_.kind == PotentialKind::Quadratic) {
    v.f0 = 0.5 * th * s * s;
    v.f0_d1 = th * s;
    v.f0_d2 = th;
    return v;
  }
  s = clamp(s);
  v.f1 = -0.5 * tc * s * s;
  v.f1_d1 = -tc * s;
  v.f0 = 0.5 * th * ((1.0 - s) * std::log1p(-s) + (1.0 + s) * std::log1p(s));
  v.f0_d1 = 0.5 * th * (std::log1p(s) - std::log1p(-s));
  v.f0_d2 = th / (1.0 - s * s);
  return v;
}

double Potential::max_abs_f2(double bound) const {
  const double th = params_.theta, tc = params_.theta_c;
  if (params_.kind == PotentialKind::Quadratic) return std::abs(th - tc);
  const double b = std::min(std::abs(bound), 1.0 - params_.delta_clip);
  // F'' ranges over [theta - theta_c, theta/(1-b^2) - theta_c].
  return std::max(std::abs(th - tc), std::abs(th / (1.0 - b * b) - tc));
}

double well_location(const PotentialParams& params) {
  if (!(params.theta > 0.0) || !(params.theta < params.theta_c))
    throw Error(ErrorCode::NoRoot, "no double well unless 0 < theta < theta_c");
  auto dF = [&](double m) {
    return 0.5 * params.theta * (std::log1p(m) - std::log1p(-m)) - params.theta_c * m;
  };
  // dF < 0 just right of 0 and dF -> +inf as m -> 1.
  double lo = 0.0, hi = 1.0 - 1e-15;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dF(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(dF(lo)) < std::abs(dF(hi)) ? lo : hi;
}

SeparationReport separation_report(const Field& phi) {
  SeparationReport r;
  r.min_phi = phi.min();
  r.max_phi = phi.max();
  r.delta_observed = 1.0 - std::max(std::abs(r.min_phi), std::abs(r.max_phi));
  r.violated = r.delta_observed <= 0.0;
  return r;
}

}  // namespace chinpaint
