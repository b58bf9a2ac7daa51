#pragma once

#include <atomic>
#include <cstdint>

#include "core/field.hpp"

namespace chinpaint {

enum class PotentialKind {
  Logarithmic,
  // (theta - theta_c)/2 s^2: the quadratic Taylor term of the logarithmic
  // potential. F''' == 0, used to isolate remainder terms in tests.
  Quadratic,
};

struct PotentialParams {
  double theta = 1.0;
  double theta_c = 1.5;
  double eps = 1.0;
  double delta_clip = 1e-6;
  PotentialKind kind = PotentialKind::Logarithmic;

  // Throws InvalidArgument unless 0 < theta < theta_c, eps > 0 and
  // delta_clip in (0, 0.5).
  void validate() const;
};

struct SplitValues {
  // F0 = (theta/2)[(1-s)ln(1-s) + (1+s)ln(1+s)], F1 = -(theta_c/2) s^2
  double f0, f0_d1, f0_d2;
  double f1, f1_d1, f1_d2;
};

struct SeparationReport {
  double min_phi = 0.0;
  double max_phi = 0.0;
  double delta_observed = 1.0;  // 1 - max(|min_phi|, |max_phi|)
  bool violated = false;        // delta_observed <= 0
};

// Logarithmic Flory-Huggins double well
//   F(s) = (theta/2)[(1-s)ln(1-s) + (1+s)ln(1+s)] - (theta_c/2) s^2.
// Arguments are clamped to [-1 + delta_clip, 1 - delta_clip]; every clamp is
// tallied so separation violations stay observable.
class Potential {
 public:
  explicit Potential(const PotentialParams& params);
  Potential(const Potential& other);
  Potential& operator=(const Potential& other);

  const PotentialParams& params() const { return params_; }

  double clamp(double s) const;

  double F(double s) const;
  double F1d(double s) const;
  double F2d(double s) const;
  double F3d(double s) const;
  double F4d(double s) const;

  SplitValues split_F0_F1(double s) const;

  std::uint64_t clamp_events() const { return clamps_.load(std::memory_order_relaxed); }
  void reset_clamp_events() { clamps_.store(0, std::memory_order_relaxed); }

  // max |F''| over [-bound, bound] (F'' is even and increasing in |s|).
  double max_abs_f2(double bound) const;

 private:
  PotentialParams params_;
  mutable std::atomic<std::uint64_t> clamps_{0};
};

// Positive root of F'(m) = 0 by bisection on (0, 1 - 1e-15). Throws NoRoot if
// theta >= theta_c.
double well_location(const PotentialParams& params);

SeparationReport separation_report(const Field& phi);

}  // namespace chinpaint
