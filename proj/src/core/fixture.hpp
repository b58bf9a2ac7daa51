#pragma once

#include "core/control.hpp"

namespace chinpaint {

// Vertical black/white stripes with a square hole in the middle.
struct StripeSpec {
  int n = 64;               // cells per axis
  double length = 1.0;      // side of the square domain
  int period = 16;          // stripe period in cells
  int hole = 16;            // side of the central damaged square in cells
  double blur_sigma = 1.0;  // cells
};

struct StripeImage {
  Grid grid{};
  Field truth;   // +-m_star everywhere, including inside D
  Field mask_D;
  Field f;       // truth off D, 0 on D
  Field phi0;
  double m_star = 0.0;
};

StripeImage make_stripes(const StripeSpec& spec, const PotentialParams& potential);

// The optimisation fixture: n^2 cells on [0, 6.4]^2, stripes of period n/2
// cells, central hole of n/4 cells, theta = 1, theta_c = 1.5, eps = 0.2,
// dt = 5e-3, 200 steps, box [1, 1e4], alpha1 = 1, alpha2 = 0, beta = 1e-3.
struct StripeFixture {
  StripeImage image;
  ControlProblem problem;
};

StripeFixture stripe_fixture(int n = 64);

}  // namespace chinpaint
