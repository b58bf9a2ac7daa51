#include "core/fixture.hpp"

#include "core/image.hpp"
#include "core/spectral.hpp"

namespace chinpaint {

StripeImage make_stripes(const StripeSpec& spec, const PotentialParams& potential) {
  StripeImage img;
  img.grid = Grid::make(spec.n, spec.n, spec.length, spec.length);
  img.m_star = well_location(potential);
  img.truth = Field(img.grid);
  img.mask_D = Field(img.grid);
  const int lo = (spec.n - spec.hole) / 2;
  for (int j = 0; j < spec.n; ++j)
    for (int i = 0; i < spec.n; ++i) {
      img.truth(i, j) = (i % spec.period) < spec.period / 2 ? img.m_star : -img.m_star;
      if (i >= lo && i < lo + spec.hole && j >= lo && j < lo + spec.hole) img.mask_D(i, j) = 1.0;
    }
  img.f = img.truth - masked(img.truth, img.mask_D);
  img.phi0 = initial_guess(img.f, img.mask_D, spec.blur_sigma);
  return img;
}

StripeFixture stripe_fixture(int n) {
  PotentialParams pot;
  pot.theta = 1.0;
  pot.theta_c = 1.5;
  pot.eps = 0.2;

  StripeSpec spec;
  spec.n = n;
  spec.length = 6.4;
  spec.period = n / 2;
  spec.hole = n / 4;
  spec.blur_sigma = n / 64.0;

  StripeFixture fx;
  fx.image = make_stripes(spec, pot);
  ControlProblem& p = fx.problem;
  p.phi0 = fx.image.phi0;
  p.f = fx.image.f;
  p.box.lambda_min = 1.0;
  p.box.lambda_max = 1e4;
  p.box.mask_D = fx.image.mask_D;
  p.weights = CostWeights{1.0, 0.0, 1e-3, 2.0};
  p.potential = pot;
  p.cfg.dt = 5e-3;
  p.cfg.n_steps = 200;
  return fx;
}

}  // namespace chinpaint
