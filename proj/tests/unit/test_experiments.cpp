#include <array>
#include <cmath>
#include <vector>

#include "core/experiments.hpp"
#include "core/fixture.hpp"
#include "core/spectral.hpp"
#include "test_support.hpp"

using namespace chinpaint;

namespace {

PotentialParams decay_potential() { return PotentialParams{1.0, 1.5, 0.5}; }

StripeImage decay_image() {
  StripeSpec spec;
  spec.n = 32;
  spec.length = 16.0;
  spec.period = 16;
  spec.hole = 8;
  spec.blur_sigma = 0.5;
  return make_stripes(spec, decay_potential());
}

SolverConfig target_solver() {
  SolverConfig c;
  c.dt = 0.05;
  c.n_steps = 1;
  return c;
}

TargetConfig target_config() {
  TargetConfig t;
  t.lambda_big = 200.0;
  t.stat_tol = 1e-3;
  return t;
}

DecayConfig decay_config(int n_steps = 200) {
  DecayConfig d;
  d.cfg.dt = 0.05;
  d.cfg.n_steps = n_steps;
  return d;
}

}  // namespace

TEST_CASE("constant raw target is its own regularisation") {
  const PotentialParams pp = decay_potential();
  const Grid g = Grid::make(16, 16, 4.0, 4.0);
  const Field f(g, well_location(pp));
  const TargetResult r = regularized_target(f, Field(g), pp, target_solver(), target_config());
  CHECK(testing::max_abs_diff(r.f_tilde, f) <= 1e-14);
  CHECK(r.euler_lagrange_residual <= 1e-12);
}

TEST_CASE("regularised target of the stripes") {
  const StripeImage img = decay_image();
  const TargetConfig tcfg = target_config();
  const TargetResult r = regularized_target(img.f, img.mask_D, decay_potential(), target_solver(), tcfg);
  CHECK(r.stationarity <= tcfg.stat_tol);
  CHECK(r.f_tilde.max_abs() < 1.0);
  // Frozen on first computation.
  CHECK(r.steps == 253);
  CHECK(r.euler_lagrange_residual == doctest::Approx(1.55530190133e-3).epsilon(1e-6));
  CHECK(l2_norm(r.f_tilde) == doctest::Approx(11.409809444).epsilon(1e-8));
  CHECK(l2_norm(r.f_tilde - img.f) == doctest::Approx(5.21175831726).epsilon(1e-8));

  TargetConfig capped = tcfg;
  capped.max_steps = 3;
  CHECK(testing::error_code_of([&] {
          regularized_target(img.f, img.mask_D, decay_potential(), target_solver(), capped);
        }) == ErrorCode::NotStationary);
  CHECK(testing::error_code_of([&] {
          regularized_target(2.0 * img.f, img.mask_D, decay_potential(), target_solver(), tcfg);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("exponential fit") {
  std::vector<double> t, y;
  for (int i = 0; i < 20; ++i) {
    t.push_back(0.1 * i);
    y.push_back(3.0 * std::exp(-2.5 * t.back()));
  }
  const LogLinearFit a = fit_exponential(t, y);
  CHECK(a.rate == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(a.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(a.r2 == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> scaled = y;
  for (std::size_t i = 0; i < y.size(); ++i) scaled[i] = 7.0 * y[i] * (1.0 + 0.1 * std::sin(3.0 * i));
  std::vector<double> noisy = y;
  for (std::size_t i = 0; i < y.size(); ++i) noisy[i] = y[i] * (1.0 + 0.1 * std::sin(3.0 * i));
  const LogLinearFit b = fit_exponential(t, noisy), c = fit_exponential(t, scaled);
  CHECK(c.rate == doctest::Approx(b.rate).epsilon(1e-12));
  CHECK(c.r2 == doctest::Approx(b.r2).epsilon(1e-12));
  CHECK(c.intercept - b.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-12));

  CHECK(testing::error_code_of([&] { fit_exponential({0.0}, {1.0}); }) == ErrorCode::InvalidArgument);
  CHECK(testing::error_code_of([&] { fit_exponential({0.0, 1.0}, {1.0, 0.0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("decay from the target itself stays at the floor") {
  const StripeImage img = decay_image();
  const TargetResult r = regularized_target(img.f, img.mask_D, decay_potential(), target_solver(), target_config());
  const auto reps = decay_experiment(r.f_tilde, r.f_tilde, img.mask_D, {10.0}, decay_potential(), decay_config(50));
  REQUIRE(reps.size() == 1);
  for (double d : reps[0].hminus1_values) CHECK(d <= 1e-3);
  CHECK(reps[0].hminus1_values.front() == 0.0);
}

TEST_CASE("decay ladder on the stripes") {
  const StripeImage img = decay_image();
  const TargetResult r = regularized_target(img.f, img.mask_D, decay_potential(), target_solver(), target_config());
  const auto reps =
      decay_experiment(r.f_tilde, img.phi0, img.mask_D, {0.0, 10.0, 100.0, 1000.0}, decay_potential(), decay_config());
  REQUIRE(reps.size() == 4);
  // Frozen on first computation.
  const std::array<double, 4> rates{0.00445940985409, 3.40357432555, 6.76330972992, 50.0427313074};
  for (std::size_t i = 0; i < 4; ++i) CHECK(reps[i].fitted_rate == doctest::Approx(rates[i]).epsilon(1e-6));
  for (const auto& rep : reps) {
    CHECK(rep.times.size() == 201);
    for (double d : rep.hminus1_values) CHECK((std::isfinite(d) && d >= 0.0));
    CHECK(rep.threshold_context == doctest::Approx(rep.lambda0 * 0.125));
  }
  CHECK(reps[1].fitted_rate < reps[2].fitted_rate);
  CHECK(reps[2].fitted_rate < reps[3].fitted_rate);
  CHECK(reps[2].fit_r2 >= 0.95);
  CHECK(reps[3].fit_r2 >= 0.95);
}

TEST_CASE("epsilon scan table shape") {
  const StripeImage img = decay_image();
  const PotentialParams pp = decay_potential();
  CHECK(epsilon_threshold_scan({}, 100.0, img.f, img.phi0, img.mask_D, pp, decay_config(), target_solver(),
                               target_config())
            .empty());
  const auto one = epsilon_threshold_scan({0.5}, 100.0, img.f, img.phi0, img.mask_D, pp, decay_config(100),
                                          target_solver(), target_config());
  REQUIRE(one.size() == 1);
  CHECK(one[0].eps == 0.5);
  const auto direct = decay_experiment(
      regularized_target(img.f, img.mask_D, pp, target_solver(), target_config()).f_tilde, img.phi0, img.mask_D,
      {100.0}, pp, decay_config(100));
  CHECK(one[0].fitted_rate == direct[0].fitted_rate);
}
