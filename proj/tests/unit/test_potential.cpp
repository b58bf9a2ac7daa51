#include <cmath>
#include <random>

#include "core/potential.hpp"
#include "test_support.hpp"

using namespace chinpaint;

namespace {

PotentialParams params(double theta, double theta_c) {
  PotentialParams p;
  p.theta = theta;
  p.theta_c = theta_c;
  return p;
}

// Newton on G(m) = ln((1+m)/(1-m)) - (2 theta_c / theta) m from m = 0.99.
double newton_well(double theta, double theta_c) {
  double m = 0.99;
  const double a = 2.0 * theta_c / theta;
  for (int it = 0; it < 100; ++it) {
    const double g = std::log((1 + m) / (1 - m)) - a * m;
    const double dg = 2.0 / (1 - m * m) - a;
    m -= g / dg;
  }
  return m;
}

}  // namespace

TEST_CASE("values at the origin") {
  const Potential F(params(1.0, 2.0));
  CHECK(F.F(0.0) == 0.0);
  CHECK(F.F1d(0.0) == 0.0);
  CHECK(F.F2d(0.0) == doctest::Approx(1.0 - 2.0));
  CHECK(F.F3d(0.0) == 0.0);
  CHECK(F.F4d(0.0) == doctest::Approx(2.0));
}

TEST_CASE("first derivative at s = 1/2") {
  const Potential F(params(1.0, 2.0));
  // (theta/2) ln 3 - theta_c / 2
  CHECK(F.F1d(0.5) == doctest::Approx(0.5 * std::log(3.0) - 1.0).epsilon(1e-15));
  CHECK(F.F1d(0.5) == doctest::Approx(-0.450693855665945154).epsilon(1e-14));
  const double h = 1e-6;
  const double fd = (F.F(0.5 + h) - F.F(0.5 - h)) / (2 * h);
  CHECK(std::abs(fd - F.F1d(0.5)) < 1e-8);
}

TEST_CASE("derivative chain matches central differences") {
  for (auto [theta, theta_c] : {std::pair{1.0, 2.0}, std::pair{1.0, 1.5}, std::pair{0.5, 1.0}}) {
    const Potential F(params(theta, theta_c));
    const double h = 1e-5;
    double worst = 0.0;
    for (int i = 0; i <= 190; ++i) {
      const double s = -0.95 + 0.01 * i;
      auto rel = [&](double exact, double lo, double hi) {
        const double fd = (hi - lo) / (2 * h);
        const double scale = std::max(std::abs(exact), 1.0);
        return std::abs(fd - exact) / scale;
      };
      worst = std::max(worst, rel(F.F1d(s), F.F(s - h), F.F(s + h)));
      worst = std::max(worst, rel(F.F2d(s), F.F1d(s - h), F.F1d(s + h)));
      worst = std::max(worst, rel(F.F3d(s), F.F2d(s - h), F.F2d(s + h)));
      worst = std::max(worst, rel(F.F4d(s), F.F3d(s - h), F.F3d(s + h)));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("split into convex and concave parts") {
  const Potential F(params(0.8, 1.7));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.999, 0.999);
  for (int i = 0; i < 100; ++i) {
    const double s = u(rng);
    const SplitValues v = F.split_F0_F1(s);
    CHECK(std::abs(v.f0 + v.f1 - F.F(s)) <= 1e-14);
    CHECK(std::abs(v.f0_d1 + v.f1_d1 - F.F1d(s)) <= 1e-13);
    CHECK(v.f1_d2 == -1.7);
  }
  CHECK(F.split_F0_F1(0.0).f0_d2 == doctest::Approx(0.8));
  // convexity of F0 sampled across the clamped range
  const double lim = 1.0 - F.params().delta_clip;
  double min_f0dd = 1e300;
  for (int i = 0; i <= 10000; ++i) min_f0dd = std::min(min_f0dd, F.split_F0_F1(-lim + 2 * lim * i / 10000.0).f0_d2);
  CHECK(min_f0dd >= 0.8);
}

TEST_CASE("parity") {
  const Potential F(params(1.0, 1.5));
  for (double s : {0.1, 0.37, 0.8, 0.99}) {
    CHECK(std::abs(F.F(s) - F.F(-s)) <= 1e-14);
    CHECK(std::abs(F.F1d(s) + F.F1d(-s)) <= 1e-14);
    CHECK(std::abs(F.F2d(s) - F.F2d(-s)) <= 1e-14 * std::max(1.0, std::abs(F.F2d(s))));
    CHECK(std::abs(F.F3d(s) + F.F3d(-s)) <= 1e-14 * std::max(1.0, std::abs(F.F3d(s))));
    CHECK(std::abs(F.F4d(s) - F.F4d(-s)) <= 1e-14 * std::max(1.0, std::abs(F.F4d(s))));
  }
}

TEST_CASE("well location") {
  struct Case {
    double theta, theta_c, frozen;
  };
  // frozen from a 30-digit root solve of (theta/2) ln((1+m)/(1-m)) = theta_c m
  for (Case c : {Case{1.0, 2.0, 0.957504024077268741}, Case{1.0, 1.5, 0.858559636640110362},
                 Case{0.5, 1.0, 0.957504024077268741}}) {
    const PotentialParams p = params(c.theta, c.theta_c);
    const double m = well_location(p);
    const Potential F(p);
    CHECK(std::abs(F.F1d(m)) <= 1e-12);
    CHECK(std::abs(F.F1d(-m)) <= 1e-12);
    CHECK(m == doctest::Approx(newton_well(c.theta, c.theta_c)).epsilon(1e-12));
    CHECK(m == doctest::Approx(c.frozen).epsilon(1e-12));
    CHECK(F.F(m) == doctest::Approx(F.F(-m)).epsilon(1e-14));
    CHECK(F.F(m) < F.F(0.0));
  }
  CHECK(well_location(params(1.0, 1.001)) < 0.1);
  CHECK(testing::error_code_of([] { well_location(params(2.0, 1.5)); }) == ErrorCode::NoRoot);
  CHECK(testing::error_code_of([] { well_location(params(1.5, 1.5)); }) == ErrorCode::NoRoot);
}

TEST_CASE("clamping is counted") {
  Potential F(params(1.0, 1.5));
  CHECK(F.clamp_events() == 0);
  const double inside = F.F1d(0.5);
  CHECK(F.clamp_events() == 0);
  CHECK(std::isfinite(F.F1d(1.0)));
  CHECK(std::isfinite(F.F2d(-3.0)));
  CHECK(F.clamp_events() == 2);
  CHECK(F.F1d(1.0) == F.F1d(1.0 - F.params().delta_clip));
  F.reset_clamp_events();
  CHECK(F.clamp_events() == 0);
  CHECK(inside == F.F1d(0.5));
}

TEST_CASE("parameter validation") {
  PotentialParams p = params(1.0, 1.5);
  p.eps = 0.0;
  CHECK(testing::error_code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
  p = params(1.0, 1.5);
  p.delta_clip = 0.6;
  CHECK(testing::error_code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
  CHECK(testing::error_code_of([] { params(1.6, 1.5).validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("separation report") {
  const Grid g = Grid::make(4, 4, 1, 1);
  CHECK(separation_report(Field(g)).delta_observed == 1.0);
  const SeparationReport r = separation_report(Field(g, 0.99));
  CHECK(r.delta_observed == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_FALSE(r.violated);
  Field f(g, 0.2);
  f(1, 2) = 1.0;
  CHECK(separation_report(f).violated);
  CHECK(separation_report(f).max_phi == 1.0);
}

TEST_CASE("quadratic surrogate has vanishing third derivative") {
  PotentialParams p = params(1.0, 1.5);
  p.kind = PotentialKind::Quadratic;
  const Potential F(p);
  CHECK(F.F(0.4) == doctest::Approx(-0.25 * 0.16));
  CHECK(F.F2d(0.9) == doctest::Approx(-0.5));
  CHECK(F.F3d(0.3) == 0.0);
}

TEST_CASE("max |F''| over a symmetric range") {
  const Potential F(params(1.0, 1.5));
  CHECK(F.max_abs_f2(0.5) == doctest::Approx(0.5));  // attained at 0
  CHECK(F.max_abs_f2(0.9) == doctest::Approx(1.0 / 0.19 - 1.5).epsilon(1e-14));
  CHECK(F.max_abs_f2(0.0) == doctest::Approx(0.5));
}
