#include <array>
#include <cmath>
#include <vector>

#include "core/control.hpp"
#include "core/fixture.hpp"
#include "core/spectral.hpp"
#include "test_support.hpp"

using namespace chinpaint;

namespace {

// 8x8 grid on [0,1]^2 with a 2x2 hole, short horizon.
ControlProblem small_problem(double alpha1, double beta, double r = 2.0) {
  const Grid g = Grid::make(8, 8, 1.0, 1.0);
  ControlProblem p;
  p.box.mask_D = Field(g);
  for (int j = 3; j < 5; ++j)
    for (int i = 3; i < 5; ++i) p.box.mask_D(i, j) = 1.0;
  p.box.lambda_min = 1.0;
  p.box.lambda_max = 100.0;
  p.f = Field::from_function(g, [](double x, double) { return x < 0.5 ? -0.8 : 0.8; });
  for (std::size_t k = 0; k < p.f.size(); ++k)
    if (p.box.mask_D[k] == 1.0) p.f[k] = 0.0;
  p.phi0 = p.f;
  p.weights = {alpha1, 0.0, beta, r};
  p.cfg.dt = 1e-3;
  p.cfg.n_steps = 10;
  p.potential = PotentialParams{1.0, 1.5, 0.2};
  return p;
}

Trajectory constant_trajectory(const Field& phi, double dt, int n_steps) {
  Trajectory t;
  t.grid = phi.grid();
  t.dt = dt;
  t.states.assign(n_steps + 1, phi);
  return t;
}

double undamaged_area(const ControlBox& box) {
  double a = 0.0;
  for (double v : box.mask_D.values()) a += (1.0 - v) * box.mask_D.grid().cell_area();
  return a;
}

}  // namespace

TEST_CASE("cost examples") {
  ControlProblem p = small_problem(1.0, 1e-2);
  const double area = undamaged_area(p.box);
  SUBCASE("zero misfit leaves the penalty") {
    const FidelityField fid = p.fidelity(Field(p.f.grid(), p.box.lambda_max));
    const Trajectory t = constant_trajectory(p.f, 1e-3, 10);
    CHECK(cost(t, fid, p.f, p.weights) == doctest::Approx(0.5e-2 * area / 1e4).epsilon(1e-14));
  }
  SUBCASE("constant misfit") {
    const double c = 0.3, T = 1e-2;
    CostWeights w{2.0, 5.0, 0.0, 2.0};
    Field phi = p.f;
    for (double& v : phi.values()) v += c;
    const FidelityField fid = p.fidelity(Field(p.f.grid(), 10.0));
    const Trajectory t = constant_trajectory(phi, 1e-3, 10);
    const double expect = 0.5 * w.alpha1 * c * c * area * T + 0.5 * w.alpha2 * c * c * area;
    CHECK(cost(t, fid, p.f, w) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("stripe fixture regression") {
    const StripeFixture fx = stripe_fixture(64);
    const double J = evaluate_cost(fx.problem, Field(fx.image.grid, 5000.5));
    CHECK(J == doctest::Approx(0.4043775227).epsilon(1e-8));
  }
}

TEST_CASE("gradient examples") {
  ControlProblem p = small_problem(1.0, 1e-2, 3.0);
  const Field l0 = perturbed_control(p, 10.0, 0.5, 4);
  const FidelityField fid = p.fidelity(l0);
  const Trajectory t = constant_trajectory(p.f, p.cfg.dt, p.cfg.n_steps);
  const Trajectory zero_adj = constant_trajectory(Field(p.f.grid()), p.cfg.dt, p.cfg.n_steps);

  p.weights.beta = 0.0;
  CHECK(reduced_gradient(t, zero_adj, fid, p.f, p.weights).max_abs() == 0.0);

  p.weights.beta = 1e-2;
  const Field g = reduced_gradient(t, zero_adj, fid, p.f, p.weights);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (p.box.mask_D[k] == 1.0) {
      CHECK(g[k] == 0.0);
    } else {
      CHECK(g[k] < 0.0);
      CHECK(g[k] == doctest::Approx(-1e-2 * std::pow(l0[k], -4.0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("gradient against central differences on the stripe fixture") {
  for (double tol : {1e-10, 1e-12}) {
    StripeFixture fx = stripe_fixture(32);
    fx.problem.cfg.picard_tol = tol;
    const Field l0 = perturbed_control(fx.problem, 100.0, 0.5, 3);
    const auto dirs = random_directions(fx.problem, 0.1 * l0, 5, 17);
    double worst = 0.0;
    for (const DirectionalCheck& c : gradient_fd_check(fx.problem, l0, dirs, 1e-4)) worst = std::max(worst, c.rel_error);
    CAPTURE(tol);
    CHECK(worst <= (tol > 1e-11 ? 1e-3 : 1e-6));
  }
}

TEST_CASE("Hessian") {
  SUBCASE("penalty only: closed form for several exponents") {
    for (double r : {2.0, 3.0}) {
      ControlProblem p = small_problem(0.0, 1e-2, r);
      const Field l0 = perturbed_control(p, 10.0, 0.5, 6);
      const Evaluation at = evaluate(p, l0);
      const Field h = random_directions(p, Field(l0.grid(), 1.0), 1, 2)[0];
      double expect = 0.0;
      for (std::size_t k = 0; k < h.size(); ++k)
        expect += 1e-2 * (r + 1.0) * std::pow(l0[k] == 0.0 ? 1.0 : l0[k], -(r + 2.0)) * h[k] * h[k];
      expect *= l0.grid().cell_area();
      CHECK(hessian_form(p, at, h, h) == doctest::Approx(expect).epsilon(1e-12));
      CHECK(hessian_form(p, at, h, h) > 0.0);
      CHECK(hessian_apply(p, at, Field(l0.grid())).max_abs() == 0.0);
    }
  }
  SUBCASE("symmetry and second differences on the stripe fixture") {
    const StripeFixture fx = stripe_fixture(32);
    const Field l0 = perturbed_control(fx.problem, 100.0, 0.5, 3);
    const Evaluation at = evaluate(fx.problem, l0);
    const auto dirs = random_directions(fx.problem, 0.1 * l0, 3, 23);
    CHECK(hessian_symmetry_defect(fx.problem, at, dirs[0], dirs[1]) <= 1e-8);
    for (const DirectionalCheck& c : hessian_fd_check(fx.problem, l0, dirs, 1e-3)) CHECK(c.rel_error <= 1e-2);
  }
  SUBCASE("terminal weight is rejected") {
    ControlProblem p = small_problem(1.0, 1e-2);
    p.weights.alpha2 = 1.0;
    const Evaluation at = evaluate(p, Field(p.f.grid(), 10.0));
    CHECK(testing::error_code_of([&] { hessian_apply(p, at, at.gradient); }) == ErrorCode::Alpha2NotZero);
  }
}

TEST_CASE("projection onto the box") {
  const ControlProblem p = small_problem(1.0, 1e-2);
  Field l(p.f.grid(), 50.0);
  l[0] = 0.5;
  l[1] = 500.0;
  const Field q = project_box(l, p.box);
  CHECK(q[0] == 1.0);
  CHECK(q[1] == 100.0);
  CHECK(q[2] == 50.0);
  CHECK(q(3, 3) == 0.0);
  CHECK(testing::max_abs_diff(project_box(q, p.box), q) == 0.0);
}

TEST_CASE("stationarity examples") {
  const ControlProblem p = small_problem(1.0, 1e-2);
  const Grid g = p.f.grid();
  const Field interior = project_box(Field(g, 50.0), p.box);
  CHECK(stationarity(interior, Field(g), p.box) == 0.0);

  Field neg(g);
  for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = p.box.mask_D[k] == 1.0 ? 0.0 : -3.0;
  const Field top = project_box(Field(g, 100.0), p.box);
  CHECK(stationarity(top, neg, p.box) == 0.0);

  Field small = neg;
  small *= 1e-2;
  CHECK(stationarity(interior, small, p.box) == doctest::Approx(l2_norm(small)).epsilon(1e-14));
  CHECK(testing::error_code_of([&] { stationarity(interior, small, p.box, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("active set and critical cone on four cells") {
  // Only cells 0..3 are enumerated; the rest of the grid is damaged.
  const Grid g = Grid::make(4, 4, 1.0, 1.0);
  ControlBox box{1.0, 10.0, Field(g, 1.0)};
  for (std::size_t k = 0; k < 3; ++k) box.mask_D[k] = 0.0;
  Field l0(g), grad(g);
  // cell 0 at the lower bound, cell 1 at the upper bound, cell 2 interior.
  const std::array<double, 4> lv{1.0, 10.0, 5.0, 0.0};
  for (std::size_t k = 0; k < 4; ++k) l0[k] = lv[k];

  SUBCASE("zero gradient: nothing strongly active") {
    const ActiveSet as = active_set_and_cone(l0, grad, box);
    CHECK(as.count_active() == 0);
  }
  SUBCASE("uniform gradient above the threshold: cone is {0}") {
    for (double& v : grad.values()) v = 1.0;
    const ActiveSet as = active_set_and_cone(l0, grad, box, 0.5);
    CHECK(as.count_active() == 3);
    Field h(g);
    CHECK(as.in_cone(h));
    h[2] = 1e-3;
    CHECK_FALSE(as.in_cone(h));
  }
  SUBCASE("mixed case against enumeration") {
    const std::array<double, 4> gv{0.2, 0.01, 0.7, 0.0};
    for (std::size_t k = 0; k < 4; ++k) grad[k] = gv[k];
    const ActiveSet as = active_set_and_cone(l0, grad, box, 0.1);
    CHECK(as.count_active() == 2);
    // cell 0: strongly active (h = 0); cell 1: upper bound (h <= 0); cell 2:
    // strongly active (h = 0); cell 3: damaged (free).
    auto oracle = [](const std::array<int, 4>& s) { return s[0] == 0 && s[1] <= 0 && s[2] == 0; };
    int members = 0;
    for (int code = 0; code < 81; ++code) {
      std::array<int, 4> s{};
      Field h(g);
      for (int k = 0, c = code; k < 4; ++k, c /= 3) {
        s[k] = c % 3 - 1;
        h[k] = s[k];
      }
      CHECK(as.in_cone(h) == oracle(s));
      CHECK(as.in_cone(as.project_to_cone(h)));
      members += oracle(s);
    }
    CHECK(members == 6);
  }
}

TEST_CASE("optimisation") {
  SUBCASE("penalty only drives the control to the upper bound") {
    const ControlProblem p = small_problem(0.0, 1e-2);
    OptimizerConfig opt;
    opt.tol = 1e-12;
    const OptimResult r = optimize(p, opt);
    CHECK(r.report.converged);
    CHECK(testing::max_abs_diff(r.lambda0, project_box(Field(p.f.grid(), 100.0), p.box)) == 0.0);
    const SecondOrderReport so = second_order_check(p, r.final_eval, 4, 1);
    CHECK(so.used + so.skipped == 4);
  }
  SUBCASE("zero gradient returns immediately") {
    ControlProblem p = small_problem(1.0, 0.0);
    p.f = Field(p.f.grid(), 0.4);
    p.phi0 = p.f;
    const OptimResult r = optimize(p, OptimizerConfig{});
    CHECK(r.report.iterations == 0);
    CHECK(r.report.converged);
    CHECK(r.report.history.size() == 1);
  }
  SUBCASE("line search failure is reported") {
    const ControlProblem p = small_problem(0.0, 1e-2);
    OptimizerConfig opt;
    opt.tol = 1e-14;
    opt.armijo_c = 2.0;  // unattainable for a convex cost
    opt.max_backtracks = 3;
    CHECK(testing::error_code_of([&] { optimize(p, opt); }) == ErrorCode::LineSearchFailed);
  }
  SUBCASE("descent is monotone and iterates stay feasible") {
    const ControlProblem p = small_problem(1.0, 1e-3);
    OptimizerConfig opt;
    opt.max_iter = 15;
    const OptimResult r = optimize(p, Field(p.f.grid(), 3.0), opt);
    for (std::size_t i = 1; i < r.report.history.size(); ++i)
      CHECK(r.report.history[i].J <= r.report.history[i - 1].J);
    CHECK(r.report.history.back().J < r.report.history.front().J);
    for (std::size_t k = 0; k < r.lambda0.size(); ++k) {
      if (p.box.mask_D[k] == 1.0) CHECK(r.lambda0[k] == 0.0);
      else CHECK((r.lambda0[k] >= 1.0 && r.lambda0[k] <= 100.0));
    }
  }
}

TEST_CASE("second-order check with a penalty-only cost") {
  const ControlProblem p = small_problem(0.0, 1e-2);
  const Field l0 = perturbed_control(p, 10.0, 0.5, 9);
  const Evaluation at = evaluate(p, l0);
  const SecondOrderReport so = second_order_check(p, at, 5, 3, 1e300);
  CHECK(so.used == 5);
  CHECK(so.min_curvature > 0.0);
  const SecondOrderReport all_active = second_order_check(p, at, 3, 3, 0.0);
  CHECK(all_active.used == 0);
  CHECK(all_active.skipped == 3);
}
