#include <cmath>
#include <numbers>
#include <vector>

#include "core/adjoint.hpp"
#include "core/control.hpp"
#include "core/fixture.hpp"
#include "core/sensitivity.hpp"
#include "core/spectral.hpp"
#include "test_support.hpp"

using namespace chinpaint;

namespace {

constexpr double pi = std::numbers::pi;

struct Setup {
  StripeFixture fx;
  Field lambda0;
  FidelityField fid;
  Potential potential;
  Trajectory traj;
  explicit Setup(double picard_tol = 1e-10, double alpha2 = 0.0)
      : fx(adjusted(stripe_fixture(32), picard_tol, alpha2)),
        lambda0(perturbed_control(fx.problem, 100.0, 0.5, 3)),
        fid(fx.problem.fidelity(lambda0)),
        potential(fx.problem.potential),
        traj(solve(fx.problem.phi0, fid, fx.problem.f, fx.problem.cfg, potential)) {}
  static StripeFixture adjusted(StripeFixture fx, double tol, double alpha2) {
    fx.problem.cfg.picard_tol = tol;
    fx.problem.weights.alpha2 = alpha2;
    return fx;
  }
  const ControlProblem& p() const { return fx.problem; }
  const SolverConfig& cfg() const { return fx.problem.cfg; }
  Trajectory adjoint() const { return solve_adjoint(traj, fid, p().f, p().weights, cfg(), potential); }
};

std::vector<Field> random_series(const Grid& g, int count, std::uint64_t seed) {
  std::vector<Field> out;
  for (int n = 0; n < count; ++n) out.push_back(testing::random_field(g, seed + n));
  return out;
}

}  // namespace

TEST_CASE("trapezoid weights") {
  CHECK(trapezoid_weight(0, 4) == 0.5);
  CHECK(trapezoid_weight(2, 4) == 1.0);
  CHECK(trapezoid_weight(4, 4) == 0.5);
}

TEST_CASE("zero sources give a zero costate") {
  const Setup s;
  const Trajectory p = solve_backward_general(s.traj, s.fid, {}, s.cfg(), s.potential);
  CHECK(p.n_steps() == s.cfg().n_steps);
  CHECK(max_l2_norm(p.states) == 0.0);
}

TEST_CASE("backward solve is the transpose of the linearised recursion") {
  const Setup s(1e-14);
  const Grid g = s.traj.grid;
  const int N = s.cfg().n_steps;
  const double dt = s.cfg().dt;
  LinearizedSources fwd{random_series(g, N + 1, 100), random_series(g, N + 1, 400)};
  AdjointSources bwd{random_series(g, N + 1, 700), testing::random_field(g, 999)};
  const Trajectory xi = solve_linear_general(s.traj, s.fid, fwd, s.cfg(), s.potential);
  const Trajectory p = solve_backward_general(s.traj, s.fid, bwd, s.cfg(), s.potential);

  double lhs = l2_inner(*bwd.g4, xi.states[N]), rhs = 0.0, scale = 0.0;
  for (int n = 0; n <= N; ++n) lhs += dt * trapezoid_weight(n, N) * l2_inner(bwd.g3[n], xi.states[n]);
  for (int n = 1; n <= N; ++n) {
    const Field src = fwd.g1[n] + laplacian(fwd.g2[n - 1]);
    rhs += dt * l2_inner(p.states[n], src);
    scale += dt * l2_norm(p.states[n]) * l2_norm(src);
  }
  CHECK(std::abs(lhs - rhs) <= 1e-8 * scale);
}

TEST_CASE("single cosine mode against the scalar backward recursion") {
  const Grid g = Grid::make(16, 12, 1.0, 0.8);
  PotentialParams pp;
  pp.theta = 1.0;
  pp.theta_c = 1.5;
  pp.eps = 0.4;
  pp.kind = PotentialKind::Quadratic;
  const Potential F(pp);
  SolverConfig cfg;
  cfg.dt = 2e-3;
  cfg.n_steps = 40;
  cfg.picard_tol = 1e-14;
  const FidelityField fid = FidelityField::constant(0.0, Field(g));
  const Trajectory traj = solve(Field(g, 0.1), fid, Field(g), cfg, F);

  const int k = 1, l = 3, N = cfg.n_steps;
  const Field mode = Field::from_function(
      g, [&](double x, double y) { return std::cos(k * pi * x / g.lx) * std::cos(l * pi * y / g.ly); });
  auto c = [](int n) { return std::cos(0.2 * n) - 0.3; };
  AdjointSources src;
  for (int n = 0; n <= N; ++n) src.g3.push_back(c(n) * mode);
  src.g4 = 0.7 * mode;
  const Trajectory p = solve_backward_general(traj, fid, src, cfg, F);

  const double mu = neumann_eigenvalue(g, k, l);
  const double S = default_stabilization(F), eps = pp.eps, dt = cfg.dt, f2 = pp.theta - pp.theta_c;
  const double K = 1.0 + dt * eps * mu * mu + dt * (S / eps) * mu;
  const double B = 1.0 - dt / eps * mu * (f2 - S);
  double amp = (dt * trapezoid_weight(N, N) * c(N) + 0.7) / K;
  double worst = l2_norm(p.states[N] - amp * mode);
  for (int n = N - 1; n >= 1; --n) {
    amp = (B * amp + dt * trapezoid_weight(n, N) * c(n)) / K;
    worst = std::max(worst, l2_norm(p.states[n] - amp * mode));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("cost adjoint is the general backward solve with tracking sources") {
  const Setup s(1e-10, 0.5);
  const CostWeights& w = s.p().weights;
  AdjointSources src;
  const Field chi = s.fid.undamaged();
  for (const Field& phi : s.traj.states) {
    Field g(phi.grid());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = w.alpha1 * chi[i] * (phi[i] - s.p().f[i]);
    src.g3.push_back(std::move(g));
  }
  Field g4(s.traj.grid);
  for (std::size_t i = 0; i < g4.size(); ++i)
    g4[i] = w.alpha2 * chi[i] * (s.traj.states.back()[i] - s.p().f[i]);
  src.g4 = g4;
  const Trajectory a = s.adjoint();
  const Trajectory b = solve_backward_general(s.traj, s.fid, src, s.cfg(), s.potential);
  CHECK(max_l2_distance(a.states, b.states) == 0.0);
}

TEST_CASE("costate is linear in the tracking weight") {
  const Setup s;
  CostWeights w = s.p().weights;
  const Trajectory p1 = s.adjoint();
  w.alpha1 *= 2.0;
  const Trajectory p2 = solve_adjoint(s.traj, s.fid, s.p().f, w, s.cfg(), s.potential);
  std::vector<Field> doubled;
  for (const Field& x : p1.states) doubled.push_back(2.0 * x);
  CHECK(max_l2_distance(p2.states, doubled) <= 1e-12 * max_l2_norm(doubled));
}

TEST_CASE("adjoint_q is minus eps times the Laplacian") {
  const Setup s;
  const Field p = testing::random_field(s.traj.grid, 5);
  Field expect = laplacian(p);
  expect *= -s.p().potential.eps;
  CHECK(testing::max_abs_diff(adjoint_q(p, s.potential), expect) <= 1e-12 * expect.max_abs());
}

TEST_CASE("linearised adjoint") {
  const Setup s;
  const Trajectory adj = s.adjoint();
  const Field h = random_directions(s.p(), s.lambda0, 1, 8)[0];
  const Trajectory xi = solve_linearized(s.traj, s.fid, h, s.p().f, s.cfg(), s.potential);

  SUBCASE("vanishes for a zero direction") {
    const Field zero(s.traj.grid);
    const Trajectory xi0 = solve_linearized(s.traj, s.fid, zero, s.p().f, s.cfg(), s.potential);
    const Trajectory P =
        solve_linearized_adjoint(s.traj, adj, xi0, s.fid, zero, s.p().weights, s.cfg(), s.potential);
    CHECK(max_l2_norm(P.states) == 0.0);
  }
  SUBCASE("matches a difference quotient of the costate") {
    const Trajectory P = solve_linearized_adjoint(s.traj, adj, xi, s.fid, h, s.p().weights, s.cfg(), s.potential);
    std::vector<double> taus{1e-2, 1e-3, 1e-4}, errs;
    for (double tau : taus) {
      Field moved = s.lambda0;
      moved.axpy(tau, h);
      const FidelityField fm = s.p().fidelity(moved);
      const Trajectory t = solve(s.p().phi0, fm, s.p().f, s.cfg(), s.potential);
      const Trajectory pm = solve_adjoint(t, fm, s.p().f, s.p().weights, s.cfg(), s.potential);
      double worst = 0.0;
      for (std::size_t n = 1; n < pm.states.size(); ++n) {
        Field q = pm.states[n] - adj.states[n];
        q *= 1.0 / tau;
        worst = std::max(worst, l2_norm(q - P.states[n]));
      }
      errs.push_back(worst);
    }
    CHECK(loglog_slope(taus, errs) >= 0.9);
  }
  SUBCASE("requires a running cost only") {
    CostWeights w = s.p().weights;
    w.alpha2 = 1.0;
    CHECK(testing::error_code_of([&] {
            solve_linearized_adjoint(s.traj, adj, xi, s.fid, h, w, s.cfg(), s.potential);
          }) == ErrorCode::Alpha2NotZero);
  }
}

TEST_CASE("costate is Lipschitz in the control") {
  const Setup s;
  const CostWeights& w = s.p().weights;
  CHECK(costate_lipschitz_ratio(s.fid, s.fid, s.p().phi0, s.p().f, w, s.cfg(), s.potential) == 0.0);

  // Calibrated as the max over 10 pairs drawn from seeds 100..109; checked
  // on pairs from other seeds.
  constexpr double kCal = 3.5373e-6;
  double worst = 0.0;
  for (std::uint64_t seed = 200; seed < 210; ++seed) {
    const FidelityField a = s.p().fidelity(perturbed_control(s.p(), 100.0, 1.0, seed));
    const FidelityField b = s.p().fidelity(perturbed_control(s.p(), 100.0, 1.0, seed + 1000));
    worst = std::max(worst, costate_lipschitz_ratio(a, b, s.p().phi0, s.p().f, w, s.cfg(), s.potential));
  }
  CHECK(worst <= 1.2 * kCal);
}

TEST_CASE("mismatched trajectory is rejected") {
  const Setup s;
  SolverConfig other = s.cfg();
  other.n_steps += 1;
  CHECK(testing::error_code_of([&] { solve_adjoint(s.traj, s.fid, s.p().f, s.p().weights, other, s.potential); }) ==
        ErrorCode::TrajectoryMismatch);
}
