#include "efcm/solver.hpp"

#include "efcm/matfun.hpp"

#include <doctest.h>

#include <cmath>

using namespace efcm;

namespace {

// u' = -u + sin(t), u(0) = 1: u(t) = 1.5 e^{-t} + (sin t - cos t)/2.
double linear_scalar_exact(double t) {
  return 1.5 * std::exp(-t) + 0.5 * (std::sin(t) - std::cos(t));
}

Problem stretched_oscillator() {
  // Oscillator energy Q(u) = u^T C u = u1^2/2 + u2^2 conserved along
  //   u' = (1 + mu u1^2) (2 u2, -u1),
  // split as A = [[0,-2],[1,0]] (the linearisation, itself Q-preserving)
  // and g(u) = mu u1^2 (2 u2, -u1).  Unlike a circular rotation, the
  // nonlinear factor varies along the ellipse, so the numerical drift is a
  // genuine O(h^5) signal rather than exactly zero.
  Problem p;
  p.name = "stretched-oscillator";
  p.dim = 2;
  Matrix a(2, 2);
  a << 0.0, -2.0, 1.0, 0.0;
  p.a = LinearOperator::dense(a);
  const double mu = 0.25;
  p.g = [mu](double, const Vector& u) {
    Vector out(2);
    out(0) = mu * 2.0 * u(1) * u(0) * u(0);
    out(1) = -mu * u(0) * u(0) * u(0);
    return out;
  };
  p.u0 = Vector(2);
  p.u0 << 0.5, 0.18;
  Matrix c(2, 2);
  c << 0.5, 0.0, 0.0, 1.0;
  p.invariant_c = c;
  return p;
}

}  // namespace

TEST_CASE("policy parsing") {
  const IterationPolicy t = IterationPolicy::parse("tol:1e-10");
  CHECK(t.mode == IterationPolicy::Mode::Tolerance);
  CHECK(t.tolerance == doctest::Approx(1e-10));
  CHECK(t.guess == IterationPolicy::Guess::Exponential);
  const IterationPolicy f = IterationPolicy::parse("fixed:1:u0");
  CHECK(f.mode == IterationPolicy::Mode::FixedCount);
  CHECK(f.fixed_count == 1);
  CHECK(f.guess == IterationPolicy::Guess::InitialState);
  CHECK_THROWS_AS(IterationPolicy::parse("nope"), Error);
  CHECK_THROWS_AS(IterationPolicy::parse("tol:-1"), Error);
  CHECK_THROWS_AS(IterationPolicy::parse("fixed:0"), Error);
}

TEST_CASE("homogeneous systems are integrated exactly") {
  Matrix a(3, 3);
  a << 1.2, 0.3, 0.0, 0.3, -0.4, 0.1, 0.0, 0.1, 0.8;
  const LinearOperator op = LinearOperator::dense(a);
  const double h = 0.35;
  const EfcmScheme scheme = build_efcm(op, h, 2, 2, gauss_legendre(2));
  Vector u0(3);
  u0 << 1.0, -0.5, 0.25;
  const RhsFn zero_rhs = [](double, const Vector& u) { return Vector(Vector::Zero(u.size())); };
  const StepResult r = efcm_step(scheme, zero_rhs, 0.0, u0, IterationPolicy::tol(1e-14));
  const Vector expected = expm(op.scaled(-h)) * u0;
  CHECK((r.state - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.iterations == 1);  // exponential guess is already the fixed point
}

TEST_CASE("scalar exponential decay is exact for any (k, n)") {
  const double lambda = 2.7, h = 0.5;
  Vector u0(1);
  u0 << 1.3;
  const RhsFn zero_rhs = [](double, const Vector& u) { return Vector(Vector::Zero(u.size())); };
  for (int k : {2, 3, 4}) {
    for (int n = 2; n <= k; ++n) {
      const EfcmScheme scheme = build_efcm(LinearOperator::diagonal(Vector::Constant(1, lambda)),
                                           h, k, n, gauss_legendre(k));
      const StepResult r = efcm_step(scheme, zero_rhs, 0.0, u0, IterationPolicy::tol(1e-14));
      CHECK(std::abs(r.state(0) - std::exp(-lambda * h) * u0(0)) < 1e-12);
    }
  }
}

TEST_CASE("EFCM(2,2) hits fourth order on a scalar linear problem") {
  const LinearOperator a = LinearOperator::diagonal(Vector::Constant(1, 1.0));
  const RhsFn g = [](double t, const Vector& u) {
    return Vector(Vector::Constant(u.size(), std::sin(t)));
  };
  Vector u0(1);
  u0 << 1.0;
  const IterationPolicy policy = IterationPolicy::tol(1e-14, 200);

  const EfcmScheme coarse = build_efcm(a, 0.1, 2, 2, gauss_legendre(2));
  const StepResult r1 = efcm_step(coarse, g, 0.0, u0, policy);
  const double err_coarse = std::abs(r1.state(0) - linear_scalar_exact(0.1));
  CHECK(err_coarse <= 1e-6);

  const EfcmScheme fine = build_efcm(a, 0.05, 2, 2, gauss_legendre(2));
  const StepResult r2a = efcm_step(fine, g, 0.0, u0, policy);
  const StepResult r2b = efcm_step(fine, g, 0.05, r2a.state, policy);
  const double err_fine = std::abs(r2b.state(0) - linear_scalar_exact(0.1));
  CHECK(err_fine <= 1e-6 / 16.0 * 1.3);
}

TEST_CASE("Henon-Heiles per-step energy error shrinks at fifth order") {
  const Problem p = henon_heiles();
  const double h0 = energy(p, p.u0);
  double prev = -1.0;
  for (double h : {0.25, 0.125, 0.0625}) {
    const EfcmScheme scheme = build_efcm(p.a, h, 2, 2, gauss_legendre(2));
    const StepResult r = efcm_step(scheme, p.g, 0.0, p.u0, IterationPolicy::tol(1e-12, 200));
    const double drift = std::abs(energy(p, r.state) - h0);
    if (prev > 0.0) {
      const double ratio = prev / drift;
      CHECK(ratio > 20.0);  // ~2^5 with headroom
      CHECK(ratio < 50.0);
    }
    prev = drift;
  }
}

TEST_CASE("irk_step basics") {
  const ButcherTableau gauss2 = gauss_tableau(2);
  Vector u0(2);
  u0 << 0.4, -1.0;
  const RhsFn zero = [](double, const Vector& u) { return Vector(Vector::Zero(u.size())); };
  const StepResult r = irk_step(gauss2, zero, 0.0, u0, 0.2, IterationPolicy::tol(1e-14));
  CHECK((r.state - u0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("HBVM(2,2) equals EFCM(2,2) with A = 0 stage-for-stage") {
  const Problem p = henon_heiles();
  const LinearOperator a = p.a;
  // EFCM on the zero operator with g'(t,u) = g(t,u) - Au.
  const RhsFn full = [&p, a](double t, const Vector& u) { return Vector(p.g(t, u) - a.apply(u)); };
  const double h = 0.1;
  const EfcmScheme scheme = build_efcm(LinearOperator::zero(4), h, 2, 2, gauss_legendre(2));
  const ButcherTableau tableau = hbvm_tableau(2, 2, gauss_legendre(2));
  // Identical sweep counts keep the iterates in lockstep.
  for (int sweeps : {1, 2, 5}) {
    const IterationPolicy policy = IterationPolicy::fixed(sweeps, IterationPolicy::Guess::InitialState);
    const StepResult efcm_r = efcm_step(scheme, full, 0.0, p.u0, policy);
    const StepResult irk_r = irk_step(tableau, full, 0.0, p.u0, h, policy);
    CHECK(efcm_r.iterations == irk_r.iterations);
    CHECK((efcm_r.state - irk_r.state).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fixed-point window for a stiff scalar IRK step") {
  // u' = -50 u via f = g - Au with g = 0, A = 50.
  const ButcherTableau gauss2 = gauss_tableau(2);
  const RhsFn f = [](double, const Vector& u) { return Vector(-50.0 * u); };
  Vector u0(1);
  u0 << 1.0;
  const double max_abar = gauss2.a.cwiseAbs().maxCoeff();
  const double bound = 1.0 / ((0.0 + 50.0) * max_abar);  // contraction-constant oracle
  const IterationPolicy policy = IterationPolicy::tol(1e-12, 500);

  const StepResult ok = irk_step(gauss2, f, 0.0, u0, 0.9 * bound, policy);
  CHECK(!ok.reached_max);
  CHECK(std::isfinite(ok.state(0)));

  CHECK_THROWS_AS(irk_step(gauss2, f, 0.0, u0, 0.2, policy), DivergenceError);
}

TEST_CASE("integrate bookkeeping") {
  const Problem p = henon_heiles();
  auto scheme = std::make_shared<EfcmScheme>(build_efcm(p.a, 0.1, 2, 2, gauss_legendre(2)));
  const StepKernel kernel = make_efcm_kernel(scheme, p.g, IterationPolicy::tol(1e-12));

  SUBCASE("zero steps") {
    const Trajectory traj = integrate(kernel, p.u0, 0.0, 0.1);
    CHECK(traj.states.size() == 1);
    CHECK(traj.iterations.empty());
    CHECK(traj.total_iterations == 0);
  }
  SUBCASE("counts add up") {
    const Trajectory traj = integrate(kernel, p.u0, 1.0, 0.1);
    CHECK(traj.states.size() == 11);
    CHECK(traj.iterations.size() == 10);
    long sum = 0;
    for (int c : traj.iterations) sum += c;
    CHECK(sum == traj.total_iterations);
  }
  SUBCASE("non-integral spans are rejected") {
    CHECK_THROWS_AS(integrate(kernel, p.u0, 1.05, 0.1), Error);
  }
}

TEST_CASE("heat problem end-time accuracy at desk scale") {
  // Threshold frozen from a fine-step reference run of this configuration
  // (measured 1.65e-5; the stiff regime reduces the observed order to ~3,
  // so the error sits above a naive fourth-order extrapolation).
  const Problem p = semilinear_heat(200);
  auto scheme = std::make_shared<EfcmScheme>(build_efcm(p.a, 0.1, 2, 2, gauss_legendre(2)));
  const StepKernel kernel = make_efcm_kernel(scheme, p.g, IterationPolicy::tol(1e-12, 200));
  const Trajectory traj = integrate(kernel, p.u0, 1.0, 0.1);
  const Vector exact = p.exact(1.0);
  CHECK((traj.states.back() - exact).lpNorm<Eigen::Infinity>() < 2e-5);
}

TEST_CASE("quadratic invariant drift decays at fifth order per step") {
  const Problem p = stretched_oscillator();
  // The conservation premise u^T C (g - Au) = 0 holds identically.
  CHECK(std::abs(p.u0.dot(p.invariant_c * (p.g(0.0, p.u0) - p.a.apply(p.u0)))) == 0.0);
  const double q0 = quadratic_invariant(p, p.u0);
  std::vector<double> drifts;
  for (double h : {0.2, 0.1, 0.05}) {
    const EfcmScheme scheme = build_efcm(p.a, h, 2, 2, gauss_legendre(2));
    const StepResult r = efcm_step(scheme, p.g, 0.0, p.u0, IterationPolicy::tol(1e-14, 500));
    drifts.push_back(std::abs(quadratic_invariant(p, r.state) - q0));
  }
  CHECK(drifts.back() > 1e-13);  // above roundoff, a real signal
  for (std::size_t i = 1; i < drifts.size(); ++i) {
    const double order = std::log2(drifts[i - 1] / drifts[i]);
    CHECK(order >= 4.7);
  }
}

TEST_CASE("EFCM iteration counts ignore a tenfold stiffer operator") {
  // Stiff diagonal operator, bounded nonlinearity.
  const auto make = [](double stiffness) {
    Problem p;
    p.dim = 3;
    Vector d(3);
    d << stiffness, stiffness / 2.0, stiffness / 5.0;
    p.a = LinearOperator::diagonal(d);
    p.g = [](double, const Vector& u) {
      Vector out(u.size());
      for (int i = 0; i < u.size(); ++i) out(i) = std::sin(u(i));
      return out;
    };
    p.u0 = Vector::Constant(3, 0.7);
    return p;
  };
  const IterationPolicy policy = IterationPolicy::tol(1e-12, 200);
  const Problem mild = make(1e4);
  const Problem stiff = make(1e5);
  long totals[2];
  int idx = 0;
  for (const Problem* p : {&mild, &stiff}) {
    auto scheme = std::make_shared<EfcmScheme>(build_efcm(p->a, 0.05, 2, 2, gauss_legendre(2)));
    const Trajectory traj = integrate(make_efcm_kernel(scheme, p->g, policy), p->u0, 1.0, 0.05);
    totals[idx++] = traj.total_iterations;
  }
  CHECK(std::abs(totals[0] - totals[1]) <= totals[0] / 10 + 2);

  // The classical kernel on the same pair needs more sweeps as A grows
  // (or outright diverges).
  const ButcherTableau gauss2 = gauss_tableau(2);
  long irk_totals[2] = {0, 0};
  bool diverged[2] = {false, false};
  idx = 0;
  for (const Problem* p : {&mild, &stiff}) {
    const LinearOperator a = p->a;
    const RhsFn g = p->g;
    const RhsFn f = [a, g](double t, const Vector& u) { return Vector(g(t, u) - a.apply(u)); };
    try {
      const Trajectory traj =
          integrate(make_irk_kernel(gauss2, f, 0.05, policy), p->u0, 1.0, 0.05);
      irk_totals[idx] = traj.total_iterations;
    } catch (const DivergenceError&) {
      diverged[idx] = true;
    }
    ++idx;
  }
  CHECK((diverged[1] || irk_totals[1] > 2 * std::max<long>(irk_totals[0], 1)));
}

TEST_CASE("step-size advisor") {
  const QuadratureRule gauss2 = gauss_legendre(2);
  SUBCASE("frozen value for the Gauss-2 rule") {
    const double bound = max_convergent_stepsize(1.0, 1.0, 0.0, gauss2, 2);
    CHECK(bound == doctest::Approx(3.0 / (3.0 + std::sqrt(3.0))).epsilon(1e-14));
  }
  SUBCASE("continuity at omega = 0") {
    const double at_zero = max_convergent_stepsize(1.0, 1.0, 0.0, gauss2, 2);
    const double near_zero = max_convergent_stepsize(1.0, 1.0, 1e-14, gauss2, 2);
    CHECK(std::abs(at_zero - near_zero) < 1e-12);
  }
  SUBCASE("independent of the operator norm by construction") {
    // The bound's inputs are (L, C, omega, rule, n) only; stiffening A does
    // not enter.  Guard the signature by checking the formula directly.
    const double b1 = max_convergent_stepsize(2.0, 1.0, 0.0, gauss2, 2);
    const double b2 = max_convergent_stepsize(2.0, 1.0, 0.0, gauss2, 2);
    CHECK(b1 == b2);
  }
  SUBCASE("degenerate rules are rejected") {
    QuadratureRule degenerate;
    degenerate.nodes = {0.0};
    degenerate.weights = {1.0};
    degenerate.exactness = 0;
    CHECK_THROWS_AS(max_convergent_stepsize(1.0, 1.0, 0.0, degenerate, 2), Error);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(max_convergent_stepsize(0.0, 1.0, 0.0, gauss2, 2), Error);
    CHECK_THROWS_AS(max_convergent_stepsize(1.0, 0.5, 0.0, gauss2, 2), Error);
    CHECK_THROWS_AS(max_convergent_stepsize(1.0, 1.0, -1.0, gauss2, 2), Error);
  }
}

TEST_CASE("reference solutions") {
  SUBCASE("exact solutions pass through") {
    const Problem p = semilinear_heat(50);
    const Vector ref = reference_solution(p, 1.0, 1e-10);
    CHECK((ref - p.exact(1.0)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("linear scalar decay") {
    Problem p;
    p.dim = 1;
    p.a = LinearOperator::diagonal(Vector::Constant(1, 1.0));
    p.g = [](double, const Vector& u) { return Vector(Vector::Zero(u.size())); };
    p.u0 = Vector::Constant(1, 1.0);
    const Vector ref = reference_solution(p, 1.0, 1e-12);
    CHECK(std::abs(ref(0) - std::exp(-1.0)) < 1e-11);
  }
  SUBCASE("Henon-Heiles energy is conserved along the reference") {
    const Problem p = henon_heiles();
    const double h0 = energy(p, p.u0);
    const Vector ref = reference_solution(p, 10.0, 1e-12);
    CHECK(std::abs(energy(p, ref) - h0) <= 1e-9);
  }
  SUBCASE("tolerance window is enforced") {
    const Problem p = henon_heiles();
    CHECK_THROWS_AS(reference_solution(p, 1.0, 1e-5), Error);
    CHECK_THROWS_AS(reference_solution(p, 1.0, 1e-14), Error);
  }
}

TEST_CASE("divergence reports carry the step index") {
  const ButcherTableau gauss2 = gauss_tableau(2);
  const RhsFn f = [](double, const Vector& u) { return Vector(-50.0 * u); };
  Vector u0(1);
  u0 << 1.0;
  const StepKernel kernel = make_irk_kernel(gauss2, f, 0.5, IterationPolicy::tol(1e-12, 500));
  try {
    integrate(kernel, u0, 5.0, 0.5);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == 0);
  }
}

TEST_CASE("non-finite right-hand sides raise evaluation errors") {
  const EfcmScheme scheme =
      build_efcm(LinearOperator::zero(1), 0.1, 2, 2, gauss_legendre(2));
  const RhsFn bad = [](double, const Vector& u) {
    return Vector(Vector::Constant(u.size(), std::numeric_limits<double>::quiet_NaN()));
  };
  Vector u0(1);
  u0 << 1.0;
  try {
    efcm_step(scheme, bad, 0.0, u0, IterationPolicy::tol(1e-10));
    FAIL("expected evaluation error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::evaluation);
  }
}
