#include "efcm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace efcm {

IterationPolicy IterationPolicy::fixed(int count, Guess g) {
  if (count < 1) throw_invalid("IterationPolicy::fixed: count must be at least 1");
  IterationPolicy p;
  p.mode = Mode::FixedCount;
  p.fixed_count = count;
  p.guess = g;
  return p;
}

IterationPolicy IterationPolicy::tol(double tolerance, int max_iterations, Guess g) {
  if (!(tolerance > 0.0)) throw_invalid("IterationPolicy::tol: tolerance must be positive");
  if (max_iterations < 1) throw_invalid("IterationPolicy::tol: max iterations must be at least 1");
  IterationPolicy p;
  p.mode = Mode::Tolerance;
  p.tolerance = tolerance;
  p.max_iterations = max_iterations;
  p.guess = g;
  return p;
}

IterationPolicy IterationPolicy::parse(const std::string& text) {
  const auto first = text.find(':');
  if (first == std::string::npos) throw_invalid("policy: expected tol:<x> or fixed:<n>");
  const std::string kind = text.substr(0, first);
  std::string rest = text.substr(first + 1);
  Guess guess = Guess::Exponential;
  const auto second = rest.find(':');
  if (second != std::string::npos) {
    const std::string g = rest.substr(second + 1);
    rest = rest.substr(0, second);
    if (g == "u0") {
      guess = Guess::InitialState;
    } else if (g == "exp") {
      guess = Guess::Exponential;
    } else {
      throw_invalid("policy: unknown guess '" + g + "' (expected u0 or exp)");
    }
  }
  try {
    if (kind == "tol") return tol(std::stod(rest), 100, guess);
    if (kind == "fixed") return fixed(std::stoi(rest), guess);
  } catch (const std::exception&) {
    throw_invalid("policy: cannot parse value '" + rest + "'");
  }
  throw_invalid("policy: unknown kind '" + kind + "' (expected tol or fixed)");
}

std::string IterationPolicy::describe() const {
  if (mode == Mode::FixedCount) return "fixed:" + std::to_string(fixed_count);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "tol:%g", tolerance);
  return buf;
}

namespace {

double stage_divergence_threshold(const Vector& u0) {
  return 1e8 * (1.0 + u0.lpNorm<Eigen::Infinity>());
}

Vector eval_rhs(const RhsFn& g, double t, const Vector& u) {
  Vector out = g(t, u);
  if (!out.allFinite()) {
    throw Error(Errc::evaluation, "right-hand side returned non-finite values at t = " +
                                      std::to_string(t));
  }
  return out;
}

}  // namespace

StepResult efcm_step(const EfcmScheme& scheme, const RhsFn& g, double t0, const Vector& u0,
                     const IterationPolicy& policy) {
  if (u0.size() != scheme.dim()) throw_invalid("efcm_step: state dimension mismatch");
  const int k = scheme.stages();
  const double h = scheme.stepsize();
  const auto& c = scheme.rule().nodes;
  const double blowup = stage_divergence_threshold(u0);

  // phi_0(-c_i V) u0 enters every sweep; the exponential guess reuses it.
  std::vector<Vector> propagated(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) propagated[static_cast<std::size_t>(i)] = scheme.stage_propagator(i).apply(u0);

  std::vector<Vector> stages(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    stages[static_cast<std::size_t>(i)] =
        policy.guess == IterationPolicy::Guess::Exponential ? propagated[static_cast<std::size_t>(i)] : u0;
  }

  const int sweep_cap =
      policy.mode == IterationPolicy::Mode::FixedCount ? policy.fixed_count : policy.max_iterations;
  int iterations = 0;
  bool reached_max = false;
  std::vector<Vector> g_vals(static_cast<std::size_t>(k));

  for (int sweep = 0; sweep < sweep_cap; ++sweep) {
    for (int l = 0; l < k; ++l) {
      g_vals[static_cast<std::size_t>(l)] =
          eval_rhs(g, t0 + c[static_cast<std::size_t>(l)] * h, stages[static_cast<std::size_t>(l)]);
    }
    double residual = 0.0;
    for (int i = 0; i < k; ++i) {
      Vector next = propagated[static_cast<std::size_t>(i)];
      for (int l = 0; l < k; ++l) {
        next += h * scheme.stage_coeff(i, l).apply(g_vals[static_cast<std::size_t>(l)]);
      }
      residual = std::max(residual,
                          (next - stages[static_cast<std::size_t>(i)]).lpNorm<Eigen::Infinity>());
      stages[static_cast<std::size_t>(i)] = std::move(next);
      if (!stages[static_cast<std::size_t>(i)].allFinite() ||
          stages[static_cast<std::size_t>(i)].lpNorm<Eigen::Infinity>() > blowup) {
        throw DivergenceError("efcm_step: stage iteration diverged");
      }
    }
    ++iterations;
    if (policy.mode == IterationPolicy::Mode::Tolerance && residual <= policy.tolerance) break;
    if (policy.mode == IterationPolicy::Mode::Tolerance && iterations == sweep_cap) {
      reached_max = true;
    }
  }

  for (int l = 0; l < k; ++l) {
    g_vals[static_cast<std::size_t>(l)] =
        eval_rhs(g, t0 + c[static_cast<std::size_t>(l)] * h, stages[static_cast<std::size_t>(l)]);
  }
  Vector out = scheme.output_propagator().apply(u0);
  for (int l = 0; l < k; ++l) {
    out += h * scheme.output_coeff(l).apply(g_vals[static_cast<std::size_t>(l)]);
  }
  return {std::move(out), iterations, reached_max, std::move(stages)};
}

StepResult irk_step(const ButcherTableau& tableau, const RhsFn& f, double t0, const Vector& u0,
                    double h, const IterationPolicy& policy) {
  const int k = tableau.stages();
  const double blowup = stage_divergence_threshold(u0);

  std::vector<Vector> stages(static_cast<std::size_t>(k), u0);
  std::vector<Vector> f_vals(static_cast<std::size_t>(k));
  const int sweep_cap =
      policy.mode == IterationPolicy::Mode::FixedCount ? policy.fixed_count : policy.max_iterations;
  int iterations = 0;
  bool reached_max = false;

  for (int sweep = 0; sweep < sweep_cap; ++sweep) {
    for (int l = 0; l < k; ++l) {
      f_vals[static_cast<std::size_t>(l)] = eval_rhs(f, t0 + tableau.c(l) * h, stages[static_cast<std::size_t>(l)]);
    }
    double residual = 0.0;
    for (int i = 0; i < k; ++i) {
      Vector next = u0;
      for (int l = 0; l < k; ++l) next += h * tableau.a(i, l) * f_vals[static_cast<std::size_t>(l)];
      residual = std::max(residual,
                          (next - stages[static_cast<std::size_t>(i)]).lpNorm<Eigen::Infinity>());
      stages[static_cast<std::size_t>(i)] = std::move(next);
      if (!stages[static_cast<std::size_t>(i)].allFinite() ||
          stages[static_cast<std::size_t>(i)].lpNorm<Eigen::Infinity>() > blowup) {
        throw DivergenceError("irk_step: stage iteration diverged");
      }
    }
    ++iterations;
    if (policy.mode == IterationPolicy::Mode::Tolerance && residual <= policy.tolerance) break;
    if (policy.mode == IterationPolicy::Mode::Tolerance && iterations == sweep_cap) {
      reached_max = true;
    }
  }

  for (int l = 0; l < k; ++l) {
    f_vals[static_cast<std::size_t>(l)] = eval_rhs(f, t0 + tableau.c(l) * h, stages[static_cast<std::size_t>(l)]);
  }
  Vector out = u0;
  for (int l = 0; l < k; ++l) out += h * tableau.b(l) * f_vals[static_cast<std::size_t>(l)];
  return {std::move(out), iterations, reached_max, std::move(stages)};
}

StepKernel make_efcm_kernel(std::shared_ptr<const EfcmScheme> scheme, RhsFn g,
                            IterationPolicy policy) {
  return [scheme = std::move(scheme), g = std::move(g), policy](double t0, const Vector& u0) {
    return efcm_step(*scheme, g, t0, u0, policy);
  };
}

StepKernel make_irk_kernel(ButcherTableau tableau, RhsFn f, double h, IterationPolicy policy) {
  return [tableau = std::move(tableau), f = std::move(f), h, policy](double t0, const Vector& u0) {
    return irk_step(tableau, f, t0, u0, h, policy);
  };
}

Trajectory integrate(const StepKernel& kernel, const Vector& u0, double t_end, double h) {
  if (!(h > 0.0)) throw_invalid("integrate: stepsize must be positive");
  const double ratio = t_end / h;
  const long steps = static_cast<long>(std::llround(ratio));
  if (steps < 0 || std::abs(ratio - static_cast<double>(steps)) >
                       4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, ratio)) {
    throw_invalid("integrate: t_end must be an integer multiple of h");
  }
  Trajectory traj;
  traj.h = h;
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.iterations.reserve(static_cast<std::size_t>(steps));
  traj.states.push_back(u0);
  for (long s = 0; s < steps; ++s) {
    try {
      StepResult r = kernel(static_cast<double>(s) * h, traj.states.back());
      traj.states.push_back(std::move(r.state));
      traj.iterations.push_back(r.iterations);
      traj.total_iterations += r.iterations;
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " at step " + std::to_string(s), s);
    }
  }
  return traj;
}

double max_convergent_stepsize(double lipschitz, double c_semigroup, double omega,
                               const QuadratureRule& rule, int n) {
  if (!(lipschitz > 0.0)) throw_invalid("max_convergent_stepsize: L must be positive");
  if (c_semigroup < 1.0) throw_invalid("max_convergent_stepsize: C must be at least 1");
  if (omega < 0.0) throw_invalid("max_convergent_stepsize: omega must be nonnegative");
  if (n < 1) throw_invalid("max_convergent_stepsize: n must be at least 1");
  double max_cb = 0.0;
  for (double ci : rule.nodes) {
    for (double bj : rule.weights) max_cb = std::max(max_cb, ci * std::abs(bj));
  }
  if (max_cb == 0.0) {
    throw_invalid("max_convergent_stepsize: degenerate rule, max c_i|b_j| = 0");
  }
  const double chi = omega == 0.0 ? 1.0 : std::expm1(omega) / omega;
  return 1.0 / (lipschitz * c_semigroup * static_cast<double>(n) * n * chi * max_cb);
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kDpC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kDpA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kDpB5[7] = {35.0 / 384, 0.0,           500.0 / 1113, 125.0 / 192,
                             -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kDpB4[7] = {5179.0 / 57600,    0.0,        7571.0 / 16695, 393.0 / 640,
                             -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

class Dopri {
 public:
  Dopri(const Problem& p, double tol) : tol_(tol) {
    f_ = [&p](double t, const Vector& u) -> Vector { return p.g(t, u) - p.a.apply(u); };
  }

  // Advance from (t, u) to exactly t_target.
  void advance(double& t, Vector& u, double t_target) {
    double h = std::min(1e-2, t_target - t);
    while (t < t_target) {
      if (t + h > t_target) h = t_target - t;
      if (++evals_ > budget_) {
        throw Error(Errc::budget_exceeded, "reference_solution: step budget exceeded");
      }
      Vector k[7];
      k[0] = f_(t, u);
      for (int s = 1; s < 7; ++s) {
        Vector y = u;
        for (int j = 0; j < s; ++j) y += h * kDpA[s][j] * k[j];
        k[s] = f_(t + kDpC[s] * h, y);
      }
      Vector u5 = u, err = Vector::Zero(u.size());
      for (int s = 0; s < 7; ++s) {
        u5 += h * kDpB5[s] * k[s];
        err += h * (kDpB5[s] - kDpB4[s]) * k[s];
      }
      const double scale = tol_ * (1.0 + u.lpNorm<Eigen::Infinity>());
      const double err_norm = err.lpNorm<Eigen::Infinity>() / scale;
      if (err_norm <= 1.0) {
        t += h;
        u = std::move(u5);
      }
      const double factor = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2);
      h *= std::clamp(factor, 0.2, 5.0);
      h = std::max(h, 1e-14);
    }
  }

 private:
  RhsFn f_;
  double tol_;
  long evals_ = 0;
  static constexpr long budget_ = 10'000'000;
};

}  // namespace

Vector reference_solution(const Problem& p, double t_end, double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-6)) {
    throw_invalid("reference_solution: tol must lie in [1e-13, 1e-6]");
  }
  if (p.has_exact()) return p.exact(t_end);
  Dopri solver(p, tol);
  double t = 0.0;
  Vector u = p.u0;
  solver.advance(t, u, t_end);
  return u;
}

std::vector<Vector> reference_states(const Problem& p, const std::vector<double>& times,
                                     double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-6)) {
    throw_invalid("reference_states: tol must lie in [1e-13, 1e-6]");
  }
  std::vector<Vector> out;
  out.reserve(times.size());
  if (p.has_exact()) {
    for (double t : times) out.push_back(p.exact(t));
    return out;
  }
  Dopri solver(p, tol);
  double t = 0.0;
  Vector u = p.u0;
  for (double target : times) {
    if (target < t) throw_invalid("reference_states: times must be nondecreasing");
    if (target > t) solver.advance(t, u, target);
    out.push_back(u);
  }
  return out;
}

}  // namespace efcm
