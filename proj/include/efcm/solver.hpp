#pragma once

#include "efcm/problems.hpp"
#include "efcm/scheme.hpp"

#include <memory>

namespace efcm {

/// How the implicit stage equations are iterated.
struct IterationPolicy {
  enum class Mode { FixedCount, Tolerance };
  enum class Guess { InitialState, Exponential };

  Mode mode = Mode::Tolerance;
  int fixed_count = 1;          // FixedCount mode
  double tolerance = 1e-10;     // Tolerance mode, max-norm on stage increments
  int max_iterations = 100;     // Tolerance mode cap
  Guess guess = Guess::Exponential;

  static IterationPolicy fixed(int count, Guess g = Guess::Exponential);
  static IterationPolicy tol(double tolerance, int max_iterations = 100,
                             Guess g = Guess::Exponential);
  /// "tol:1e-10", "fixed:1", optional ":u0" / ":exp" guess suffix.
  static IterationPolicy parse(const std::string& text);
  std::string describe() const;
};

struct StepResult {
  Vector state;
  int iterations = 0;
  bool reached_max = false;    // tolerance mode hit max_iterations
  std::vector<Vector> stages;  // internal stage values v_i at return
};

/// One EFCM step from (t0, u0) to t0 + h.
StepResult efcm_step(const EfcmScheme& scheme, const RhsFn& g, double t0, const Vector& u0,
                     const IterationPolicy& policy);

/// One step of an implicit Runge-Kutta method on the full right-hand side
/// f(t,u) = g(t,u) - Au, stages solved by fixed-point iteration.
StepResult irk_step(const ButcherTableau& tableau, const RhsFn& f, double t0, const Vector& u0,
                    double h, const IterationPolicy& policy);

struct Trajectory {
  double h = 0.0;
  std::vector<Vector> states;      // steps + 1 entries, states[0] = u0
  std::vector<int> iterations;     // per step
  long total_iterations = 0;

  long steps() const noexcept { return static_cast<long>(iterations.size()); }
  double time(long i) const noexcept { return h * static_cast<double>(i); }
};

using StepKernel = std::function<StepResult(double, const Vector&)>;

StepKernel make_efcm_kernel(std::shared_ptr<const EfcmScheme> scheme, RhsFn g,
                            IterationPolicy policy);
StepKernel make_irk_kernel(ButcherTableau tableau, RhsFn f, double h, IterationPolicy policy);

/// Constant-stepsize march over [0, t_end]; t_end/h must be integral to
/// within one ulp.  Step failures are rethrown with the step index attached.
Trajectory integrate(const StepKernel& kernel, const Vector& u0, double t_end, double h);

/// Largest h with guaranteed fixed-point contraction:
///   1 / (L C n^2 chi(omega) max_{i,j} c_i |b_j|),  chi(w) = (e^w - 1)/w,
/// continuous at omega = 0.
double max_convergent_stepsize(double lipschitz, double c_semigroup, double omega,
                               const QuadratureRule& rule, int n);

/// High-accuracy state at t_end: the exact solution when the problem has
/// one, otherwise adaptive Dormand-Prince 5(4) on f = g - Au with
/// absolute+relative tolerance tol in [1e-13, 1e-6].
Vector reference_solution(const Problem& p, double t_end, double tol);

/// Reference states at an increasing list of sample times (single adaptive
/// march, clipped to hit each sample time).
std::vector<Vector> reference_states(const Problem& p, const std::vector<double>& times,
                                     double tol);

}  // namespace efcm
