#pragma once

#include "efcm/linear_operator.hpp"

#include <map>
#include <string>
#include <vector>

namespace efcm {

/// Benchmark problem in the u' + A u = g(t, u) splitting, with the
/// structural extras (exact solution, Hamiltonian, quadratic invariant)
/// filled in where they exist.
struct Problem {
  std::string name;
  int dim = 0;
  LinearOperator a;
  RhsFn g;
  Vector u0;
  double default_t_end = 1.0;

  std::function<Vector(double)> exact;                  // u(t), optional
  std::function<double(const Vector&)> hamiltonian;     // H(u), optional
  std::function<Vector(const Vector&)> hamiltonian_grad;
  Matrix structure_j;      // skew J with u' = J grad H, empty if absent
  Matrix invariant_c;      // symmetric C with Q = u^T C u, empty if absent

  bool has_exact() const { return static_cast<bool>(exact); }
  bool has_hamiltonian() const { return static_cast<bool>(hamiltonian); }
  bool has_quadratic_invariant() const { return invariant_c.size() > 0; }
};

/// Henon-Heiles model, d = 4, H = (p1^2+p2^2)/2 + (q1^2+q2^2)/2 + q1^2 q2 - q2^3/3.
Problem henon_heiles();

/// Fermi-Pasta-Ulam chain with m stiff springs of frequency omega, d = 4m.
Problem fpu(int m = 3, double omega = 50.0);

/// Semilinear heat equation u_t = u_xx + 1/(1+u^2) + source on [0,1],
/// homogeneous Dirichlet, second-order central differences on n interior
/// points.  The source is chosen so u(x,t) = x(1-x)e^t exactly.
Problem semilinear_heat(int n_interior);

/// H(u); throws Errc::structure_absent when the problem has no Hamiltonian.
double energy(const Problem& p, const Vector& u);

/// u^T C u; throws Errc::structure_absent when no invariant matrix is set.
double quadratic_invariant(const Problem& p, const Vector& u);

/// Registry lookup: "henon-heiles", "fpu" (m, omega), "heat" (N).
Problem make_problem(const std::string& name, const std::map<std::string, double>& opts = {});

std::vector<std::string> problem_names();

}  // namespace efcm
