#include "efcm/problems.hpp"

#include <cmath>

namespace efcm {

Problem henon_heiles() {
  Problem p;
  p.name = "henon-heiles";
  p.dim = 4;
  Matrix a(4, 4);
  a << 0, 0, -1, 0,  //
      0, 0, 0, -1,   //
      1, 0, 0, 0,    //
      0, 1, 0, 0;
  p.a = LinearOperator::dense(a);
  p.g = [](double, const Vector& u) {
    Vector out(4);
    out(0) = 0.0;
    out(1) = 0.0;
    out(2) = -2.0 * u(0) * u(1);
    out(3) = -u(0) * u(0) + u(1) * u(1);
    return out;
  };
  p.u0 = Vector(4);
  p.u0 << std::sqrt(11.0 / 96.0), 0.0, 0.0, 0.25;
  p.default_t_end = 10.0;
  p.hamiltonian = [](const Vector& u) {
    const double q1 = u(0), q2 = u(1), p1 = u(2), p2 = u(3);
    return 0.5 * (p1 * p1 + p2 * p2) + 0.5 * (q1 * q1 + q2 * q2) + q1 * q1 * q2 -
           q2 * q2 * q2 / 3.0;
  };
  p.hamiltonian_grad = [](const Vector& u) {
    const double q1 = u(0), q2 = u(1);
    Vector grad(4);
    grad(0) = q1 + 2.0 * q1 * q2;
    grad(1) = q2 + q1 * q1 - q2 * q2;
    grad(2) = u(2);
    grad(3) = u(3);
    return grad;
  };
  Matrix j = Matrix::Zero(4, 4);
  j(0, 2) = 1.0;
  j(1, 3) = 1.0;
  j(2, 0) = -1.0;
  j(3, 1) = -1.0;
  p.structure_j = j;
  return p;
}

namespace {

// The FPU interaction terms as printed in the model's Hamiltonian:
// T_0 = x_1 - x_{m+1}, T_i = x_{i+1} - x_{m+i-1} - x_i - x_{m+i} for
// i = 1..m-1, T_m = x_m + x_{2m}.  All indices 1-based.
std::vector<double> fpu_terms(int m, const Vector& x) {
  std::vector<double> t(static_cast<std::size_t>(m) + 1);
  t[0] = x(0) - x(m);
  for (int i = 1; i < m; ++i) {
    t[static_cast<std::size_t>(i)] = x(i) - x(m + i - 2) - x(i - 1) - x(m + i - 1);
  }
  t[static_cast<std::size_t>(m)] = x(m - 1) + x(2 * m - 1);
  return t;
}

double fpu_potential(int m, const Vector& x) {
  const auto t = fpu_terms(m, x);
  double u = 0.0;
  for (double v : t) u += v * v * v * v;
  return 0.25 * u;
}

Vector fpu_potential_grad(int m, const Vector& x) {
  const auto t = fpu_terms(m, x);
  Vector grad = Vector::Zero(2 * m);
  const auto add = [&](int idx0, double v) { grad(idx0) += v; };
  const double t0 = t[0] * t[0] * t[0];
  add(0, t0);
  add(m, -t0);
  for (int i = 1; i < m; ++i) {
    const double ti = std::pow(t[static_cast<std::size_t>(i)], 3);
    add(i, ti);
    add(m + i - 2, -ti);
    add(i - 1, -ti);
    add(m + i - 1, -ti);
  }
  const double tm = std::pow(t[static_cast<std::size_t>(m)], 3);
  add(m - 1, tm);
  add(2 * m - 1, tm);
  return grad;
}

}  // namespace

Problem fpu(int m, double omega) {
  if (m < 1) throw_invalid("fpu: m must be at least 1");
  if (!(omega > 0.0)) throw_invalid("fpu: omega must be positive");
  Problem p;
  p.name = "fpu";
  const int half = 2 * m;
  p.dim = 4 * m;

  Matrix a = Matrix::Zero(p.dim, p.dim);
  a.topRightCorner(half, half) = -Matrix::Identity(half, half);
  for (int i = 0; i < m; ++i) a(half + m + i, m + i) = omega * omega;
  p.a = LinearOperator::dense(a);

  p.g = [m, half](double, const Vector& u) {
    Vector out = Vector::Zero(2 * half);
    out.tail(half) = -fpu_potential_grad(m, u.head(half));
    return out;
  };

  p.u0 = Vector::Zero(p.dim);
  p.u0(0) = 1.0;           // x_1
  p.u0(m) = 1.0 / omega;   // x_{m+1}
  p.u0(half) = 1.0;        // y_1
  p.u0(half + m) = 1.0;    // y_{m+1}
  p.default_t_end = 10.0;

  p.hamiltonian = [m, half, omega](const Vector& u) {
    const Vector x = u.head(half), y = u.tail(half);
    double h = 0.5 * y.squaredNorm();
    h += 0.5 * omega * omega * x.segment(m, m).squaredNorm();
    h += fpu_potential(m, x);
    return h;
  };
  p.hamiltonian_grad = [m, half, omega](const Vector& u) {
    const Vector x = u.head(half);
    Vector grad(2 * half);
    grad.head(half) = fpu_potential_grad(m, x);
    grad.segment(m, m) += omega * omega * x.segment(m, m);
    grad.tail(half) = u.tail(half);
    return grad;
  };
  Matrix j = Matrix::Zero(p.dim, p.dim);
  j.topRightCorner(half, half) = Matrix::Identity(half, half);
  j.bottomLeftCorner(half, half) = -Matrix::Identity(half, half);
  p.structure_j = j;
  return p;
}

Problem semilinear_heat(int n_interior) {
  if (n_interior < 3) throw_invalid("semilinear_heat: need at least 3 interior points");
  Problem p;
  p.name = "heat";
  const int n = n_interior;
  p.dim = n;
  const double dx = 1.0 / (n + 1);
  const double scale = 1.0 / (dx * dx);
  p.a = LinearOperator::sym_tridiagonal(Vector::Constant(n, 2.0 * scale),
                                        Vector::Constant(n - 1, -scale));

  Vector grid(n);
  for (int i = 0; i < n; ++i) grid(i) = (i + 1) * dx;

  p.g = [grid](double t, const Vector& u) {
    const double et = std::exp(t);
    Vector out(u.size());
    for (int i = 0; i < u.size(); ++i) {
      const double x = grid(i);
      const double w = x * (1.0 - x) * et;  // exact solution value
      // Phi(x,t) = x(1-x)e^t + 2e^t - 1/(1 + (x(1-x)e^t)^2)
      const double phi = w + 2.0 * et - 1.0 / (1.0 + w * w);
      out(i) = 1.0 / (1.0 + u(i) * u(i)) + phi;
    }
    return out;
  };

  p.u0 = grid.array() * (1.0 - grid.array());
  p.default_t_end = 1.0;
  p.exact = [grid](double t) {
    return Vector((grid.array() * (1.0 - grid.array())) * std::exp(t));
  };
  return p;
}

double energy(const Problem& p, const Vector& u) {
  if (!p.has_hamiltonian()) {
    throw Error(Errc::structure_absent, "energy: problem '" + p.name + "' has no Hamiltonian");
  }
  return p.hamiltonian(u);
}

double quadratic_invariant(const Problem& p, const Vector& u) {
  if (!p.has_quadratic_invariant()) {
    throw Error(Errc::structure_absent,
                "quadratic_invariant: problem '" + p.name + "' has no invariant matrix");
  }
  return u.dot(p.invariant_c * u);
}

Problem make_problem(const std::string& name, const std::map<std::string, double>& opts) {
  const auto opt = [&opts](const std::string& key, double fallback) {
    const auto it = opts.find(key);
    return it == opts.end() ? fallback : it->second;
  };
  if (name == "henon-heiles") return henon_heiles();
  if (name == "fpu") {
    return fpu(static_cast<int>(opt("m", 3)), opt("omega", 50.0));
  }
  if (name == "heat") {
    return semilinear_heat(static_cast<int>(opt("N", 200)));
  }
  throw_invalid("unknown problem '" + name + "' (expected henon-heiles, fpu or heat)");
}

std::vector<std::string> problem_names() { return {"henon-heiles", "fpu", "heat"}; }

}  // namespace efcm
