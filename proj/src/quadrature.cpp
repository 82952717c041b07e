#include "efcm/quadrature.hpp"

#include "efcm/legendre.hpp"
#include "efcm/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace efcm {

namespace {

// Non-normalised Legendre P_j on [-1,1] by the standard recurrence.
double legendre_std(int j, double t) {
  if (j == 0) return 1.0;
  double pm1 = 1.0, p = t;
  for (int m = 1; m < j; ++m) {
    const double pp = ((2.0 * m + 1.0) * t * p - m * pm1) / (m + 1.0);
    pm1 = p;
    p = pp;
  }
  return p;
}

double legendre_std_deriv(int j, double t) {
  if (j == 0) return 0.0;
  // (1 - t^2) P_j' = j (P_{j-1} - t P_j)
  const double denom = 1.0 - t * t;
  if (std::abs(denom) < 1e-12) {
    // endpoint limit: P_j'(+-1) = (+-1)^{j-1} j (j+1) / 2
    const double sign = (t > 0.0) ? 1.0 : ((j % 2 == 0) ? -1.0 : 1.0);
    return sign * 0.5 * j * (j + 1.0);
  }
  return j * (legendre_std(j - 1, t) - t * legendre_std(j, t)) / denom;
}

// Interpolatory weights from the moment equations sum_i b_i c_i^p = 1/(p+1).
std::vector<double> moment_weights(const std::vector<double>& nodes) {
  const int k = static_cast<int>(nodes.size());
  Matrix vand(k, k);
  Vector rhs(k);
  for (int p = 0; p < k; ++p) {
    for (int i = 0; i < k; ++i) {
      vand(p, i) = std::pow(nodes[static_cast<std::size_t>(i)], p);
    }
    rhs(p) = 1.0 / (p + 1.0);
  }
  const Vector w = vand.fullPivLu().solve(rhs);
  return {w.data(), w.data() + k};
}

}  // namespace

QuadratureRule gauss_legendre(int k) {
  if (k < 1 || k > 16) throw_invalid("gauss_legendre: k must be in [1,16]");
  QuadratureRule rule;
  rule.exactness = 2 * k - 1;
  if (k == 1) {
    rule.nodes = {0.5};
    rule.weights = {1.0};
    return rule;
  }
  // Jacobi matrix for Legendre polynomials on [-1,1]; eigenvalues are the
  // nodes, weights come from the first eigenvector components.
  Matrix jac = Matrix::Zero(k, k);
  for (int m = 1; m < k; ++m) {
    const double beta = m / std::sqrt(4.0 * m * m - 1.0);
    jac(m, m - 1) = beta;
    jac(m - 1, m) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(jac);
  if (es.info() != Eigen::Success) {
    throw Error(Errc::internal, "gauss_legendre: eigensolve failed");
  }
  rule.nodes.resize(static_cast<std::size_t>(k));
  rule.weights.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (es.eigenvalues()(i) + 1.0);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = v0 * v0;  // total mass 1 on [0,1]
  }
  return rule;
}

QuadratureRule radau_right(int k) {
  if (k < 1 || k > 8) throw_invalid("radau_right: k must be in [1,8]");
  QuadratureRule rule;
  rule.exactness = 2 * k - 2;
  if (k == 1) {
    rule.nodes = {1.0};
    rule.weights = {1.0};
    return rule;
  }
  // Interior nodes are the roots in (0,1) of
  //   r(x) = P_k(2x-1) - P_{k-1}(2x-1);
  // x = 1 is the remaining root.  Newton from Chebyshev-spaced starting
  // points, with a sign-scan bracket as fallback; tolerance 1e-14.
  const auto radau_poly = [k](double x) {
    const double t = 2.0 * x - 1.0;
    return legendre_std(k, t) - legendre_std(k - 1, t);
  };
  const auto radau_poly_deriv = [k](double x) {
    const double t = 2.0 * x - 1.0;
    return 2.0 * (legendre_std_deriv(k, t) - legendre_std_deriv(k - 1, t));
  };

  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i < k; ++i) {
    double x = 0.5 * (1.0 - std::cos(M_PI * (2.0 * i - 1.0) / (2.0 * k - 1.0)));
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      const double f = radau_poly(x);
      const double df = radau_poly_deriv(x);
      const double dx = f / df;
      x -= dx;
      if (std::abs(dx) < 1e-14) {
        converged = true;
        break;
      }
    }
    if (!converged || !(x > 0.0 && x < 1.0)) {
      // Bracket the i-th interior root by a sign scan and bisect.
      const int samples = 64 * k;
      double lo = 0.0, hi = 0.0, prev_x = 1e-9, prev_f = radau_poly(prev_x);
      int found = 0;
      for (int s = 1; s <= samples && found < i; ++s) {
        const double xs = (1.0 - 1e-9) * s / samples;
        const double fs = radau_poly(xs);
        if (prev_f == 0.0 || prev_f * fs < 0.0) {
          ++found;
          lo = prev_x;
          hi = xs;
        }
        prev_x = xs;
        prev_f = fs;
      }
      if (found < i) throw Error(Errc::internal, "radau_right: root bracketing failed");
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (radau_poly(lo) * radau_poly(mid) <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      x = 0.5 * (lo + hi);
    }
    nodes.push_back(x);
  }
  nodes.push_back(1.0);
  std::sort(nodes.begin(), nodes.end());
  rule.nodes = nodes;
  rule.weights = moment_weights(nodes);
  return rule;
}

int measured_exactness(const QuadratureRule& rule) {
  if (rule.size() < 1 || rule.weights.size() != rule.nodes.size()) {
    throw_invalid("measured_exactness: malformed rule");
  }
  const int max_degree = 2 * rule.size() + 4;
  for (int p = 0; p <= max_degree; ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      sum += rule.weights[i] * std::pow(rule.nodes[i], p);
    }
    if (std::abs(sum - 1.0 / (p + 1.0)) > 1e-10) return p - 1;
  }
  return max_degree;
}

}  // namespace efcm
