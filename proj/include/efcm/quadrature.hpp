#pragma once

#include <vector>

namespace efcm {

/// Interpolatory quadrature rule on [0,1].
struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, in [0,1]
  std::vector<double> weights;  // same length as nodes
  int exactness = 0;            // exact for all polynomials of degree <= exactness

  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// k-point Gauss-Legendre rule on [0,1] (Golub-Welsch), exactness 2k-1.
/// Supported range 1 <= k <= 16.
QuadratureRule gauss_legendre(int k);

/// k-point right-Radau rule on [0,1] with c_k = 1, exactness 2k-2.
/// Supported range 1 <= k <= 8.
QuadratureRule radau_right(int k);

/// Largest p such that every monomial integral int_0^1 x^q dx, q <= p, is
/// reproduced to 1e-10.  Beyond degree ~16 the defect of a sharp rule drops
/// below that threshold in doubles, so the sweep is only meaningful for
/// small rules.
int measured_exactness(const QuadratureRule& rule);

}  // namespace efcm
