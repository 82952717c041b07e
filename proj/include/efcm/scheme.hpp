#pragma once

#include "efcm/linear_operator.hpp"
#include "efcm/quadrature.hpp"

#include <memory>
#include <vector>

namespace efcm {

/// Shared orthonormal eigenbasis for spectral coefficient blocks.
struct SpectralBasis {
  Matrix u;        // empty when identity
  bool identity = true;
  int dim = 0;

  Vector forward(const Vector& x) const { return identity ? x : Vector(u.transpose() * x); }
  Vector backward(const Vector& x) const { return identity ? x : Vector(u * x); }
};

/// One d x d coefficient operator, stored dense or as values on a shared
/// spectrum.
class OperatorBlock {
 public:
  static OperatorBlock dense_block(Matrix m);
  static OperatorBlock spectral_block(std::shared_ptr<const SpectralBasis> basis, Vector values);

  bool is_spectral() const noexcept { return basis_ != nullptr; }
  int dim() const noexcept;
  Vector apply(const Vector& x) const;
  Matrix to_dense() const;

 private:
  Matrix dense_;
  std::shared_ptr<const SpectralBasis> basis_;
  Vector values_;
};

/// Nodes c, matrix A-bar and weights b of a k-stage Runge-Kutta method.
struct ButcherTableau {
  Vector c;
  Matrix a;
  Vector b;

  int stages() const noexcept { return static_cast<int>(c.size()); }
};

/// The EFCM(k,n) step operator for one fixed (A, h, rule):
///   v_i   = phi_0(-c_i V) u_0 + h sum_l a_il(V) g(c_l h, v_l),
///   v(h)  = phi_0(-V) u_0    + h sum_l B_l(V)  g(c_l h, v_l),
/// with V = hA and the cached blocks
///   a_il(V) = c_i b_l sum_{j<n} I_{j,c_i}(V) P_j(c_l),
///   B_l(V)  =     b_l sum_{j<n} I_j(V)      P_j(c_l).
/// All blocks are computed once at assembly; the scheme is immutable and
/// bound to its stepsize.
class EfcmScheme {
 public:
  int stages() const noexcept { return k_; }
  int truncation() const noexcept { return n_; }
  double stepsize() const noexcept { return h_; }
  int dim() const noexcept { return dim_; }
  const QuadratureRule& rule() const noexcept { return rule_; }
  const LinearOperator& op() const noexcept { return a_; }
  bool is_spectral() const noexcept { return spectral_; }

  /// phi_0(-c_i V), 0-based stage index.
  const OperatorBlock& stage_propagator(int i) const { return e_stage_.at(static_cast<std::size_t>(i)); }
  /// phi_0(-V).
  const OperatorBlock& output_propagator() const { return e_out_; }
  /// a_il(V), 0-based indices.
  const OperatorBlock& stage_coeff(int i, int l) const {
    return a_blocks_.at(static_cast<std::size_t>(i * k_ + l));
  }
  /// B_l(V), 0-based index.
  const OperatorBlock& output_coeff(int l) const { return b_blocks_.at(static_cast<std::size_t>(l)); }

  friend EfcmScheme build_efcm(const LinearOperator&, double, int, int, const QuadratureRule&);

 private:
  int k_ = 0, n_ = 0, dim_ = 0;
  double h_ = 0.0;
  bool spectral_ = false;
  QuadratureRule rule_;
  LinearOperator a_;
  std::vector<OperatorBlock> e_stage_;
  OperatorBlock e_out_;
  std::vector<OperatorBlock> a_blocks_;  // row-major k x k
  std::vector<OperatorBlock> b_blocks_;
};

/// Assemble EFCM(k,n) for u' + Au = g with stepsize h and the given rule.
/// Requires 2 <= n <= k, a k-node rule and measured exactness degree >= n-1.
EfcmScheme build_efcm(const LinearOperator& a, double h, int k, int n, const QuadratureRule& rule);

/// HBVM(k,n) tableau: A-bar_ij = b_j sum_{l<n} P_l(c_j) int_0^{c_i} P_l.
ButcherTableau hbvm_tableau(int k, int n, const QuadratureRule& rule);

/// k-stage Gauss method (= HBVM(k,k) at Gauss nodes), k >= 2.
ButcherTableau gauss_tableau(int k);

/// k-stage Radau IIA via the W-transformation A-bar = W X_k W^{-1} with
/// W_ij = P_{j-1}(c_i) at right-Radau nodes, 1 <= k <= 8.
ButcherTableau radau_iia_tableau(int k);

}  // namespace efcm
