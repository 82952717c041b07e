#pragma once

#include "efcm/linear_operator.hpp"

#include <vector>

namespace efcm {

/// e^Z by Pade scaling-and-squaring, degree 13 with the standard theta
/// thresholds (lower degrees 3/5/7/9 are used when the norm allows).
Matrix expm(const Matrix& z);

/// e^Z through the spectral path when the operator has one, dense otherwise.
Matrix expm(const LinearOperator& z);

/// phi_0(z) = e^z,  phi_k(z) = int_0^1 e^{(1-s) z} s^{k-1}/(k-1)! ds.
///
/// All indices 0..K of one matrix argument, obtained from a single
/// exponential of the augmented block matrix
///   [[Z, I, 0, ...], [0, 0, I, ...], ..., [0 ... 0]]
/// whose top block row is [e^Z, phi_1(Z), ..., phi_K(Z)].  This avoids the
/// recurrence's solve with a possibly singular Z.
class PhiBlockSet {
 public:
  PhiBlockSet(Matrix z, int max_index);

  int max_index() const noexcept { return static_cast<int>(phis_.size()) - 1; }
  int dim() const noexcept { return static_cast<int>(phis_.front().rows()); }
  const Matrix& phi(int k) const;

 private:
  std::vector<Matrix> phis_;
};

/// phi_0..phi_K at a scalar argument.  Upward recurrence
/// phi_{k+1}(z) = (phi_k(z) - 1/k!)/z for |z| >= 0.5, a 20-term series for
/// smaller |z| where the recurrence would cancel.
std::vector<double> phi_scalar(double z, int max_index);

/// Coefficient a_q of phi_{q+1}(-V) in
///   I_j(V) = sqrt(2j+1) sum_q (-1)^{j+q} (j+q)!/(q!(j-q)!) phi_{q+1}(-V).
std::vector<double> i_weight_coeffs(int j);

/// Coefficient a_q of phi_{q+1}(-cV) in
///   I_{j,c}(V) = (-1)^j sqrt(2j+1) sum_q (-c)^q (j+q)!/(q!(j-q)!) phi_{q+1}(-cV).
std::vector<double> i_weight_at_node_coeffs(int j, double c);

/// I_j(V) from a precomputed phi set of argument -V (max_index >= j+1).
Matrix i_weight(int j, const PhiBlockSet& phis_of_minus_v);
/// I_j(V) computing the phi set internally.
Matrix i_weight(int j, const LinearOperator& v);

/// I_{j,c}(V) from a precomputed phi set of argument -cV.
Matrix i_weight_at_node(int j, double c, const PhiBlockSet& phis_of_minus_cv);
/// I_{j,c}(V) computing the phi set internally.
Matrix i_weight_at_node(int j, double c, const LinearOperator& v);

}  // namespace efcm
