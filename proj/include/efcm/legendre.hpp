#pragma once

#include <vector>

namespace efcm {

/// Shifted Legendre polynomial on [0,1], orthonormal normalisation:
/// int_0^1 P_i(x) P_j(x) dx = delta_ij and deg P_j = j.
///
/// Monomial coefficients are exact binomial products evaluated in 64-bit
/// integers and cast to double once; evaluation is Horner on that form.
class LegendrePoly {
 public:
  explicit LegendrePoly(int degree);

  int degree() const noexcept { return degree_; }

  /// Coefficients in ascending powers of x, length degree()+1.
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }

  double operator()(double x) const noexcept;

 private:
  int degree_;
  std::vector<double> coeffs_;
};

/// P_j(x) for the shifted orthonormal family (cached polynomials, Horner).
double legendre_eval(int j, double x);

/// int_0^x P_j(t) dt.  Uses the exact three-term relation
///   int_0^x P_0 = xi_1 P_1(x) + P_0(x)/2,
///   int_0^x P_m = xi_{m+1} P_{m+1}(x) - xi_m P_{m-1}(x),  m >= 1.
double legendre_antiderivative_at(int j, double x);

/// xi_m = 1 / (2 sqrt(4 m^2 - 1)), m >= 1.
double legendre_xi(int m);

/// beta_k = 1 / (4 k - 2), k >= 1.
double legendre_beta(int k);

}  // namespace efcm
