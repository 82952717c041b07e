#include "efcm/legendre.hpp"

#include "efcm/types.hpp"

#include <cmath>
#include <cstdint>

namespace efcm {

namespace {

// Exact C(n, k) in 64-bit integers; safe for the degrees used here.
std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

}  // namespace

LegendrePoly::LegendrePoly(int degree) : degree_(degree) {
  if (degree < 0) throw_invalid("LegendrePoly: degree must be nonnegative");
  coeffs_.resize(static_cast<std::size_t>(degree) + 1);
  const double scale = std::sqrt(2.0 * degree + 1.0);
  const int sign_j = (degree % 2 == 0) ? 1 : -1;
  for (int k = 0; k <= degree; ++k) {
    // coefficient of x^k: (-1)^{j+k} sqrt(2j+1) C(j,k) C(j+k,k)
    const std::int64_t prod = binomial(degree, k) * binomial(degree + k, k);
    const int sign_k = (k % 2 == 0) ? 1 : -1;
    coeffs_[static_cast<std::size_t>(k)] =
        sign_j * sign_k * scale * static_cast<double>(prod);
  }
}

double LegendrePoly::operator()(double x) const noexcept {
  double acc = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) {
    acc = acc * x + coeffs_[i];
  }
  return acc;
}

double legendre_eval(int j, double x) {
  if (j < 0) throw_invalid("legendre_eval: degree must be nonnegative");
  // Bonnet recurrence on P_j(2x-1); stable at all degrees, unlike the
  // monomial form whose coefficient cancellation grows like 5.8^j.
  const double t = 2.0 * x - 1.0;
  if (j == 0) return 1.0;
  double pm1 = 1.0, p = t;
  for (int m = 1; m < j; ++m) {
    const double next = ((2.0 * m + 1.0) * t * p - m * pm1) / (m + 1.0);
    pm1 = p;
    p = next;
  }
  return std::sqrt(2.0 * j + 1.0) * p;
}

double legendre_xi(int m) { return 1.0 / (2.0 * std::sqrt(4.0 * m * m - 1.0)); }

double legendre_beta(int k) { return 1.0 / (4.0 * k - 2.0); }

double legendre_antiderivative_at(int j, double x) {
  if (j < 0) throw_invalid("legendre_antiderivative_at: degree must be nonnegative");
  if (j == 0) {
    return legendre_xi(1) * legendre_eval(1, x) + 0.5;
  }
  return legendre_xi(j + 1) * legendre_eval(j + 1, x) -
         legendre_xi(j) * legendre_eval(j - 1, x);
}

}  // namespace efcm
