#include "efcm/matfun.hpp"

#include <cmath>
#include <cstdint>

namespace efcm {

namespace {

// Pade coefficients for [m/m] approximants of e^x (Higham 2005).
constexpr double kPade3[] = {120.0, 60.0, 12.0, 1.0};
constexpr double kPade5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr double kPade7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                             25200.0,    1512.0,    56.0,      1.0};
constexpr double kPade9[] = {17643225600.0, 8821612800.0, 2075673600.0,
                             302702400.0,   30270240.0,   2162160.0,
                             110880.0,      3960.0,       90.0,
                             1.0};
constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0,
                              7771770303897600.0,  1187353796428800.0,
                              129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,
                              1323241920.0,        40840800.0,
                              960960.0,            16380.0,
                              182.0,               1.0};

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

Matrix pade_solve(const Matrix& u, const Matrix& v) {
  // r = (v - u)^{-1} (v + u)
  return (v - u).partialPivLu().solve(v + u);
}

template <std::size_t N>
Matrix pade_low_order(const Matrix& a, const double (&c)[N]) {
  const auto d = a.rows();
  const Matrix a2 = a * a;
  Matrix u = c[1] * Matrix::Identity(d, d);
  Matrix v = c[0] * Matrix::Identity(d, d);
  Matrix pow = a2;
  for (std::size_t i = 2; i + 1 < N; i += 2) {
    v += c[i] * pow;
    u += c[i + 1] * pow;
    if (i + 3 < N) pow = pow * a2;
  }
  u = a * u;
  return pade_solve(u, v);
}

Matrix pade13(const Matrix& a) {
  const auto d = a.rows();
  const double* c = kPade13;
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u =
      a * (a6 * (c[13] * a6 + c[11] * a4 + c[9] * a2) + c[7] * a6 + c[5] * a4 +
           c[3] * a2 + c[1] * Matrix::Identity(d, d));
  const Matrix v = a6 * (c[12] * a6 + c[10] * a4 + c[8] * a2) + c[6] * a6 +
                   c[4] * a4 + c[2] * a2 + c[0] * Matrix::Identity(d, d);
  return pade_solve(u, v);
}

std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// (j+q)! / (q! (j-q)!) in exact integer arithmetic.
double falling_coeff(int j, int q) {
  std::int64_t num = 1;
  for (int t = j - q + 1; t <= j + q; ++t) num *= t;  // (j+q)!/(j-q)!
  return static_cast<double>(num) / static_cast<double>(factorial(q));
}

}  // namespace

Matrix expm(const Matrix& z) {
  if (z.rows() != z.cols()) throw_invalid("expm: matrix must be square");
  if (!z.allFinite()) throw_invalid("expm: non-finite entries");
  if (z.rows() == 0) return Matrix(0, 0);

  const double norm = z.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  if (norm <= kTheta3) return pade_low_order(z, kPade3);
  if (norm <= kTheta5) return pade_low_order(z, kPade5);
  if (norm <= kTheta7) return pade_low_order(z, kPade7);
  if (norm <= kTheta9) return pade_low_order(z, kPade9);

  int squarings = 0;
  double scaled_norm = norm;
  while (scaled_norm > kTheta13) {
    scaled_norm *= 0.5;
    ++squarings;
  }
  Matrix r = pade13(z * std::ldexp(1.0, -squarings));
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

Matrix expm(const LinearOperator& z) {
  if (!z.has_spectral_path()) return expm(z.to_dense());
  const auto spec = z.spectral();
  const Vector e = spec.lambda.array().exp();
  if (spec.identity_basis) return e.asDiagonal();
  return spec.u * e.asDiagonal() * spec.u.transpose();
}

PhiBlockSet::PhiBlockSet(Matrix z, int max_index) {
  if (z.rows() != z.cols()) throw_invalid("PhiBlockSet: matrix must be square");
  if (max_index < 0) throw_invalid("PhiBlockSet: max index must be nonnegative");
  const int d = static_cast<int>(z.rows());
  phis_.reserve(static_cast<std::size_t>(max_index) + 1);
  if (max_index == 0) {
    phis_.push_back(expm(z));
    return;
  }
  const int aug = d * (max_index + 1);
  Matrix m = Matrix::Zero(aug, aug);
  m.topLeftCorner(d, d) = z;
  for (int blk = 0; blk < max_index; ++blk) {
    m.block(blk * d, (blk + 1) * d, d, d) = Matrix::Identity(d, d);
  }
  const Matrix em = expm(m);
  for (int k = 0; k <= max_index; ++k) {
    phis_.push_back(em.block(0, k * d, d, d));
  }
}

const Matrix& PhiBlockSet::phi(int k) const {
  if (k < 0 || k > max_index()) throw_invalid("PhiBlockSet::phi: index out of range");
  return phis_[static_cast<std::size_t>(k)];
}

std::vector<double> phi_scalar(double z, int max_index) {
  if (max_index < 0) throw_invalid("phi_scalar: max index must be nonnegative");
  std::vector<double> out(static_cast<std::size_t>(max_index) + 1);
  out[0] = std::exp(z);
  if (std::abs(z) >= 0.5) {
    double inv_fact = 1.0;  // 1/k!
    for (int k = 0; k < max_index; ++k) {
      out[static_cast<std::size_t>(k) + 1] = (out[static_cast<std::size_t>(k)] - inv_fact) / z;
      inv_fact /= (k + 1.0);
    }
  } else {
    for (int k = 1; k <= max_index; ++k) {
      // phi_k(z) = sum_{i>=0} z^i / (i+k)!
      double term = 1.0 / static_cast<double>(factorial(k));
      double sum = term;
      for (int i = 1; i < 20; ++i) {
        term *= z / (i + k);
        sum += term;
      }
      out[static_cast<std::size_t>(k)] = sum;
    }
  }
  return out;
}

std::vector<double> i_weight_coeffs(int j) {
  if (j < 0) throw_invalid("i_weight_coeffs: index must be nonnegative");
  const double scale = std::sqrt(2.0 * j + 1.0);
  std::vector<double> coeffs(static_cast<std::size_t>(j) + 1);
  for (int q = 0; q <= j; ++q) {
    const double sign = ((j + q) % 2 == 0) ? 1.0 : -1.0;
    coeffs[static_cast<std::size_t>(q)] = sign * scale * falling_coeff(j, q);
  }
  return coeffs;
}

std::vector<double> i_weight_at_node_coeffs(int j, double c) {
  if (j < 0) throw_invalid("i_weight_at_node_coeffs: index must be nonnegative");
  const double scale = (j % 2 == 0 ? 1.0 : -1.0) * std::sqrt(2.0 * j + 1.0);
  std::vector<double> coeffs(static_cast<std::size_t>(j) + 1);
  double cpow = 1.0;  // (-c)^q
  for (int q = 0; q <= j; ++q) {
    coeffs[static_cast<std::size_t>(q)] = scale * cpow * falling_coeff(j, q);
    cpow *= -c;
  }
  return coeffs;
}

Matrix i_weight(int j, const PhiBlockSet& phis) {
  if (phis.max_index() < j + 1) {
    throw_invalid("i_weight: phi set too short for requested index");
  }
  const auto coeffs = i_weight_coeffs(j);
  Matrix acc = Matrix::Zero(phis.dim(), phis.dim());
  for (int q = 0; q <= j; ++q) {
    acc += coeffs[static_cast<std::size_t>(q)] * phis.phi(q + 1);
  }
  return acc;
}

Matrix i_weight(int j, const LinearOperator& v) {
  return i_weight(j, PhiBlockSet(-v.to_dense(), j + 1));
}

Matrix i_weight_at_node(int j, double c, const PhiBlockSet& phis) {
  if (phis.max_index() < j + 1) {
    throw_invalid("i_weight_at_node: phi set too short for requested index");
  }
  const auto coeffs = i_weight_at_node_coeffs(j, c);
  Matrix acc = Matrix::Zero(phis.dim(), phis.dim());
  for (int q = 0; q <= j; ++q) {
    acc += coeffs[static_cast<std::size_t>(q)] * phis.phi(q + 1);
  }
  return acc;
}

Matrix i_weight_at_node(int j, double c, const LinearOperator& v) {
  return i_weight_at_node(j, c, PhiBlockSet(-c * v.to_dense(), j + 1));
}

}  // namespace efcm
