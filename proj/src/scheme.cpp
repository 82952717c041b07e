#include "efcm/scheme.hpp"

#include "efcm/legendre.hpp"
#include "efcm/matfun.hpp"

#include <cmath>

namespace efcm {

OperatorBlock OperatorBlock::dense_block(Matrix m) {
  OperatorBlock b;
  b.dense_ = std::move(m);
  return b;
}

OperatorBlock OperatorBlock::spectral_block(std::shared_ptr<const SpectralBasis> basis,
                                            Vector values) {
  if (!basis || basis->dim != values.size()) {
    throw_invalid("OperatorBlock: basis/value size mismatch");
  }
  OperatorBlock b;
  b.basis_ = std::move(basis);
  b.values_ = std::move(values);
  return b;
}

int OperatorBlock::dim() const noexcept {
  return basis_ ? basis_->dim : static_cast<int>(dense_.rows());
}

Vector OperatorBlock::apply(const Vector& x) const {
  if (!basis_) return dense_ * x;
  return basis_->backward(values_.cwiseProduct(basis_->forward(x)));
}

Matrix OperatorBlock::to_dense() const {
  if (!basis_) return dense_;
  if (basis_->identity) return values_.asDiagonal();
  return basis_->u * values_.asDiagonal() * basis_->u.transpose();
}

namespace {

void check_shape(int k, int n, const QuadratureRule& rule) {
  if (n < 2) throw_invalid("EFCM: truncation n must be at least 2");
  if (n > k) throw_invalid("EFCM: truncation n must not exceed stage count k");
  if (rule.size() != k) throw_invalid("EFCM: rule must have k nodes");
  const int m = measured_exactness(rule) + 1;
  if (m < n) {
    throw Error(Errc::exactness_violation,
                "EFCM: quadrature exactness m = " + std::to_string(m) +
                    " is below the truncation n = " + std::to_string(n));
  }
}

}  // namespace

EfcmScheme build_efcm(const LinearOperator& a, double h, int k, int n,
                      const QuadratureRule& rule) {
  if (h <= 0.0) throw_invalid("build_efcm: stepsize must be positive");
  check_shape(k, n, rule);

  EfcmScheme s;
  s.k_ = k;
  s.n_ = n;
  s.h_ = h;
  s.dim_ = a.dim();
  s.rule_ = rule;
  s.a_ = a;
  s.spectral_ = a.has_spectral_path();

  const auto& c = rule.nodes;
  const auto& b = rule.weights;

  // P_j(c_l) table, j = 0..n-1.
  Matrix pjcl(n, k);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < k; ++l) {
      pjcl(j, l) = legendre_eval(j, c[static_cast<std::size_t>(l)]);
    }
  }

  if (s.spectral_) {
    const auto spec = a.spectral();
    auto basis = std::make_shared<SpectralBasis>();
    basis->identity = spec.identity_basis;
    basis->u = spec.u;
    basis->dim = s.dim_;
    const Vector hl = h * spec.lambda;  // eigenvalues of V

    // Per stage node: scalar phi values on the spectrum of -c_i V.
    auto phi_table = [&](double ci) {
      Matrix t(n + 1, s.dim_);
      for (int e = 0; e < s.dim_; ++e) {
        const auto vals = phi_scalar(-ci * hl(e), n);
        for (int q = 0; q <= n; ++q) t(q, e) = vals[static_cast<std::size_t>(q)];
      }
      return t;
    };

    for (int i = 0; i < k; ++i) {
      const double ci = c[static_cast<std::size_t>(i)];
      const Matrix phis = phi_table(ci);
      s.e_stage_.push_back(OperatorBlock::spectral_block(basis, phis.row(0).transpose()));
      // I_{j,c_i}(V) values on the spectrum.
      Matrix ivals = Matrix::Zero(n, s.dim_);
      for (int j = 0; j < n; ++j) {
        const auto coeffs = i_weight_at_node_coeffs(j, ci);
        for (int q = 0; q <= j; ++q) {
          ivals.row(j) += coeffs[static_cast<std::size_t>(q)] * phis.row(q + 1);
        }
      }
      for (int l = 0; l < k; ++l) {
        Vector vals = Vector::Zero(s.dim_);
        for (int j = 0; j < n; ++j) {
          vals += pjcl(j, l) * ivals.row(j).transpose();
        }
        vals *= ci * b[static_cast<std::size_t>(l)];
        s.a_blocks_.push_back(OperatorBlock::spectral_block(basis, std::move(vals)));
      }
    }

    const Matrix phis = phi_table(1.0);
    s.e_out_ = OperatorBlock::spectral_block(basis, phis.row(0).transpose());
    Matrix ivals = Matrix::Zero(n, s.dim_);
    for (int j = 0; j < n; ++j) {
      const auto coeffs = i_weight_coeffs(j);
      for (int q = 0; q <= j; ++q) {
        ivals.row(j) += coeffs[static_cast<std::size_t>(q)] * phis.row(q + 1);
      }
    }
    for (int l = 0; l < k; ++l) {
      Vector vals = Vector::Zero(s.dim_);
      for (int j = 0; j < n; ++j) vals += pjcl(j, l) * ivals.row(j).transpose();
      vals *= b[static_cast<std::size_t>(l)];
      s.b_blocks_.push_back(OperatorBlock::spectral_block(basis, std::move(vals)));
    }
    return s;
  }

  // Dense path: one augmented exponential per stage node plus the output.
  const Matrix v = h * a.to_dense();
  for (int i = 0; i < k; ++i) {
    const double ci = c[static_cast<std::size_t>(i)];
    const PhiBlockSet phis(-ci * v, n);
    s.e_stage_.push_back(OperatorBlock::dense_block(phis.phi(0)));
    std::vector<Matrix> iw;
    iw.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) iw.push_back(i_weight_at_node(j, ci, phis));
    for (int l = 0; l < k; ++l) {
      Matrix blk = Matrix::Zero(s.dim_, s.dim_);
      for (int j = 0; j < n; ++j) blk += pjcl(j, l) * iw[static_cast<std::size_t>(j)];
      blk *= ci * b[static_cast<std::size_t>(l)];
      s.a_blocks_.push_back(OperatorBlock::dense_block(std::move(blk)));
    }
  }
  const PhiBlockSet phis(-v, n);
  s.e_out_ = OperatorBlock::dense_block(phis.phi(0));
  std::vector<Matrix> iw;
  iw.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) iw.push_back(i_weight(j, phis));
  for (int l = 0; l < k; ++l) {
    Matrix blk = Matrix::Zero(s.dim_, s.dim_);
    for (int j = 0; j < n; ++j) blk += pjcl(j, l) * iw[static_cast<std::size_t>(j)];
    blk *= b[static_cast<std::size_t>(l)];
    s.b_blocks_.push_back(OperatorBlock::dense_block(std::move(blk)));
  }
  return s;
}

ButcherTableau hbvm_tableau(int k, int n, const QuadratureRule& rule) {
  check_shape(k, n, rule);
  ButcherTableau t;
  t.c = Eigen::Map<const Vector>(rule.nodes.data(), k);
  t.b = Eigen::Map<const Vector>(rule.weights.data(), k);
  t.a = Matrix::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double sum = 0.0;
      for (int l = 0; l < n; ++l) {
        sum += legendre_eval(l, t.c(j)) * legendre_antiderivative_at(l, t.c(i));
      }
      t.a(i, j) = t.b(j) * sum;
    }
  }
  return t;
}

ButcherTableau gauss_tableau(int k) { return hbvm_tableau(k, k, gauss_legendre(k)); }

ButcherTableau radau_iia_tableau(int k) {
  if (k < 1 || k > 8) throw_invalid("radau_iia_tableau: k must be in [1,8]");
  const QuadratureRule rule = radau_right(k);
  ButcherTableau t;
  t.c = Eigen::Map<const Vector>(rule.nodes.data(), k);
  t.b = Eigen::Map<const Vector>(rule.weights.data(), k);

  Matrix w(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) w(i, j) = legendre_eval(j, t.c(i));
  }
  // X_k: column j holds int_0^x P_{j-1} in the P basis; the trailing
  // xi_k P_k term collapses onto P_{k-1} at Radau nodes via beta_k.
  Matrix x = Matrix::Zero(k, k);
  x(0, 0) = 0.5;
  for (int m = 1; m < k; ++m) {
    x(m, m - 1) = legendre_xi(m);
    x(m - 1, m) = -legendre_xi(m);
  }
  x(k - 1, k - 1) += legendre_beta(k);

  Eigen::FullPivLU<Matrix> lu(w);
  if (!lu.isInvertible()) {
    throw Error(Errc::internal, "radau_iia_tableau: singular collocation matrix");
  }
  t.a = w * x * lu.inverse();
  return t;
}

}  // namespace efcm
