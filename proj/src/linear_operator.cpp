#include "efcm/linear_operator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace efcm {

LinearOperator LinearOperator::dense(Matrix a) {
  if (a.rows() != a.cols()) throw_invalid("LinearOperator::dense: matrix must be square");
  if (!a.allFinite()) throw_invalid("LinearOperator::dense: non-finite entries");
  LinearOperator op;
  op.kind_ = Kind::Dense;
  op.dim_ = static_cast<int>(a.rows());
  op.dense_ = std::move(a);
  return op;
}

LinearOperator LinearOperator::diagonal(Vector diag) {
  if (!diag.allFinite()) throw_invalid("LinearOperator::diagonal: non-finite entries");
  LinearOperator op;
  op.kind_ = Kind::Diagonal;
  op.dim_ = static_cast<int>(diag.size());
  op.diag_ = std::move(diag);
  return op;
}

LinearOperator LinearOperator::sym_tridiagonal(Vector diag, Vector off) {
  if (off.size() + 1 != diag.size()) {
    throw_invalid("LinearOperator::sym_tridiagonal: off-diagonal must have length dim-1");
  }
  if (!diag.allFinite() || !off.allFinite()) {
    throw_invalid("LinearOperator::sym_tridiagonal: non-finite entries");
  }
  LinearOperator op;
  op.kind_ = Kind::SymTridiagonal;
  op.dim_ = static_cast<int>(diag.size());
  op.diag_ = std::move(diag);
  op.off_ = std::move(off);
  return op;
}

LinearOperator LinearOperator::zero(int dim) {
  if (dim < 0) throw_invalid("LinearOperator::zero: negative dimension");
  return diagonal(Vector::Zero(dim));
}

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != dim_) throw_invalid("LinearOperator::apply: dimension mismatch");
  switch (kind_) {
    case Kind::Dense:
      return dense_ * x;
    case Kind::Diagonal:
      return diag_.cwiseProduct(x);
    case Kind::SymTridiagonal: {
      Vector y = diag_.cwiseProduct(x);
      for (int i = 0; i + 1 < dim_; ++i) {
        y(i) += off_(i) * x(i + 1);
        y(i + 1) += off_(i) * x(i);
      }
      return y;
    }
  }
  throw Error(Errc::internal, "LinearOperator::apply: bad kind");
}

Matrix LinearOperator::to_dense() const {
  switch (kind_) {
    case Kind::Dense:
      return dense_;
    case Kind::Diagonal:
      return diag_.asDiagonal();
    case Kind::SymTridiagonal: {
      Matrix m = Matrix::Zero(dim_, dim_);
      m.diagonal() = diag_;
      for (int i = 0; i + 1 < dim_; ++i) {
        m(i, i + 1) = off_(i);
        m(i + 1, i) = off_(i);
      }
      return m;
    }
  }
  throw Error(Errc::internal, "LinearOperator::to_dense: bad kind");
}

LinearOperator LinearOperator::scaled(double s) const {
  switch (kind_) {
    case Kind::Dense:
      return dense(s * dense_);
    case Kind::Diagonal:
      return diagonal(s * diag_);
    case Kind::SymTridiagonal:
      return sym_tridiagonal(s * diag_, s * off_);
  }
  throw Error(Errc::internal, "LinearOperator::scaled: bad kind");
}

double LinearOperator::inf_norm() const {
  const Matrix m = to_dense();
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

LinearOperator::Spectral LinearOperator::spectral() const {
  Spectral s;
  switch (kind_) {
    case Kind::Diagonal:
      s.lambda = diag_;
      s.identity_basis = true;
      return s;
    case Kind::SymTridiagonal: {
      Eigen::SelfAdjointEigenSolver<Matrix> es;
      es.computeFromTridiagonal(diag_, off_, Eigen::ComputeEigenvectors);
      if (es.info() != Eigen::Success) {
        throw Error(Errc::internal, "LinearOperator::spectral: eigensolve failed");
      }
      s.lambda = es.eigenvalues();
      s.u = es.eigenvectors();
      s.identity_basis = false;
      return s;
    }
    case Kind::Dense:
      throw_invalid("LinearOperator::spectral: dense operators have no spectral path");
  }
  throw Error(Errc::internal, "LinearOperator::spectral: bad kind");
}

}  // namespace efcm
