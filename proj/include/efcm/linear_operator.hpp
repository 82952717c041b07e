#pragma once

#include "efcm/types.hpp"

namespace efcm {

/// The stiff linear part A of u' + A u = g(t, u).
///
/// Dense, diagonal or symmetric-tridiagonal storage.  The two structured
/// forms expose a spectral decomposition so matrix functions of hA can be
/// evaluated on the eigenvalues instead of through dense kernels.
class LinearOperator {
 public:
  enum class Kind { Dense, Diagonal, SymTridiagonal };

  LinearOperator() = default;  // zero operator of dimension 0

  static LinearOperator dense(Matrix a);
  static LinearOperator diagonal(Vector diag);
  static LinearOperator sym_tridiagonal(Vector diag, Vector off);
  static LinearOperator zero(int dim);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  bool has_spectral_path() const noexcept { return kind_ != Kind::Dense; }

  Vector apply(const Vector& x) const;
  Matrix to_dense() const;
  LinearOperator scaled(double s) const;
  double inf_norm() const;

  /// Orthonormal eigendecomposition A = U diag(lambda) U^T.  Only available
  /// on the spectral path; diagonal operators report the identity basis.
  struct Spectral {
    Vector lambda;
    Matrix u;             // empty when identity_basis
    bool identity_basis;  // true for diagonal operators
  };
  Spectral spectral() const;

 private:
  Kind kind_ = Kind::Diagonal;
  int dim_ = 0;
  Matrix dense_;  // Kind::Dense
  Vector diag_;   // Kind::Diagonal / Kind::SymTridiagonal
  Vector off_;    // Kind::SymTridiagonal
};

}  // namespace efcm
