#pragma once

#include <utility>

#include "risopt/types.hpp"

namespace risopt::numerics {

/// Relative tolerance used when checking that an input matrix is Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;

struct EigenDecomposition {
  RVector eigenvalues;   // descending
  CMatrix eigenvectors;  // column i pairs with eigenvalues[i]
};

/// Throws DimensionError for non-square input and SymmetryError when
/// ||A - A^H||_max exceeds `tolerance * max(1, ||A||_max)`.
void require_hermitian(const CMatrix& a, double tolerance = kHermitianTolerance);

/// Full spectral decomposition of a Hermitian matrix, eigenvalues descending.
EigenDecomposition hermitian_eig(const CMatrix& a);

/// Eigenvalues only, descending.
RVector hermitian_eigenvalues(const CMatrix& a);

/// Frobenius-nearest positive semidefinite matrix: V max(Λ,0) V^H.
CMatrix psd_project(const CMatrix& a);

/// Solves A X = B for Hermitian positive-definite A via Cholesky.
/// Throws SingularMatrixError when a pivot is not strictly positive.
CMatrix solve_hpd(const CMatrix& a, const CMatrix& b);

struct RayleighResult {
  CVector w;
  double value = 0.0;
};

/// Maximizes (noise + |a^H w|^2) / (noise + |b^H w|^2) over ||w||^2 = power.
///
/// Written as the pencil (noise/P I + a a^H, noise/P I + b b^H); the principal
/// generalized eigenvector is scaled to the power boundary.
RayleighResult generalized_rayleigh_max(const CVector& a, const CVector& b, double noise,
                                        double power);

/// Hermitian operator stored either densely or as shift*I + U diag(w) U^H.
///
/// The low-rank form keeps products and extreme eigenvalues at O(M r) and
/// O(M r^2) cost, which is what the first-order solvers rely on at large M.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  static HermitianOperator dense(CMatrix a);
  static HermitianOperator low_rank(double shift, CMatrix factors, RVector weights);

  Index dim() const { return dim_; }
  bool is_low_rank() const { return low_rank_; }

  CVector apply(const CVector& x) const;
  double quadratic_form(const CVector& x) const;
  CMatrix to_dense() const;

  double lambda_max() const;
  double lambda_min() const;

  /// Returns this + s I.
  HermitianOperator shifted(double s) const;
  /// Returns alpha * this.
  HermitianOperator scaled(double alpha) const;

  const CMatrix& dense_matrix() const { return dense_; }
  double shift() const { return shift_; }
  const CMatrix& factors() const { return factors_; }
  const RVector& weights() const { return weights_; }

 private:
  std::pair<double, double> extreme_eigenvalues() const;

  Index dim_ = 0;
  bool low_rank_ = false;
  CMatrix dense_;
  double shift_ = 0.0;
  CMatrix factors_;
  RVector weights_;
};

}  // namespace risopt::numerics
