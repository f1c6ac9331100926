#include "risopt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace risopt {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kSymmetry: return "symmetry";
    case ErrorCode::kSingular: return "singular";
    case ErrorCode::kFeasibility: return "infeasible";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNumerical: return "numerical_failure";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace risopt

namespace risopt::numerics {

void require_hermitian(const CMatrix& a, double tolerance) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError("expected a non-empty square matrix, got " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()));
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tolerance * scale) {
    throw SymmetryError("matrix is not Hermitian (max |A - A^H| = " + std::to_string(asym) + ")");
  }
}

EigenDecomposition hermitian_eig(const CMatrix& a) {
  require_hermitian(a);
  // Eigen's solver reads the lower triangle; symmetrize so tiny asymmetries
  // inside tolerance do not bias the result.
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumerical, "Hermitian eigensolver did not converge");
  }
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

RVector hermitian_eigenvalues(const CMatrix& a) {
  require_hermitian(a);
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumerical, "Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues().reverse();
}

CMatrix psd_project(const CMatrix& a) {
  const EigenDecomposition eig = hermitian_eig(a);
  const RVector clipped = eig.eigenvalues.cwiseMax(0.0);
  CMatrix out = eig.eigenvectors * clipped.asDiagonal() * eig.eigenvectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

CMatrix solve_hpd(const CMatrix& a, const CMatrix& b) {
  require_hermitian(a, 1e-10);
  if (b.rows() != a.rows()) {
    throw DimensionError("solve_hpd: right-hand side has " + std::to_string(b.rows()) +
                         " rows, expected " + std::to_string(a.rows()));
  }
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("solve_hpd: matrix is not positive definite");
  }
  // LLT reports success for tiny positive pivots; reject numerically singular input.
  const auto diag = llt.matrixLLT().diagonal().real();
  if (diag.minCoeff() <= 0.0 || diag.minCoeff() <= 1e-14 * std::sqrt(a.cwiseAbs().maxCoeff())) {
    throw SingularMatrixError("solve_hpd: Cholesky pivot is not strictly positive");
  }
  return llt.solve(b);
}

RayleighResult generalized_rayleigh_max(const CVector& a, const CVector& b, double noise,
                                        double power) {
  if (a.size() == 0 || a.size() != b.size()) {
    throw DimensionError("generalized_rayleigh_max: vectors must be non-empty and equal length");
  }
  if (!(noise > 0.0) || !(power > 0.0)) {
    throw InvalidArgument("generalized_rayleigh_max: noise and power must be positive");
  }
  const Index n = a.size();
  const double reg = noise / power;
  CMatrix num = a * a.adjoint();
  num.diagonal().array() += reg;
  CMatrix den = b * b.adjoint();
  den.diagonal().array() += reg;

  // Whiten by the Cholesky factor of the denominator pencil.
  Eigen::LLT<CMatrix> llt(den);
  const CMatrix l = llt.matrixL();
  const CMatrix linv = l.triangularView<Eigen::Lower>().solve(CMatrix::Identity(n, n));
  CMatrix whitened = linv * num * linv.adjoint();
  whitened = 0.5 * (whitened + whitened.adjoint());
  const EigenDecomposition eig = hermitian_eig(whitened);
  CVector w = linv.adjoint() * eig.eigenvectors.col(0);
  w *= std::sqrt(power) / w.norm();

  RayleighResult out;
  out.value = (noise + std::norm(a.dot(w))) / (noise + std::norm(b.dot(w)));
  out.w = std::move(w);
  return out;
}

HermitianOperator HermitianOperator::dense(CMatrix a) {
  require_hermitian(a, 1e-10);
  HermitianOperator op;
  op.dim_ = a.rows();
  op.low_rank_ = false;
  op.dense_ = 0.5 * (a + a.adjoint());
  return op;
}

HermitianOperator HermitianOperator::low_rank(double shift, CMatrix factors, RVector weights) {
  if (factors.rows() == 0 || factors.cols() != weights.size()) {
    throw DimensionError("low-rank operator: factor columns must match weight count");
  }
  HermitianOperator op;
  op.dim_ = factors.rows();
  op.low_rank_ = true;
  op.shift_ = shift;
  op.factors_ = std::move(factors);
  op.weights_ = std::move(weights);
  return op;
}

CVector HermitianOperator::apply(const CVector& x) const {
  if (x.size() != dim_) throw DimensionError("HermitianOperator::apply: size mismatch");
  if (!low_rank_) return dense_ * x;
  CVector coeff = factors_.adjoint() * x;
  coeff.array() *= weights_.array().cast<Complex>();
  return shift_ * x + factors_ * coeff;
}

double HermitianOperator::quadratic_form(const CVector& x) const {
  if (x.size() != dim_) throw DimensionError("HermitianOperator::quadratic_form: size mismatch");
  if (!low_rank_) return x.dot(dense_ * x).real();
  const CVector proj = factors_.adjoint() * x;
  return shift_ * x.squaredNorm() + (weights_.array() * proj.array().abs2()).sum();
}

CMatrix HermitianOperator::to_dense() const {
  if (!low_rank_) return dense_;
  CMatrix out = factors_ * weights_.cast<Complex>().asDiagonal() * factors_.adjoint();
  out.diagonal().array() += shift_;
  return 0.5 * (out + out.adjoint());
}

std::pair<double, double> HermitianOperator::extreme_eigenvalues() const {
  if (!low_rank_) {
    const RVector ev = hermitian_eigenvalues(dense_);
    return {ev(0), ev(ev.size() - 1)};
  }
  // U = Q R (thin); nonzero spectrum of U W U^H equals that of R W R^H.
  const Index r = factors_.cols();
  if (r == 0) return {shift_, shift_};
  Eigen::HouseholderQR<CMatrix> qr(factors_);
  const Index k = std::min<Index>(r, dim_);
  const CMatrix rr = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  CMatrix small = rr * weights_.cast<Complex>().asDiagonal() * rr.adjoint();
  small = 0.5 * (small + small.adjoint());
  const RVector ev = hermitian_eigenvalues(small);
  double hi = ev(0);
  double lo = ev(ev.size() - 1);
  if (k < dim_) {
    hi = std::max(hi, 0.0);
    lo = std::min(lo, 0.0);
  }
  return {shift_ + hi, shift_ + lo};
}

double HermitianOperator::lambda_max() const { return extreme_eigenvalues().first; }

double HermitianOperator::lambda_min() const { return extreme_eigenvalues().second; }

HermitianOperator HermitianOperator::shifted(double s) const {
  HermitianOperator out = *this;
  if (low_rank_) {
    out.shift_ += s;
  } else {
    out.dense_.diagonal().array() += s;
  }
  return out;
}

HermitianOperator HermitianOperator::scaled(double alpha) const {
  HermitianOperator out = *this;
  if (low_rank_) {
    out.shift_ *= alpha;
    out.weights_ *= alpha;
  } else {
    out.dense_ *= alpha;
  }
  return out;
}

}  // namespace risopt::numerics
