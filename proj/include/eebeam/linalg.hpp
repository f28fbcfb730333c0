#pragma once

// Small dense complex linear algebra used by the beamforming solvers:
// Hermitian eigendecomposition, inverse square root, and orthogonal
// projections onto the range / null space of a PSD matrix.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace eebeam {

using cxd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Input fails a structural precondition (non-Hermitian, bad sizes, ...).
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Matrix is singular or indefinite where positive definiteness is required.
class rank_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Eigenvalues sorted descending; eigenvectors[i] (column) pairs with
// eigenvalues[i] and the column set is unitary.
struct EigenDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;
};

inline bool is_finite(const CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  }
  return true;
}

inline void require_hermitian(const CMatrix& a, double tol = 1e-12) {
  if (a.rows() != a.cols()) throw validation_error("matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol * scale) throw validation_error("matrix is not Hermitian within tolerance");
}

// Hermitian eigendecomposition, eigenvalues sorted descending.
inline EigenDecomposition eig_hermitian(const CMatrix& a) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (a + a.adjoint()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Eigen::Index m = a.rows();
  EigenDecomposition d;
  d.eigenvalues = solver.eigenvalues().reverse();
  d.eigenvectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) d.eigenvectors.col(i) = solver.eigenvectors().col(m - 1 - i);
  return d;
}

// An eigenvalue counts as positive iff it exceeds 1e-10 * max(lambda_max, 1).
inline double rank_threshold(const EigenDecomposition& d) {
  const double lmax = d.eigenvalues.size() > 0 ? d.eigenvalues[0] : 0.0;
  return 1e-10 * std::max(lmax, 1.0);
}

inline Eigen::Index positive_rank(const EigenDecomposition& d) {
  const double thresh = rank_threshold(d);
  Eigen::Index r = 0;
  while (r < d.eigenvalues.size() && d.eigenvalues[r] > thresh) ++r;
  return r;
}

// Inverse matrix square root of a positive definite Hermitian matrix.
// Result R satisfies R*a*R = I. Throws rank_error if a is singular or
// indefinite under the relative rank threshold.
inline CMatrix inv_sqrt(const CMatrix& a) {
  const EigenDecomposition d = eig_hermitian(a);
  if (positive_rank(d) != a.rows()) throw rank_error("matrix is not positive definite");
  RVector inv_sqrt_vals = d.eigenvalues.cwiseSqrt().cwiseInverse();
  CMatrix r = d.eigenvectors * inv_sqrt_vals.asDiagonal() * d.eigenvectors.adjoint();
  return 0.5 * (r + r.adjoint());
}

// Orthogonal projection of v onto the span of the leading `rank` eigenvectors.
inline CVector project_onto_range(const EigenDecomposition& d, Eigen::Index rank, const CVector& v) {
  if (rank < 0 || rank > d.eigenvectors.cols()) throw validation_error("rank out of range");
  if (rank == 0) return CVector::Zero(v.size());
  const auto u1 = d.eigenvectors.leftCols(rank);
  return u1 * (u1.adjoint() * v);
}

// Complement of project_onto_range: projection onto the null space.
inline CVector project_onto_null(const EigenDecomposition& d, Eigen::Index rank, const CVector& v) {
  return v - project_onto_range(d, rank, v);
}

}  // namespace eebeam
