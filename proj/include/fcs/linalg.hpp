#pragma once

// Dense real/complex kernel: SVD, pseudoinverse, Hermitian spectra and the
// matrix norms used by the reconstruction and its error analysis.
//
// Norm conventions: frobenius_norm is the Schatten-2 norm, operator_norm_2to2
// is the spectral norm (largest singular value). Call sites name the one they
// use; error budgets are stated in Frobenius norm, perturbation lemmas in
// spectral norm.

#include <Eigen/Dense>

#include <complex>
#include <optional>

namespace fcs::linalg {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Thin SVD: a = u * diag(s) * vt with s descending.
struct SvdResult {
  RealMatrix u;   // rows x k, orthonormal columns
  RealVector s;   // k = min(rows, cols)
  RealMatrix vt;  // k x cols

  [[nodiscard]] Eigen::Index rank(double relative_threshold) const;
};

/// Full SVD additionally carrying the orthogonal complement of the column
/// space (u is rows x rows).
struct FullSvdResult {
  RealMatrix u;
  RealVector s;
  RealMatrix v;
};

SvdResult svd(const RealMatrix& a);
FullSvdResult full_svd(const RealMatrix& a);
RealVector singular_values(const RealMatrix& a);

/// Default cutoff for pseudoinverse(): max(rows, cols) * machine epsilon.
double default_pinv_tolerance(const RealMatrix& a);

/// Moore-Penrose pseudoinverse. Singular values below tol * sigma_1 are
/// treated as zero. A zero matrix maps to the zero matrix.
RealMatrix pseudoinverse(const RealMatrix& a, std::optional<double> tol = std::nullopt);

/// Spectral norm sigma_1(a); 0 for empty or zero matrices.
double operator_norm_2to2(const RealMatrix& a);
double frobenius_norm(const RealMatrix& a);
double frobenius_norm(const ComplexMatrix& a);

/// i-th largest singular value, 1-based; 0 when i exceeds min(rows, cols).
double sigma(const RealMatrix& a, Eigen::Index i);

struct HermitianEigen {
  RealVector eigenvalues;  // ascending
  ComplexMatrix eigenvectors;
};

/// Relative Hermiticity tolerance accepted by the Hermitian routines.
inline constexpr double kHermitianTolerance = 1e-8;

/// Throws PreconditionError when ||a - a^dagger||_F > 1e-8 ||a||_F.
void require_hermitian(const ComplexMatrix& a);

HermitianEigen hermitian_eigen(const ComplexMatrix& a);
RealVector hermitian_eigenvalues(const ComplexMatrix& a);

/// Schatten-1 norm of the Hermitian part (a + a^dagger) / 2. No Hermiticity
/// check: differences of validated Hermitian matrices can be tiny, where a
/// relative check is meaningless. Purely real inputs take the real
/// symmetric path.
double trace_norm_hermitian(const ComplexMatrix& a);

/// Kronecker product a (x) b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Throws DimensionError unless every entry is finite.
void require_finite(const RealMatrix& a, const char* what);

}  // namespace fcs::linalg
