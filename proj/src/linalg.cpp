#include "fcs/linalg.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fcs::linalg {

namespace {

template <typename Solver>
void require_converged(const Solver& solver, const RealMatrix& a) {
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError(
        fmt::format("SVD failed to converge for a {}x{} matrix", a.rows(), a.cols()));
  }
}

}  // namespace

void require_finite(const RealMatrix& a, const char* what) {
  if (!a.allFinite()) {
    throw DimensionError(fmt::format("{}: non-finite entry in {}x{} matrix", what, a.rows(), a.cols()));
  }
}

Eigen::Index SvdResult::rank(double relative_threshold) const {
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = relative_threshold * s(0);
  return std::count_if(s.begin(), s.end(), [cut](double v) { return v > cut; });
}

SvdResult svd(const RealMatrix& a) {
  require_finite(a, "svd");
  if (a.size() == 0) {
    return {RealMatrix(a.rows(), 0), RealVector(0), RealMatrix(0, a.cols())};
  }
  Eigen::BDCSVD<RealMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  require_converged(solver, a);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV().transpose()};
}

FullSvdResult full_svd(const RealMatrix& a) {
  require_finite(a, "full_svd");
  Eigen::BDCSVD<RealMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  require_converged(solver, a);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

RealVector singular_values(const RealMatrix& a) {
  require_finite(a, "singular_values");
  if (a.size() == 0) return RealVector(0);
  Eigen::BDCSVD<RealMatrix> solver(a);
  require_converged(solver, a);
  return solver.singularValues();
}

double default_pinv_tolerance(const RealMatrix& a) {
  return static_cast<double>(std::max(a.rows(), a.cols())) * std::numeric_limits<double>::epsilon();
}

RealMatrix pseudoinverse(const RealMatrix& a, std::optional<double> tol) {
  const double rel = tol.value_or(default_pinv_tolerance(a));
  if (rel < 0.0) throw PreconditionError("pseudoinverse: tolerance must be non-negative");
  RealMatrix out = RealMatrix::Zero(a.cols(), a.rows());
  if (a.size() == 0) return out;
  const SvdResult f = svd(a);
  if (f.s(0) == 0.0) return out;
  const double cut = rel * f.s(0);
  for (Eigen::Index k = 0; k < f.s.size(); ++k) {
    if (f.s(k) <= cut) break;
    out.noalias() += (f.vt.row(k).transpose() / f.s(k)) * f.u.col(k).transpose();
  }
  return out;
}

double operator_norm_2to2(const RealMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

double frobenius_norm(const RealMatrix& a) { return a.norm(); }

double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

double sigma(const RealMatrix& a, Eigen::Index i) {
  if (i < 1) throw DimensionError(fmt::format("sigma: index {} is not 1-based", i));
  const RealVector s = singular_values(a);
  return i <= s.size() ? s(i - 1) : 0.0;
}

void require_hermitian(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError(fmt::format("expected a square matrix, got {}x{}", a.rows(), a.cols()));
  }
  const double asym = (a - a.adjoint()).norm();
  if (asym > kHermitianTolerance * a.norm()) {
    throw PreconditionError(fmt::format(
        "matrix is not Hermitian: ||a - a^dagger||_F = {:.3e} vs ||a||_F = {:.3e}", asym, a.norm()));
  }
}

HermitianEigen hermitian_eigen(const ComplexMatrix& a) {
  require_hermitian(a);
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError(fmt::format("Hermitian eigensolver failed for a {}x{} matrix", a.rows(), a.cols()));
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

RealVector symmetrized_eigenvalues(const ComplexMatrix& a) {
  if (a.size() == 0) return RealVector(0);
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  if (sym.imag().cwiseAbs().maxCoeff() == 0.0) {
    const RealMatrix re = sym.real();
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(re, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw ConvergenceError(fmt::format("symmetric eigensolver failed for a {}x{} matrix", a.rows(), a.cols()));
    }
    return solver.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError(fmt::format("Hermitian eigensolver failed for a {}x{} matrix", a.rows(), a.cols()));
  }
  return solver.eigenvalues();
}

}  // namespace

RealVector hermitian_eigenvalues(const ComplexMatrix& a) {
  require_hermitian(a);
  return symmetrized_eigenvalues(a);
}

double trace_norm_hermitian(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError(fmt::format("expected a square matrix, got {}x{}", a.rows(), a.cols()));
  }
  return symmetrized_eigenvalues(a).cwiseAbs().sum();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace fcs::linalg
