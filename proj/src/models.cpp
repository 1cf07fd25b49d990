#include "fcs/error.hpp"
#include "fcs/realization.hpp"
#include "fcs/rng.hpp"

#include <fmt/format.h>

#include <Eigen/QR>

#include <cmath>
#include <numbers>

namespace fcs {

using linalg::Complex;

ComplexMatrix CStarRealization::transfer(const ComplexMatrix& sigma) const {
  const ComplexMatrix w = v * sigma * v.adjoint();
  ComplexMatrix out = ComplexMatrix::Zero(d_b, d_b);
  for (int a = 0; a < d_a; ++a) out += w.block(a * d_b, a * d_b, d_b, d_b);
  return out;
}

ComplexMatrix CStarRealization::heisenberg(const ComplexMatrix& a, const ComplexMatrix& b) const {
  return v.adjoint() * linalg::kron(a, b) * v;
}

void CStarRealization::validate(double tol) const {
  if (d_a < 1 || d_b < 1) throw DimensionError(fmt::format("C*-realization needs d_a, d_b >= 1 (got {}, {})", d_a, d_b));
  if (v.rows() != static_cast<Eigen::Index>(d_a) * d_b || v.cols() != d_b) {
    throw DimensionError(fmt::format("V is {}x{}, expected {}x{}", v.rows(), v.cols(), d_a * d_b, d_b));
  }
  if (rho0.rows() != d_b || rho0.cols() != d_b) {
    throw DimensionError(fmt::format("rho0 is {}x{}, expected {}x{}", rho0.rows(), rho0.cols(), d_b, d_b));
  }
  const double iso = (v.adjoint() * v - ComplexMatrix::Identity(d_b, d_b)).cwiseAbs().maxCoeff();
  if (iso > tol) throw PreconditionError(fmt::format("V is not an isometry: |V^dag V - 1| = {:.3e}", iso));
  linalg::require_hermitian(rho0);
  if (std::abs(rho0.trace() - Complex(1.0, 0.0)) > tol) {
    throw PreconditionError(fmt::format("rho0 has trace {:.15g}", rho0.trace().real()));
  }
  const double min_eig = linalg::hermitian_eigenvalues(rho0)(0);
  if (min_eig < -tol) throw PreconditionError(fmt::format("rho0 is not positive: eigenvalue {:.3e}", min_eig));
  const double stat = (transfer(rho0) - rho0).cwiseAbs().maxCoeff();
  if (stat > tol) throw PreconditionError(fmt::format("rho0 is not stationary: residual {:.3e}", stat));
}

Realization from_cstar(const CStarRealization& c, const HermitianBasis& basis) {
  c.validate();
  if (basis.dim() != c.d_a) {
    throw DimensionError(fmt::format("basis dimension {} does not match d_a = {}", basis.dim(), c.d_a));
  }
  const HermitianBasis mem = HermitianBasis::for_algebra(c.d_b);
  const int n = basis.size();
  const int m = mem.size();
  Realization r;
  r.d_a = c.d_a;
  r.m = m;
  r.kappa.assign(n, RealMatrix(m, m));
  for (int a = 0; a < n; ++a) {
    for (int j = 0; j < m; ++j) {
      const ComplexMatrix image = c.heisenberg(basis[a], mem[j]);
      r.kappa[a].col(j) = expand_in_basis(0.5 * (image + image.adjoint()), mem, 1);
    }
  }
  r.e = expand_in_basis(ComplexMatrix::Identity(c.d_b, c.d_b), mem, 1);
  r.rho = expand_in_basis(0.5 * (c.rho0 + c.rho0.adjoint()), mem, 1);
  r.validate();
  return r;
}

double aklt_theta() { return std::acos(std::sqrt(2.0 / 3.0)); }

CStarRealization aklt(double theta) {
  if (!(theta >= 0.0 && theta < std::numbers::pi)) {
    throw PreconditionError(fmt::format("AKLT angle {} outside [0, pi)", theta));
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  CStarRealization out;
  out.d_a = 3;
  out.d_b = 2;
  // Row index a * 2 + b; a: |1>,|0>,|-1> -> 0,1,2; b: |1/2>,|-1/2> -> 0,1.
  out.v = ComplexMatrix::Zero(6, 2);
  out.v(1, 0) = c;   // |1,-1/2>
  out.v(2, 0) = -s;  // |0,1/2>
  out.v(3, 1) = s;   // |0,-1/2>
  out.v(4, 1) = -c;  // |-1,1/2>
  out.rho0 = ComplexMatrix::Identity(2, 2) / 2.0;
  out.validate();
  return out;
}

ComplexMatrix stationary_state(const ComplexMatrix& v, int d_a, int d_b, int max_steps, double tol) {
  CStarRealization c{d_a, d_b, v, ComplexMatrix::Identity(d_b, d_b) / static_cast<double>(d_b)};
  ComplexMatrix sigma = c.rho0;
  for (int step = 0; step < max_steps; ++step) {
    ComplexMatrix next = c.transfer(sigma);
    next = 0.5 * (next + next.adjoint());
    next /= next.trace().real();
    const double diff = (next - sigma).norm();
    sigma.swap(next);
    if (diff <= tol) return sigma;
  }
  throw ConvergenceError(fmt::format(
      "stationary state did not converge after {} steps (d_a = {}, d_b = {}); peripheral spectrum may be degenerate",
      max_steps, d_a, d_b));
}

ComplexMatrix haar_isometry(int d_a, int d_b, std::uint64_t seed) {
  if (d_a < 1 || d_b < 1) throw DimensionError(fmt::format("isometry needs d_a, d_b >= 1 (got {}, {})", d_a, d_b));
  Rng rng(seed);
  const Eigen::Index rows = static_cast<Eigen::Index>(d_a) * d_b;
  ComplexMatrix g(rows, d_b);
  const double scale = 1.0 / std::sqrt(2.0);
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = Complex(re * scale, im * scale);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, d_b);
  const ComplexMatrix rr = qr.matrixQR().topRows(d_b).triangularView<Eigen::Upper>();
  for (int k = 0; k < d_b; ++k) {
    const double mag = std::abs(rr(k, k));
    if (mag > 0.0) q.col(k) *= rr(k, k) / mag;
  }
  return q;
}

CStarRealization random_cstar(int d_a, int d_b, std::uint64_t seed) {
  CStarRealization out{d_a, d_b, haar_isometry(d_a, d_b, seed), ComplexMatrix()};
  out.rho0 = stationary_state(out.v, d_a, d_b);
  out.validate();
  return out;
}

Realization product_realization(const ComplexMatrix& phi, const HermitianBasis& basis) {
  if (phi.rows() != basis.dim() || phi.cols() != basis.dim()) {
    throw DimensionError(fmt::format("product state is {}x{}, basis dimension {}", phi.rows(), phi.cols(), basis.dim()));
  }
  linalg::require_hermitian(phi);
  const RealVector c = expand_in_basis(0.5 * (phi + phi.adjoint()), basis, 1);
  Realization r;
  r.d_a = basis.dim();
  r.m = 1;
  r.kappa.reserve(c.size());
  for (Eigen::Index a = 0; a < c.size(); ++a) r.kappa.push_back(RealMatrix::Constant(1, 1, c(a)));
  r.e = RealVector::Ones(1);
  r.rho = RealVector::Ones(1);
  r.validate();
  return r;
}

int numerical_rank(const RealMatrix& omega, double rel_threshold) {
  const RealVector s = linalg::singular_values(omega);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > rel_threshold * s(0)) ++rank;
  }
  return rank;
}

RankProfile rank_profile(const Realization& r, int max_block, double rel_threshold) {
  if (max_block < 1) throw DimensionError(fmt::format("max_block must be >= 1, got {}", max_block));
  block_size(r.d_a, 2 * max_block);  // overflow guard
  std::vector<RealMatrix> lefts, rights;
  for (int k = 1; k <= max_block; ++k) {
    lefts.push_back(left_products(r, k));
    rights.push_back(right_products(r, k));
  }
  RankProfile out{Eigen::MatrixXi::Zero(max_block, max_block)};
  for (int i = 1; i <= max_block; ++i) {
    for (int j = 1; j <= max_block; ++j) {
      const RealMatrix omega = lefts[j - 1] * rights[i - 1];
      out.ranks(i - 1, j - 1) = numerical_rank(omega, rel_threshold);
    }
  }
  return out;
}

std::pair<int, int> RankProfile::t_star() const {
  const int n = static_cast<int>(ranks.rows());
  const int target = final_rank();
  for (int total = 2; total <= 2 * n; ++total) {
    for (int i = 1; i <= n; ++i) {
      const int j = total - i;
      if (j < 1 || j > n) continue;
      if (ranks(i - 1, j - 1) == target) return {i, j};
    }
  }
  return {n, n};
}

}  // namespace fcs
