#include "fcs/chain.hpp"

#include "fcs/error.hpp"
#include "fcs/rng.hpp"

#include <fmt/format.h>

namespace fcs {

void ChainRealization::validate(double tol) const {
  if (n < 1 || d_a < 1 || d_b < 1) {
    throw DimensionError(fmt::format("chain needs n, d_a, d_b >= 1 (got {}, {}, {})", n, d_a, d_b));
  }
  if (v.size() != static_cast<std::size_t>(n)) {
    throw DimensionError(fmt::format("chain has {} isometries for {} sites", v.size(), n));
  }
  for (int j = 0; j < n; ++j) {
    const ComplexMatrix& vj = v[j];
    if (vj.rows() != static_cast<Eigen::Index>(d_a) * d_b || vj.cols() != d_b) {
      throw DimensionError(fmt::format("V_{} is {}x{}, expected {}x{}", j + 1, vj.rows(), vj.cols(), d_a * d_b, d_b));
    }
    const double iso = (vj.adjoint() * vj - ComplexMatrix::Identity(d_b, d_b)).cwiseAbs().maxCoeff();
    if (iso > tol) throw PreconditionError(fmt::format("V_{} is not an isometry: residual {:.3e}", j + 1, iso));
  }
  if (rho0.rows() != d_b || rho0.cols() != d_b) {
    throw DimensionError(fmt::format("rho0 is {}x{}, expected {}x{}", rho0.rows(), rho0.cols(), d_b, d_b));
  }
  linalg::require_hermitian(rho0);
  if (std::abs(rho0.trace().real() - 1.0) > tol) {
    throw PreconditionError(fmt::format("rho0 has trace {:.15g}", rho0.trace().real()));
  }
  if (linalg::hermitian_eigenvalues(rho0)(0) < -tol) throw PreconditionError("rho0 is not positive");
}

ChainRealization random_chain(int n, int d_a, int d_b, std::uint64_t seed) {
  if (n < 1) throw DimensionError(fmt::format("chain length must be >= 1, got {}", n));
  ChainRealization c;
  c.n = n;
  c.d_a = d_a;
  c.d_b = d_b;
  for (int j = 1; j <= n; ++j) c.v.push_back(haar_isometry(d_a, d_b, derive_seed(seed, {static_cast<std::uint64_t>(j)})));
  c.rho0 = ComplexMatrix::Identity(d_b, d_b) / static_cast<double>(d_b);
  c.validate();
  return c;
}

ComplexMatrix chain_state(const ChainRealization& c, std::int64_t dense_cap) {
  c.validate();
  const std::int64_t full = checked_pow(c.d_a, c.n);
  if (full > dense_cap) {
    throw PreconditionError(
        fmt::format("chain state on {} sites has dimension {} above the dense cap {}", c.n, full, dense_cap));
  }
  const Eigen::Index db = c.d_b;
  const Eigen::Index step = static_cast<Eigen::Index>(c.d_a) * db;
  // sigma lives on (sites so far) (x) memory, memory least significant.
  ComplexMatrix sigma = c.rho0;
  Eigen::Index sites_dim = 1;
  for (int j = 0; j < c.n; ++j) {
    const ComplexMatrix& v = c.v[j];
    ComplexMatrix next(sites_dim * step, sites_dim * step);
    for (Eigen::Index x = 0; x < sites_dim; ++x) {
      for (Eigen::Index y = 0; y < sites_dim; ++y) {
        next.block(x * step, y * step, step, step).noalias() = v * sigma.block(x * db, y * db, db, db) * v.adjoint();
      }
    }
    sigma.swap(next);
    sites_dim *= c.d_a;
  }
  ComplexMatrix rho = ComplexMatrix::Zero(sites_dim, sites_dim);
  for (Eigen::Index x = 0; x < sites_dim; ++x) {
    for (Eigen::Index y = 0; y < sites_dim; ++y) {
      for (Eigen::Index b = 0; b < db; ++b) rho(x, y) += sigma(x * db + b, y * db + b);
    }
  }
  return rho;
}

ComplexMatrix reduced_state(const ComplexMatrix& rho, int d, int n, int first, int last) {
  const Eigen::Index dim = checked_pow(d, n);
  if (rho.rows() != dim || rho.cols() != dim) {
    throw DimensionError(fmt::format("state is {}x{}, expected {}x{}", rho.rows(), rho.cols(), dim, dim));
  }
  if (first > last) return ComplexMatrix::Constant(1, 1, rho.trace());
  if (first < 1 || last > n) throw DimensionError(fmt::format("site range [{}, {}] outside [1, {}]", first, last, n));
  const Eigen::Index pre = checked_pow(d, first - 1);
  const Eigen::Index mid = checked_pow(d, last - first + 1);
  const Eigen::Index post = checked_pow(d, n - last);
  ComplexMatrix out = ComplexMatrix::Zero(mid, mid);
  for (Eigen::Index p = 0; p < pre; ++p) {
    for (Eigen::Index q = 0; q < post; ++q) {
      for (Eigen::Index y = 0; y < mid; ++y) {
        const Eigen::Index col = (p * mid + y) * post + q;
        for (Eigen::Index x = 0; x < mid; ++x) out(x, y) += rho((p * mid + x) * post + q, col);
      }
    }
  }
  return out;
}

ChainOmega::ChainOmega(ComplexMatrix state, int d_a, int n)
    : state_(std::move(state)), d_a_(d_a), n_(n), basis_(HermitianBasis::gellmann(d_a)) {
  const Eigen::Index dim = checked_pow(d_a, n);
  if (state_.rows() != dim || state_.cols() != dim) {
    throw DimensionError(fmt::format("chain state is {}x{}, expected {}x{}", state_.rows(), state_.cols(), dim, dim));
  }
}

RealVector ChainOmega::block_coefficients(int first, int last) const {
  if (first > last) return RealVector::Constant(1, state_.trace().real());
  const ComplexMatrix red = reduced_state(state_, d_a_, n_, first, last);
  return expand_in_basis(0.5 * (red + red.adjoint()), basis_, last - first + 1);
}

RealMatrix ChainOmega::omega(int i, int j, int k) const {
  if (j < 0 || j > n_) throw DimensionError(fmt::format("cut position {} outside [0, {}]", j, n_));
  const int first = std::max(1, i);
  const int last = std::min(k, n_);
  if (first > j + 1 || last < j) {
    throw DimensionError(fmt::format("invalid Omega index [{}, {}, {}]", i, j, k));
  }
  const Eigen::Index n_left = block_size(d_a_, j - first + 1);
  const Eigen::Index n_right = block_size(d_a_, last - j);
  const RealVector c = block_coefficients(first, last);
  return Eigen::Map<const RealMatrix>(c.data(), n_right, n_left).transpose();
}

std::vector<RealMatrix> ChainOmega::omega_dot(int i, int j, int k) const {
  if (j < 0 || j + 1 > n_) throw DimensionError(fmt::format("middle site {} outside [1, {}]", j + 1, n_));
  const int first = std::max(1, i);
  const int last = std::min(k, n_);
  if (first > j + 1 || last < j + 1) {
    throw DimensionError(fmt::format("invalid Omega_A index [{}, {}, {}]", i, j, k));
  }
  const Eigen::Index d2 = static_cast<Eigen::Index>(d_a_) * d_a_;
  const Eigen::Index n_left = block_size(d_a_, j - first + 1);
  const Eigen::Index n_right = block_size(d_a_, last - j - 1);
  const RealVector c = block_coefficients(first, last);
  const Eigen::Map<const RealMatrix> flat(c.data(), n_right, n_left * d2);
  std::vector<RealMatrix> out(d2, RealMatrix(n_left, n_right));
  for (Eigen::Index a = 0; a < d2; ++a) {
    for (Eigen::Index y = 0; y < n_left; ++y) out[a].row(y) = flat.col(y * d2 + a).transpose();
  }
  return out;
}

}  // namespace fcs
