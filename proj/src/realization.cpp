#include "fcs/realization.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fcs {

void Realization::check_shapes() const {
  if (d_a < 1 || m < 1) throw DimensionError(fmt::format("realization needs d_a, m >= 1 (got {}, {})", d_a, m));
  const auto n = static_cast<std::size_t>(d_a) * d_a;
  if (kappa.size() != n) {
    throw DimensionError(fmt::format("kappa has {} slices, expected d_a^2 = {}", kappa.size(), n));
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (kappa[a].rows() != m || kappa[a].cols() != m) {
      throw DimensionError(fmt::format("kappa[{}] is {}x{}, expected {}x{}", a, kappa[a].rows(), kappa[a].cols(), m, m));
    }
  }
  if (e.size() != m || rho.size() != m) {
    throw DimensionError(fmt::format("e/rho have lengths {}/{}, expected {}", e.size(), rho.size(), m));
  }
}

RealMatrix Realization::identity_transfer() const { return std::sqrt(static_cast<double>(d_a)) * kappa.at(0); }

void Realization::validate(double tol, double norm_tol) const {
  check_shapes();
  for (const auto& k : kappa) linalg::require_finite(k, "kappa");
  const RealMatrix e1 = identity_transfer();
  const double left = (e1.transpose() * rho - rho).cwiseAbs().maxCoeff();
  const double right = (e1 * e - e).cwiseAbs().maxCoeff();
  if (left > tol || right > tol) {
    throw PreconditionError(
        fmt::format("realization is not stationary: |rho E - rho| = {:.3e}, |E e - e| = {:.3e}", left, right));
  }
  const double norm = rho.dot(e);
  if (std::abs(norm - 1.0) > norm_tol) {
    throw PreconditionError(fmt::format("realization is not normalized: rho(e) = {:.15g}", norm));
  }
}

double evaluate_word(const Realization& r, const std::vector<RealVector>& word) {
  r.check_shapes();
  const Eigen::Index n = static_cast<Eigen::Index>(r.d_a) * r.d_a;
  RealVector v = r.e;
  RealMatrix k(r.m, r.m);
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (it->size() != n) throw DimensionError(fmt::format("word slot has length {}, expected {}", it->size(), n));
    k.setZero();
    for (Eigen::Index a = 0; a < n; ++a) {
      if ((*it)(a) != 0.0) k += (*it)(a) * r.kappa[a];
    }
    v = k * v;
  }
  return r.rho.dot(v);
}

double evaluate_basis_word(const Realization& r, std::span<const int> multi) {
  r.check_shapes();
  RealVector v = r.e;
  for (auto it = multi.rbegin(); it != multi.rend(); ++it) {
    if (*it < 0 || *it >= r.d_a * r.d_a) throw DimensionError(fmt::format("basis index {} out of range", *it));
    v = r.kappa[*it] * v;
  }
  return r.rho.dot(v);
}

RealMatrix left_products(const Realization& r, int t) {
  r.check_shapes();
  const Eigen::Index d2 = static_cast<Eigen::Index>(r.d_a) * r.d_a;
  RealMatrix l = r.rho.transpose();
  for (int step = 0; step < t; ++step) {
    RealMatrix next(l.rows() * d2, r.m);
    for (Eigen::Index a = 0; a < d2; ++a) {
      const RealMatrix p = l * r.kappa[a];
      for (Eigen::Index i = 0; i < l.rows(); ++i) next.row(i * d2 + a) = p.row(i);
    }
    l.swap(next);
  }
  return l;
}

RealMatrix right_products(const Realization& r, int t) {
  r.check_shapes();
  const Eigen::Index d2 = static_cast<Eigen::Index>(r.d_a) * r.d_a;
  RealMatrix q = r.e;
  for (int step = 0; step < t; ++step) {
    RealMatrix next(r.m, q.cols() * d2);
    for (Eigen::Index a = 0; a < d2; ++a) next.middleCols(a * q.cols(), q.cols()).noalias() = r.kappa[a] * q;
    q.swap(next);
  }
  return q;
}

RealVector word_coefficients(const Realization& r, int t) {
  if (t < 0) throw DimensionError(fmt::format("negative word length {}", t));
  const int t_left = t / 2;
  const RealMatrix l = left_products(r, t_left);
  const RealMatrix q = right_products(r, t - t_left);
  // (q^T l^T) is n_right x n_left in column-major storage, so its memory
  // order is I * n_right + J: the flat index with the left word leading.
  RealMatrix ct = q.transpose() * l.transpose();
  return Eigen::Map<RealVector>(ct.data(), ct.size());
}

DensityMatrix marginal(const Realization& r, const HermitianBasis& basis, int t, std::int64_t dense_cap) {
  if (basis.dim() != r.d_a) {
    throw DimensionError(fmt::format("basis dimension {} does not match d_a = {}", basis.dim(), r.d_a));
  }
  const std::int64_t dim = checked_pow(r.d_a, t);
  if (dim > dense_cap) {
    throw PreconditionError(fmt::format("marginal on {} sites has dimension {} above the dense cap {}", t, dim, dense_cap));
  }
  return density_from_coefficients(word_coefficients(r, t), basis, t);
}

}  // namespace fcs
