#include "fcs/spectral.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace fcs {

namespace {

const RealVector& require_marginal(const MarginalCoefficients& marginals, int sites, int d_a) {
  const auto it = marginals.find(sites);
  if (it == marginals.end()) {
    throw PreconditionError(fmt::format("Omega assembly needs the {}-site marginal, which was not supplied", sites));
  }
  const std::int64_t n = block_size(d_a, sites);
  if (it->second.size() != n) {
    throw DimensionError(
        fmt::format("{}-site marginal has {} coefficients, expected {}", sites, it->second.size(), n));
  }
  return it->second;
}

SpectralRealization assemble_realization(const OmegaData& od, const RealMatrix& u_hat, double pinv_tol) {
  od.check_shapes();
  if (u_hat.rows() != od.omega.rows()) {
    throw DimensionError(fmt::format("frame has {} rows, Omega has {}", u_hat.rows(), od.omega.rows()));
  }
  if (u_hat.cols() < 1) throw PreconditionError("frame has no columns");
  const RealMatrix projected = u_hat.transpose() * od.omega;
  const linalg::SvdResult f = linalg::svd(projected);
  const RealMatrix p = linalg::pseudoinverse(projected, pinv_tol);

  SpectralRealization out;
  Realization& r = out.model;
  r.d_a = od.d_a;
  r.m = static_cast<int>(u_hat.cols());
  r.e = u_hat.transpose() * od.omega_one;
  r.rho = p.transpose() * od.tau;
  r.kappa.reserve(od.omega_dot.size());
  for (const auto& slice : od.omega_dot) r.kappa.push_back(u_hat.transpose() * slice * p);

  const Eigen::Index m = u_hat.cols();
  out.diagnostics.rank = r.m;
  out.diagnostics.sigma_m_projected = f.s.size() >= m ? f.s(m - 1) : 0.0;
  out.diagnostics.condition_number =
      out.diagnostics.sigma_m_projected > 0.0 ? f.s(0) / out.diagnostics.sigma_m_projected
                                              : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

void OmegaData::check_shapes() const {
  if (d_a < 1 || s_left < 0 || s_right < 0) {
    throw DimensionError(fmt::format("invalid Omega-data header (d_a {}, s_left {}, s_right {})", d_a, s_left, s_right));
  }
  const std::int64_t n_left = block_size(d_a, s_left);
  const std::int64_t n_right = block_size(d_a, s_right);
  if (omega.rows() != n_left || omega.cols() != n_right) {
    throw DimensionError(
        fmt::format("Omega is {}x{}, expected {}x{}", omega.rows(), omega.cols(), n_left, n_right));
  }
  if (omega_dot.size() != static_cast<std::size_t>(d_a) * d_a) {
    throw DimensionError(fmt::format("{} Omega_a slices, expected {}", omega_dot.size(), d_a * d_a));
  }
  for (std::size_t k = 0; k < omega_dot.size(); ++k) {
    if (omega_dot[k].rows() != n_left || omega_dot[k].cols() != n_right) {
      throw DimensionError(fmt::format("Omega_a slice {} is {}x{}, expected {}x{}", k, omega_dot[k].rows(),
                                       omega_dot[k].cols(), n_left, n_right));
    }
  }
  if (omega_one.size() != n_left || tau.size() != n_right) {
    throw DimensionError(fmt::format("Omega(1)/tau have lengths {}/{}, expected {}/{}", omega_one.size(), tau.size(),
                                     n_left, n_right));
  }
}

void OmegaData::check_consistency(double tol) const {
  check_shapes();
  const double root_left = std::sqrt(static_cast<double>(checked_pow(d_a, s_left)));
  const double root_right = std::sqrt(static_cast<double>(checked_pow(d_a, s_right)));
  const double one = (omega_one - omega.col(0) * root_right).cwiseAbs().maxCoeff();
  const double tau_res = (tau - omega.row(0).transpose() * root_left).cwiseAbs().maxCoeff();
  // omega(Y (x) lambda_k (x) X) with an all-identity Y (or X) block is an
  // Omega entry whose left (right) block ends (starts) with lambda_k.
  const double root_d = std::sqrt(static_cast<double>(d_a));
  const Eigen::Index stride = block_size(d_a, s_right - 1);
  double dot = 0.0;
  for (std::size_t k = 0; k < omega_dot.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    dot = std::max(dot, (omega_dot[k].row(0) * root_left - omega.row(kk) * root_left / root_d).cwiseAbs().maxCoeff());
    dot = std::max(dot,
                   (omega_dot[k].col(0) * root_right - omega.col(kk * stride) * root_right / root_d).cwiseAbs().maxCoeff());
  }
  const double worst = std::max({one, tau_res, dot});
  if (worst > tol) {
    throw PreconditionError(fmt::format(
        "Omega-data marginals are inconsistent: Omega(1) {:.3e}, tau {:.3e}, Omega_A {:.3e}", one, tau_res, dot));
  }
}

RealMatrix OmegaData::omega_dot_flat() const {
  RealMatrix out(omega.rows(), omega.cols() * static_cast<Eigen::Index>(omega_dot.size()));
  for (std::size_t k = 0; k < omega_dot.size(); ++k) {
    out.middleCols(static_cast<Eigen::Index>(k) * omega.cols(), omega.cols()) = omega_dot[k];
  }
  return out;
}

OmegaData build_omega(const MarginalCoefficients& marginals, int d_a, int s_left, int s_right) {
  if (s_left < 1 || s_right < 1) throw DimensionError("block sizes must be at least 1");
  const RealVector& c_left = require_marginal(marginals, s_left, d_a);
  const RealVector& c_right = require_marginal(marginals, s_right, d_a);
  const RealVector& c_pair = require_marginal(marginals, s_left + s_right, d_a);
  const RealVector& c_triple = require_marginal(marginals, s_left + 1 + s_right, d_a);

  const Eigen::Index n_left = block_size(d_a, s_left);
  const Eigen::Index n_right = block_size(d_a, s_right);
  const Eigen::Index d2 = static_cast<Eigen::Index>(d_a) * d_a;

  OmegaData od;
  od.d_a = d_a;
  od.s_left = s_left;
  od.s_right = s_right;
  // Flat index j * n_right + i is column-major storage of an n_right x n_left matrix.
  od.omega = Eigen::Map<const RealMatrix>(c_pair.data(), n_right, n_left).transpose();
  const Eigen::Map<const RealMatrix> triple(c_triple.data(), n_right, n_left * d2);
  od.omega_dot.assign(d2, RealMatrix(n_left, n_right));
  for (Eigen::Index k = 0; k < d2; ++k) {
    for (Eigen::Index j = 0; j < n_left; ++j) od.omega_dot[k].row(j) = triple.col(j * d2 + k).transpose();
  }
  od.omega_one = c_left;
  od.tau = c_right;
  return od;
}

OmegaData build_omega(const Realization& r, int s_left, int s_right) {
  if (s_left < 1 || s_right < 1) throw DimensionError("block sizes must be at least 1");
  const RealMatrix left = left_products(r, s_left);
  const RealMatrix right = right_products(r, s_right);
  OmegaData od;
  od.d_a = r.d_a;
  od.s_left = s_left;
  od.s_right = s_right;
  od.omega = left * right;
  od.omega_dot.reserve(r.kappa.size());
  for (const auto& k : r.kappa) od.omega_dot.push_back(left * k * right);
  od.omega_one = left * r.e;
  od.tau = right.transpose() * r.rho;
  return od;
}

SvdTruncation truncate(const RealMatrix& omega, const TruncationMode& mode) {
  const linalg::SvdResult f = linalg::svd(omega);
  const Eigen::Index n = f.s.size();
  Eigen::Index keep = 0;
  if (mode.kind == TruncationMode::Kind::FixedRank) {
    if (mode.rank < 1 || mode.rank > n) {
      throw DimensionError(fmt::format("truncation rank {} outside [1, {}]", mode.rank, n));
    }
    keep = mode.rank;
    if (f.s(keep - 1) <= kRankDeficiencyFloor) {
      throw PreconditionError(fmt::format("Omega is rank deficient: sigma_{} = {:.3e}", keep, f.s(keep - 1)));
    }
  } else {
    if (!(mode.threshold > 0.0)) throw PreconditionError(fmt::format("threshold {} must be positive", mode.threshold));
    while (keep < n && f.s(keep) >= mode.threshold) ++keep;
    if (keep == 0) {
      throw PreconditionError(
          fmt::format("no singular value reaches the threshold {:.3e} (sigma_1 = {:.3e})", mode.threshold,
                      n > 0 ? f.s(0) : 0.0));
    }
  }
  return {f.u.leftCols(keep), f.s.head(keep), f.s.tail(n - keep), mode};
}

SpectralRealization spectral_realization(const OmegaData& od, const SvdTruncation& tr, double pinv_tol) {
  SpectralRealization out = assemble_realization(od, tr.u_hat, pinv_tol);
  out.diagnostics.sigma_m_omega = tr.s_retained.size() > 0 ? tr.s_retained(tr.s_retained.size() - 1) : 0.0;
  return out;
}

SpectralRealization empirical_realization(const OmegaData& od_exact, const RealMatrix& u_hat, double pinv_tol) {
  od_exact.check_shapes();
  const linalg::SvdResult f = linalg::svd(od_exact.omega);
  const Eigen::Index m = u_hat.cols();
  if (m < 1 || m > f.u.cols() || u_hat.rows() != f.u.rows()) {
    throw DimensionError(fmt::format("frame is {}x{}, incompatible with Omega of size {}x{}", u_hat.rows(), u_hat.cols(),
                                     od_exact.omega.rows(), od_exact.omega.cols()));
  }
  const RealVector overlap_s = linalg::singular_values(u_hat.transpose() * f.u.leftCols(m));
  const double overlap = overlap_s(overlap_s.size() - 1);
  if (!(overlap > kFrameOverlapFloor)) {
    throw PreconditionError(
        fmt::format("U_hat^T U is not invertible: sigma_min = {:.3e} (floor {:.1e})", overlap, kFrameOverlapFloor));
  }
  SpectralRealization out = assemble_realization(od_exact, u_hat, pinv_tol);
  out.diagnostics.sigma_m_omega = f.s(m - 1);
  out.diagnostics.frame_overlap = overlap;
  return out;
}

DensityMatrix reconstruct_marginal(const SpectralRealization& sr, const HermitianBasis& basis, int t,
                                   std::int64_t dense_cap) {
  const Realization& r = sr.model;
  r.check_shapes();
  if (basis.dim() != r.d_a) {
    throw DimensionError(fmt::format("basis dimension {} does not match d_a = {}", basis.dim(), r.d_a));
  }
  const std::int64_t dim = checked_pow(r.d_a, t);
  if (dim > dense_cap) {
    throw PreconditionError(
        fmt::format("reconstructed marginal on {} sites has dimension {} above the dense cap {}", t, dim, dense_cap));
  }
  return density_from_coefficients(word_coefficients(r, t), basis, t);
}

DensityMatrix project_to_density(const DensityMatrix& rho, const HermitianBasis& basis) {
  const linalg::HermitianEigen eig = linalg::hermitian_eigen(rho.matrix);
  const RealVector clipped = eig.eigenvalues.cwiseMax(0.0);
  const double total = clipped.sum();
  if (!(total > 0.0)) throw PreconditionError("projection to a density matrix failed: no positive eigenvalue");
  ComplexMatrix m = eig.eigenvectors * (clipped / total).cast<linalg::Complex>().asDiagonal() * eig.eigenvectors.adjoint();
  m = 0.5 * (m + m.adjoint());
  return density_from_matrix(std::move(m), basis, rho.sites);
}

}  // namespace fcs
