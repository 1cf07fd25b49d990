#include "fcs/nonhomog.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fcs {

void ChainOmegaData::check_shapes() const {
  if (n < 1 || d_a < 1 || l < 1 || r < 1) {
    throw DimensionError(fmt::format("invalid chain Omega-data header (n {}, d_a {}, l {}, r {})", n, d_a, l, r));
  }
  if (omega.size() != static_cast<std::size_t>(n) + 1 || omega_dot.size() != static_cast<std::size_t>(n) + 1) {
    throw DimensionError(fmt::format("chain Omega-data needs {} entries per list", n + 1));
  }
  const std::size_t d2 = static_cast<std::size_t>(d_a) * d_a;
  for (int j = 1; j <= n; ++j) {
    if (omega_dot[j].size() != d2) {
      throw DimensionError(fmt::format("site {}: {} Omega_A slices, expected {}", j, omega_dot[j].size(), d2));
    }
    for (const auto& slice : omega_dot[j]) {
      if (slice.rows() != omega[j - 1].rows() || slice.cols() != omega[j].cols()) {
        throw DimensionError(fmt::format("site {}: Omega_A slice is {}x{}, expected {}x{}", j, slice.rows(),
                                         slice.cols(), omega[j - 1].rows(), omega[j].cols()));
      }
    }
  }
}

ChainOmegaData chain_omega_data(const ChainOmega& source, int l, int r) {
  if (l < 1 || r < 1) throw DimensionError(fmt::format("windows must be >= 1 (l = {}, r = {})", l, r));
  ChainOmegaData od;
  od.n = source.sites();
  od.d_a = source.local_dim();
  od.l = l;
  od.r = r;
  od.omega.resize(od.n + 1);
  od.omega_dot.resize(od.n + 1);
  for (int j = 0; j <= od.n; ++j) od.omega[j] = source.omega(j - l + 1, j, j + r);
  for (int j = 1; j <= od.n; ++j) od.omega_dot[j] = source.omega_dot(j - l, j - 1, j + r);
  od.check_shapes();
  return od;
}

std::vector<int> chain_ranks(const ChainOmegaData& od, double rel_threshold) {
  std::vector<int> ranks(od.n + 1, 1);
  for (int j = 1; j < od.n; ++j) ranks[j] = numerical_rank(od.omega[j], rel_threshold);
  return ranks;
}

std::vector<TruncationMode> fixed_rank_modes(const std::vector<int>& ranks) {
  std::vector<TruncationMode> modes;
  modes.reserve(ranks.size());
  for (int m : ranks) modes.push_back(TruncationMode::fixed_rank(m));
  return modes;
}

ChainReconstruction nonhomog_reconstruct(const ChainOmegaData& od, const std::vector<TruncationMode>& modes,
                                         double pinv_tol) {
  od.check_shapes();
  if (modes.size() != static_cast<std::size_t>(od.n) + 1) {
    throw DimensionError(fmt::format("expected {} truncation modes, got {}", od.n + 1, modes.size()));
  }
  ChainReconstruction rec;
  rec.n = od.n;
  rec.d_a = od.d_a;
  rec.ranks.assign(od.n + 1, 1);
  rec.u_hat.resize(od.n);
  rec.u_hat[0] = RealMatrix::Ones(1, 1);
  std::vector<RealMatrix> pinv(od.n + 1);
  for (int j = 1; j < od.n; ++j) {
    try {
      const SvdTruncation tr = truncate(od.omega[j], modes[j]);
      rec.u_hat[j] = tr.u_hat;
      rec.ranks[j] = tr.rank();
      const RealMatrix projected = tr.u_hat.transpose() * od.omega[j];
      const RealVector s = linalg::singular_values(projected);
      if (!(s(s.size() - 1) > kRankDeficiencyFloor)) {
        throw PreconditionError(fmt::format("U_hat^T Omega is rank deficient (sigma_min {:.3e})", s(s.size() - 1)));
      }
      pinv[j] = linalg::pseudoinverse(projected, pinv_tol);
    } catch (const Error& err) {
      throw PreconditionError(fmt::format("site {}: {}", j, err.what()));
    }
  }
  pinv[od.n] = RealMatrix::Ones(1, 1);
  rec.k.resize(od.n + 1);
  for (int j = 1; j <= od.n; ++j) {
    const RealMatrix& u_prev = rec.u_hat[j - 1];
    rec.k[j].reserve(od.omega_dot[j].size());
    for (const auto& slice : od.omega_dot[j]) rec.k[j].push_back(u_prev.transpose() * slice * pinv[j]);
  }
  return rec;
}

RealVector chain_coefficients(const ChainReconstruction& rec) {
  const Eigen::Index d2 = static_cast<Eigen::Index>(rec.d_a) * rec.d_a;
  RealMatrix left = RealMatrix::Ones(1, 1);
  for (int j = 1; j <= rec.n; ++j) {
    const Eigen::Index cols = rec.k[j][0].cols();
    RealMatrix next(left.rows() * d2, cols);
    for (Eigen::Index a = 0; a < d2; ++a) {
      const RealMatrix p = left * rec.k[j][a];
      for (Eigen::Index i = 0; i < left.rows(); ++i) next.row(i * d2 + a) = p.row(i);
    }
    left.swap(next);
  }
  if (left.cols() != 1) throw DimensionError(fmt::format("last chain map has {} columns, expected 1", left.cols()));
  return left.col(0);
}

DensityMatrix chain_reconstructed_state(const ChainReconstruction& rec, std::int64_t dense_cap) {
  const std::int64_t dim = checked_pow(rec.d_a, rec.n);
  if (dim > dense_cap) {
    throw PreconditionError(fmt::format("chain state dimension {} above the dense cap {}", dim, dense_cap));
  }
  return density_from_coefficients(chain_coefficients(rec), HermitianBasis::gellmann(rec.d_a), rec.n);
}

ChainBound nonhomog_bound(const ChainOmegaData& exact, const ChainOmegaData& noisy, const std::vector<int>& ranks) {
  exact.check_shapes();
  noisy.check_shapes();
  if (ranks.size() != static_cast<std::size_t>(exact.n) + 1) {
    throw DimensionError(fmt::format("expected {} ranks, got {}", exact.n + 1, ranks.size()));
  }
  ChainBound out;
  out.per_site.assign(exact.n + 1, 0.0);
  const double root_d = std::sqrt(static_cast<double>(exact.d_a));
  for (int j = 1; j <= exact.n; ++j) {
    const double sigma_prev = linalg::sigma(exact.omega[j - 1], ranks[j - 1]);
    const double sigma_here = linalg::sigma(exact.omega[j], ranks[j]);
    const double d_omega = j < exact.n ? (exact.omega[j] - noisy.omega[j]).norm() : 0.0;
    double d_dot_sq = 0.0;
    for (std::size_t a = 0; a < exact.omega_dot[j].size(); ++a) {
      d_dot_sq += (exact.omega_dot[j][a] - noisy.omega_dot[j][a]).squaredNorm();
    }
    const double prefactor = 8.0 * ranks[j - 1] * root_d / (std::sqrt(3.0) * sigma_prev);
    out.per_site[j] =
        prefactor * (d_omega / (sigma_here * sigma_here) + std::sqrt(d_dot_sq) / (3.0 * sigma_here));
    out.delta_prime = std::max(out.delta_prime, out.per_site[j]);
  }
  out.bound = std::pow(1.0 + out.delta_prime, exact.n) - 1.0;
  return out;
}

}  // namespace fcs
