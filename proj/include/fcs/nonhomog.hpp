#pragma once

// Spectral reconstruction of a finite, non-translation-invariant chain from
// local Omega matrices with left window l and right window r:
//
//   K^(j)_A = U_{j-1}^T Omega_A^{[j-l, j-1, j+r]} (U_j^T Omega^{[j-l+1, j, j+r]})^+
//
// for 1 <= j <= N, with U_0 = [1] and no pseudoinverse factor at j = N
// (the right block is empty there). The chain value is K^(1) ... K^(N).

#include "fcs/chain.hpp"
#include "fcs/spectral.hpp"

namespace fcs {

struct ChainOmegaData {
  int n = 0;
  int d_a = 0;
  int l = 0;
  int r = 0;
  /// omega[j] = Omega^{[j-l+1, j, j+r]} for j = 0..n (j = 0 is a row,
  /// j = n a column).
  std::vector<RealMatrix> omega;
  /// omega_dot[j][a] = slice a of Omega_A^{[j-l, j-1, j+r]} for j = 1..n;
  /// omega_dot[0] is empty.
  std::vector<std::vector<RealMatrix>> omega_dot;

  void check_shapes() const;
};

/// Reads every matrix the reconstruction needs off a dense chain state.
ChainOmegaData chain_omega_data(const ChainOmega& source, int l, int r);

/// Numerical ranks m_j of omega[j] (threshold rel * sigma_1), j = 0..n.
std::vector<int> chain_ranks(const ChainOmegaData& od, double rel_threshold = 1e-9);

struct ChainReconstruction {
  int n = 0;
  int d_a = 0;
  std::vector<int> ranks;                   // m_0..m_n, m_0 = m_n = 1
  std::vector<RealMatrix> u_hat;            // u_hat[j], j = 0..n-1 (u_hat[0] = [1])
  std::vector<std::vector<RealMatrix>> k;   // k[j][a], j = 1..n, each m_{j-1} x m_j
};

/// Truncates omega[j] for 1 <= j <= n-1 with modes[j] (modes has n+1
/// entries; entries 0 and n are ignored) and assembles the K^(j). A failing
/// site is named in the thrown PreconditionError.
ChainReconstruction nonhomog_reconstruct(const ChainOmegaData& od, const std::vector<TruncationMode>& modes,
                                         double pinv_tol = kSpectralPinvTolerance);

/// Fixed-rank modes built from a rank list (e.g. chain_ranks of exact data).
std::vector<TruncationMode> fixed_rank_modes(const std::vector<int>& ranks);

/// All (d_a^2)^N block-basis coefficients K^(1)_{a1} ... K^(N)_{aN}.
RealVector chain_coefficients(const ChainReconstruction& rec);

/// Dense reconstructed state (not renormalized).
DensityMatrix chain_reconstructed_state(const ChainReconstruction& rec, std::int64_t dense_cap = kDefaultDenseCap);

/// 2-norm surrogate of the chain error parameter Delta' and the resulting
/// trace-norm bound (1 + Delta')^N - 1. Per site j:
///   8 m_{j-1} sqrt(d_a) / (sqrt(3) sigma_{m_{j-1}}(Omega_{j-1}))
///     * (||dOmega_j||_F / sigma_{m_j}(Omega_j)^2 + ||dOmega_A,j||_F / (3 sigma_{m_j}(Omega_j)))
/// with Omega_j = omega[j] of the exact data.
struct ChainBound {
  std::vector<double> per_site;  // index j = 1..n (index 0 unused)
  double delta_prime = 0.0;
  double bound = 0.0;
};

ChainBound nonhomog_bound(const ChainOmegaData& exact, const ChainOmegaData& noisy, const std::vector<int>& ranks);

}  // namespace fcs
