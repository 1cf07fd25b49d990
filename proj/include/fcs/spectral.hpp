#pragma once

// Translation-invariant spectral reconstruction: Omega-data from marginals,
// truncated SVD, and the realization (e_hat, rho_hat, K_hat) built from
// them. The same formulas with exact Omega-data and an estimated frame U_hat
// give the empirical realization used by the error analysis.

#include "fcs/realization.hpp"

#include <map>
#include <optional>

namespace fcs {

/// Omega matrices in block-basis coordinates.
///   omega(j, i)        = omega(Y_j (x) X_i)
///   omega_dot[k](j, i) = omega(Y_j (x) lambda_k (x) X_i)
///   omega_one(j)       = omega(Y_j)         (Omega applied to the identity)
///   tau(i)             = omega(X_i)
/// Y runs over the left block (s_left sites), X over the right block.
struct OmegaData {
  int d_a = 0;
  int s_left = 0;
  int s_right = 0;
  RealMatrix omega;
  std::vector<RealMatrix> omega_dot;
  RealVector omega_one;
  RealVector tau;

  void check_shapes() const;

  /// Marginal compatibility of exact data: omega_one(j) = omega(j, 0) *
  /// d_a^(s_right/2), tau(i) = omega(0, i) * d_a^(s_left/2), and an
  /// all-identity left (right) block in omega_dot[k] reproduces the Omega
  /// entries whose left block ends (right block starts) with lambda_k,
  /// up to the normalization of the dropped identity. Noisy data need not
  /// pass.
  /// Throws PreconditionError with the worst residual.
  void check_consistency(double tol = 1e-10) const;

  /// n_left x (d_a^2 * n_right) matrix [omega_dot[0] | omega_dot[1] | ...].
  [[nodiscard]] RealMatrix omega_dot_flat() const;
};

/// Block-basis coefficient vectors of marginals, keyed by number of sites.
using MarginalCoefficients = std::map<int, RealVector>;

/// Omega-data from marginals of s_left, s_right, s_left + s_right and
/// s_left + 1 + s_right sites. Throws PreconditionError if one is missing.
OmegaData build_omega(const MarginalCoefficients& marginals, int d_a, int s_left, int s_right);

/// Omega-data straight from a realization's word values.
OmegaData build_omega(const Realization& r, int s_left, int s_right);

struct TruncationMode {
  enum class Kind { FixedRank, Threshold };
  Kind kind = Kind::FixedRank;
  int rank = 0;
  double threshold = 0.0;

  static TruncationMode fixed_rank(int m) { return {Kind::FixedRank, m, 0.0}; }
  static TruncationMode at_threshold(double eta) { return {Kind::Threshold, 0, eta}; }
};

struct SvdTruncation {
  RealMatrix u_hat;  // n_left x rank
  RealVector s_retained;
  RealVector s_discarded;
  TruncationMode mode;

  [[nodiscard]] int rank() const { return static_cast<int>(u_hat.cols()); }
};

/// Singular values below this are treated as zero by fixed-rank truncation.
inline constexpr double kRankDeficiencyFloor = 1e-14;

/// Threshold mode keeps every sigma_i >= eta (ties kept). Fixed-rank mode
/// keeps the leading m and fails if sigma_m <= 1e-14.
SvdTruncation truncate(const RealMatrix& omega, const TruncationMode& mode);

struct SpectralDiagnostics {
  int rank = 0;
  double sigma_m_omega = 0.0;       // sigma_m of the Omega matrix that was truncated
  double sigma_m_projected = 0.0;   // sigma_m(U_hat^T Omega) of the data used for the pseudoinverse
  double condition_number = 0.0;    // sigma_1 / sigma_m of U_hat^T Omega
  double frame_overlap = 0.0;       // sigma_min(U_hat^T U_exact), empirical realization only
};

struct SpectralRealization {
  Realization model;
  SpectralDiagnostics diagnostics;
};

/// Relative tolerance of the pseudoinverse in the reconstruction formulas.
inline constexpr double kSpectralPinvTolerance = 1e-12;

/// e_hat = U^T Omega(1), rho_hat = tau (U^T Omega)^+,
/// K_hat[a] = U^T Omega_a (U^T Omega)^+.
SpectralRealization spectral_realization(const OmegaData& od, const SvdTruncation& tr,
                                         double pinv_tol = kSpectralPinvTolerance);

/// The same formulas applied to exact data with an externally estimated
/// frame u_hat. Requires sigma_min(u_hat^T U_exact) > 1e-8 where U_exact are
/// the leading left singular vectors of od_exact.omega; otherwise throws
/// PreconditionError reporting the overlap.
SpectralRealization empirical_realization(const OmegaData& od_exact, const RealMatrix& u_hat,
                                          double pinv_tol = kSpectralPinvTolerance);

/// Minimal overlap accepted by empirical_realization.
inline constexpr double kFrameOverlapFloor = 1e-8;

/// t-site marginal of a learned realization. Not renormalized and not
/// projected: the trace and positivity are whatever the model produces.
DensityMatrix reconstruct_marginal(const SpectralRealization& sr, const HermitianBasis& basis, int t,
                                   std::int64_t dense_cap = kDefaultDenseCap);

/// Optional post-processing outside the reconstruction itself: clip
/// negative eigenvalues and rescale to unit trace.
DensityMatrix project_to_density(const DensityMatrix& rho, const HermitianBasis& basis);

}  // namespace fcs
