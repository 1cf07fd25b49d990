#pragma once

// Finitely correlated states: linear realizations, C*-realizations built
// from a Kraus isometry, exact evaluation of correlation words and of
// t-site marginals, and the rank profile of the Omega matrices.

#include "fcs/opbasis.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace fcs {

using linalg::ComplexMatrix;

/// Largest Hilbert-space dimension d_A^t for which dense marginals are
/// built unless the caller overrides it.
inline constexpr std::int64_t kDefaultDenseCap = 2187;

/// Linear realization (C^m, kappa, e, rho) of a translation-invariant state:
/// omega(A_1 (x) ... (x) A_n) = rho^T K_{A_1} ... K_{A_n} e with
/// K_A = sum_a Tr(lambda_a A) kappa[a].
///
/// The struct itself does not enforce its invariants because learned
/// realizations need not satisfy them; call validate() on ground truth.
struct Realization {
  int d_a = 0;
  int m = 0;
  std::vector<RealMatrix> kappa;  // d_a^2 matrices, each m x m
  RealVector e;
  RealVector rho;

  /// Shapes only.
  void check_shapes() const;

  /// Shapes, stationarity (rho K_1 = rho, K_1 e = e within tol) and
  /// rho . e = 1 within norm_tol. Throws PreconditionError.
  void validate(double tol = 1e-10, double norm_tol = 1e-12) const;

  /// Transfer matrix of the identity, sqrt(d_a) * kappa[0].
  [[nodiscard]] RealMatrix identity_transfer() const;
};

/// C*-realization: E_A(B) = V^dagger (A (x) B) V with V an isometry from
/// C^{d_b} into C^{d_a} (x) C^{d_b} (row index a * d_b + b) and initial
/// memory state rho0.
struct CStarRealization {
  int d_a = 0;
  int d_b = 0;
  ComplexMatrix v;
  ComplexMatrix rho0;

  /// Isometry, density-matrix and stationarity checks. Throws
  /// PreconditionError.
  void validate(double tol = 1e-10) const;

  /// Schroedinger-picture transfer map sigma -> Tr_A(V sigma V^dagger).
  [[nodiscard]] ComplexMatrix transfer(const ComplexMatrix& sigma) const;

  /// E_A(B) = V^dagger (A (x) B) V.
  [[nodiscard]] ComplexMatrix heisenberg(const ComplexMatrix& a, const ComplexMatrix& b) const;
};

/// rho^T (sum_a w_1a kappa[a]) ... (sum_a w_ta kappa[a]) e.
double evaluate_word(const Realization& r, const std::vector<RealVector>& word);

/// Word value for a block-basis multi-index, i.e. omega(lambda_{i1} (x) ...).
double evaluate_basis_word(const Realization& r, std::span<const int> multi);

/// All (d_a^2)^t basis-word values omega(Lambda_I), flat index as in
/// opbasis. These are the block-basis coefficients of the t-site marginal.
RealVector word_coefficients(const Realization& r, int t);

/// Row vectors rho^T K_I stacked over the (d_a^2)^t left words (rows x m).
RealMatrix left_products(const Realization& r, int t);

/// Column vectors K_J e stacked over the (d_a^2)^t right words (m x cols).
RealMatrix right_products(const Realization& r, int t);

/// Dense t-site marginal. Throws PreconditionError when d_a^t exceeds the cap.
DensityMatrix marginal(const Realization& r, const HermitianBasis& basis, int t,
                       std::int64_t dense_cap = kDefaultDenseCap);

/// Coordinates of a C*-realization in the Gell-Mann basis of the memory
/// algebra: kappa[a](i, j) = Tr(mu_i E_{lambda_a}(mu_j)), e = coefficients
/// of the identity, rho = coefficients of rho0.
Realization from_cstar(const CStarRealization& c, const HermitianBasis& basis);

/// Spin-1 valence-bond family on C^3 with two-dimensional memory. Spin
/// ordering |1>,|0>,|-1> for the site and |1/2>,|-1/2> for the memory.
/// theta in [0, pi); cos(theta) = sqrt(2/3) is the AKLT ground state.
CStarRealization aklt(double theta);

/// Convenience for the AKLT point cos(theta) = sqrt(2/3).
double aklt_theta();

/// Haar-random isometry (QR of a seeded complex Gaussian matrix with the
/// phases of R's diagonal fixed) with rho0 the fixed point of the transfer
/// map, found by power iteration from 1/d_b. Throws ConvergenceError when
/// the iteration has not settled to 1e-12 after 1e5 steps.
CStarRealization random_cstar(int d_a, int d_b, std::uint64_t seed);

/// Haar-random isometry C^{d_b} -> C^{d_a} (x) C^{d_b}: QR of a seeded
/// complex Gaussian matrix, columns rephased so R has a positive diagonal.
ComplexMatrix haar_isometry(int d_a, int d_b, std::uint64_t seed);

/// Product state phi^{(x) infinity}; m = 1 and kappa[a] = Tr(phi lambda_a).
Realization product_realization(const ComplexMatrix& phi, const HermitianBasis& basis);

/// Stationary state of sigma -> Tr_A(V sigma V^dagger) by power iteration.
ComplexMatrix stationary_state(const ComplexMatrix& v, int d_a, int d_b, int max_steps = 100000,
                               double tol = 1e-12);

struct RankProfile {
  /// ranks(i-1, j-1) = rank of Omega with right block i and left block j.
  Eigen::MatrixXi ranks;
  /// Smallest (i, j), ordered by i + j then i, whose rank equals the rank at
  /// (max_block, max_block).
  [[nodiscard]] std::pair<int, int> t_star() const;
  [[nodiscard]] int final_rank() const { return ranks(ranks.rows() - 1, ranks.cols() - 1); }
};

/// Numerical rank (threshold 1e-9 sigma_1) of every Omega matrix with block
/// sizes up to max_block. The largest Omega has (d_a^2)^max_block rows.
RankProfile rank_profile(const Realization& r, int max_block, double rel_threshold = 1e-9);

/// Numerical rank of an explicit Omega matrix at threshold rel * sigma_1.
int numerical_rank(const RealMatrix& omega, double rel_threshold = 1e-9);

}  // namespace fcs
