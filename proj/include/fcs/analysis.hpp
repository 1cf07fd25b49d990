#pragma once

// Distances between states, the error-propagation bound, its 2-norm
// surrogate parameters, and the precision budget that guarantees a target
// trace-norm error.

#include "fcs/spectral.hpp"

namespace fcs {

/// Half the trace norm of a - b. Both must be Hermitian (within 1e-8).
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Hilbert-Schmidt distance ||a - b||_F, equal to the Euclidean distance of
/// the block-basis coefficient vectors.
double hs_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Error parameters delta_1, delta_inf, Delta for a t-site reconstruction.
struct ErrorParameters {
  double delta_1 = 0.0;
  double delta_inf = 0.0;
  double delta_cap = 0.0;
  int t = 1;

  void validate() const;
};

/// (1 + delta_1)(1 + delta_inf)(1 + Delta)^t - 1, a bound on the trace norm
/// (twice the trace distance) of the reconstruction error.
double error_propagation_bound(const ErrorParameters& ep);

/// General finitely correlated states use the memory dimension m; C*-states
/// use the memory Hilbert dimension d_B, with an extra sqrt(d_B) in delta_inf.
enum class BoundVariant { General, CStar };

/// Sizes of the estimation errors entering the bounds. Frobenius norms for
/// the budget quantities, spectral norms where the perturbation lemma uses
/// them. omega_dot uses the n_left x (d^2 n_right) flattening.
struct PerturbationSizes {
  double omega_fro = 0.0;
  double omega_op = 0.0;
  double omega_dot_fro = 0.0;
  double omega_dot_op = 0.0;
  double omega_one = 0.0;
  double tau = 0.0;
};

PerturbationSizes perturbation_sizes(const OmegaData& exact, const OmegaData& noisy);

/// Computable upper-bound surrogates of the error parameters in terms of
/// sigma_m(Omega) and the perturbation sizes:
///   delta_inf <= 2 c ||dOmega(1)|| / (sqrt(3) sigma_m)           (c = 1 or sqrt(d_B))
///   Delta     <= 8 k sqrt(d_A) / (sqrt(3) sigma_m) (||dOmega||_F / sigma_m^2 + ||dOmega_A||_F / (3 sigma_m))
///   delta_1   <= 4 (||dOmega||_F / sigma_m^2 + ||dtau|| / (3 sigma_m))
/// with k = m (General) or d_B (CStar). d_a is the local Hilbert dimension.
ErrorParameters surrogate_parameters(const PerturbationSizes& sizes, double sigma_m, int m_or_db, int d_a, int t,
                                     BoundVariant variant = BoundVariant::General);

/// Per-quantity tolerances that guarantee a trace-norm error of at most
/// (145/9) epsilon for a t-site reconstruction.
struct PrecisionBudget {
  double epsilon = 0.0;
  double sigma_m = 0.0;
  int m_or_db = 0;
  int d_a = 0;
  int t = 0;
  BoundVariant variant = BoundVariant::General;

  double tau_tol = 0.0;        // ||tau dOmega||_2
  double omega_one_tol = 0.0;  // ||dOmega(1)||_2
  double omega_tol = 0.0;      // ||dOmega||_F
  double omega_dot_tol = 0.0;  // ||dOmega_A||_F
  double aggregate = 0.0;      // single precision epsilon sigma_m^3 / (20 t k sqrt(d_A))

  static constexpr double kGuaranteeConstant = 145.0 / 9.0;
  [[nodiscard]] double guaranteed_error() const { return kGuaranteeConstant * epsilon; }
};

/// Requires sigma_m in (0, 1], epsilon in (0, 1), t, m_or_db, d_a >= 1.
PrecisionBudget precision_budget(double epsilon, double sigma_m, int m_or_db, int d_a, int t,
                                 BoundVariant variant = BoundVariant::General);

/// m-th singular value of omega (1-based); throws if m exceeds the rank
/// at threshold 1e-12 sigma_1 or min(rows, cols).
double sigma_m(const RealMatrix& omega, int m);

/// ||Omega xi||_2 for a right-block coefficient vector xi.
double omega_norm(const RealVector& xi, const RealMatrix& omega);

}  // namespace fcs
