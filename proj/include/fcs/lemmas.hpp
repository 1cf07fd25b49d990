#pragma once

// Numerical checkers for the matrix perturbation inequalities behind the
// error analysis. Every checker evaluates both sides of each inequality and
// reports them; a report whose hypothesis does not hold is marked
// PreconditionUnmet instead of passing vacuously.
//
// All norms here are spectral unless an inequality name says "_fro".

#include "fcs/spectral.hpp"

#include <string>

namespace fcs {

/// Absolute-plus-relative slack: lhs <= rhs + slack * (1 + |rhs|).
inline constexpr double kLemmaSlack = 1e-9;

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  /// Monitored inequalities are reported but do not affect the status.
  bool monitored = false;

  [[nodiscard]] double margin() const { return rhs - lhs; }
  [[nodiscard]] bool holds(double slack = kLemmaSlack) const;
};

enum class CheckStatus { Holds, Violated, PreconditionUnmet };

struct LemmaReport {
  std::string lemma;
  bool precondition_met = true;
  std::string precondition;  // human-readable hypothesis with its value
  std::vector<InequalityCheck> inequalities;

  [[nodiscard]] CheckStatus status(double slack = kLemmaSlack) const;
  [[nodiscard]] bool holds(double slack = kLemmaSlack) const { return status(slack) == CheckStatus::Holds; }
};

const char* to_string(CheckStatus s);

/// |sigma_i(A) - sigma_i(A + E)| <= ||E|| for every i (reports the worst i).
LemmaReport lemma_b1_check(const RealMatrix& a, const RealMatrix& e);

/// ||A~^+ - A^+|| <= phi max(||A~^+||^2, ||A^+||^2) ||A~ - A||, phi the golden ratio.
LemmaReport lemma_b2_check(const RealMatrix& a, const RealMatrix& a_tilde);

/// A is m x n with m >= n and rank n; hypothesis ||E|| <= eps sigma_n, eps < 1.
/// Conclusions: sigma~_n >= (1 - eps) sigma_n and ||U~_perp^T U|| <= ||E|| / sigma~_n.
LemmaReport corollary_b3_check(const RealMatrix& a, const RealMatrix& e, double eps);

/// Hypothesis ||Omega - Omega_hat|| <= eps sigma_m(Omega), eps < 1/2. With
/// eps0 = ||Omega - Omega_hat||^2 / ((1 - eps) sigma_m)^2: eps0 < 1,
/// sigma_m(U_hat^T Omega_hat) >= (1 - eps) sigma_m,
/// sigma_m(U_hat^T U) >= sqrt(1 - eps0), sigma_m(U_hat^T Omega) >= sqrt(1 - eps0) sigma_m.
LemmaReport lemma_b5_check(const RealMatrix& omega, const RealMatrix& omega_hat, int m, double eps);

/// Bounds relating the empirical realization (exact data, estimated frame)
/// to the spectral one (estimated data) under ||Omega - Omega_hat|| <=
/// sigma_m(Omega) / 3:
///   K:   ||K~ - K^|| <= phi ||dOmega|| / min(sigma_m(Omega_hat), sigma_m(U^T Omega))^2
///                       + ||dOmega_A|| / sigma_m(U^T Omega_hat)
///   e:   ||e^ - e~|| <= ||dOmega(1)||
///   rho: ||rho^ - rho~|| <= phi ||dOmega||_F / min(...)^2 + ||dtau|| / sigma_m(U^T Omega_hat)
///   U:   ||(U_hat^T U)^-1|| <= 2 / sqrt(3)
/// ||K~ - K^|| is sigma_1 of the m x (d^2 m) flattening [K_0 | K_1 | ...].
/// The relaxed forms 4(...) of the K and rho bounds are reported as
/// monitored entries.
LemmaReport lemma_43_check(const OmegaData& exact, const OmegaData& noisy, const SvdTruncation& truncation);

}  // namespace fcs
