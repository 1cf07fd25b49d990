#include "fcs/lemmas.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace fcs {

namespace {

constexpr double kPhi = std::numbers::phi;

double smallest_singular(const RealMatrix& a, Eigen::Index k) {
  const RealVector s = linalg::singular_values(a);
  return k <= s.size() ? s(k - 1) : 0.0;
}

RealMatrix flatten(const std::vector<RealMatrix>& slices) {
  const Eigen::Index rows = slices.front().rows();
  const Eigen::Index cols = slices.front().cols();
  RealMatrix out(rows, cols * static_cast<Eigen::Index>(slices.size()));
  for (std::size_t a = 0; a < slices.size(); ++a) out.middleCols(static_cast<Eigen::Index>(a) * cols, cols) = slices[a];
  return out;
}

// Norm hypotheses are compared with a relative rounding allowance so that a
// perturbation scaled to exactly the admissible size still qualifies.
bool within_hypothesis(double norm, double limit) { return norm <= limit * (1.0 + 1e-12); }

}  // namespace

bool InequalityCheck::holds(double slack) const {
  return std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + slack * (1.0 + std::abs(rhs));
}

CheckStatus LemmaReport::status(double slack) const {
  if (!precondition_met) return CheckStatus::PreconditionUnmet;
  for (const auto& ineq : inequalities) {
    if (!ineq.monitored && !ineq.holds(slack)) return CheckStatus::Violated;
  }
  return CheckStatus::Holds;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Holds:
      return "holds";
    case CheckStatus::Violated:
      return "violated";
    case CheckStatus::PreconditionUnmet:
      return "precondition_unmet";
  }
  return "unknown";
}

LemmaReport lemma_b1_check(const RealMatrix& a, const RealMatrix& e) {
  if (a.rows() != e.rows() || a.cols() != e.cols()) throw DimensionError("lemma B.1: A and E differ in shape");
  LemmaReport rep{"weyl_singular_values", true, "none", {}};
  const RealVector s = linalg::singular_values(a);
  const RealVector st = linalg::singular_values(a + e);
  const double norm_e = linalg::operator_norm_2to2(e);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(s(i) - st(i)));
  rep.inequalities.push_back({"max_i |sigma_i - sigma~_i| <= ||E||", worst, norm_e});
  return rep;
}

LemmaReport lemma_b2_check(const RealMatrix& a, const RealMatrix& a_tilde) {
  if (a.rows() != a_tilde.rows() || a.cols() != a_tilde.cols()) throw DimensionError("lemma B.2: shapes differ");
  LemmaReport rep{"pseudoinverse_perturbation", true, "none", {}};
  const RealMatrix p = linalg::pseudoinverse(a);
  const RealMatrix pt = linalg::pseudoinverse(a_tilde);
  const double np = linalg::operator_norm_2to2(p);
  const double npt = linalg::operator_norm_2to2(pt);
  const double lhs = linalg::operator_norm_2to2(pt - p);
  const double rhs = kPhi * std::max(np * np, npt * npt) * linalg::operator_norm_2to2(a_tilde - a);
  rep.inequalities.push_back({"||A~+ - A+|| <= phi max(||A~+||^2, ||A+||^2) ||A~ - A||", lhs, rhs});
  return rep;
}

LemmaReport corollary_b3_check(const RealMatrix& a, const RealMatrix& e, double eps) {
  if (a.rows() != e.rows() || a.cols() != e.cols()) throw DimensionError("corollary B.3: A and E differ in shape");
  if (a.rows() < a.cols()) throw DimensionError("corollary B.3: A must have at least as many rows as columns");
  const Eigen::Index n = a.cols();
  LemmaReport rep{"left_singular_subspace", true, "", {}};
  const linalg::SvdResult f = linalg::svd(a);
  const double sigma_n = f.s(n - 1);
  const double norm_e = linalg::operator_norm_2to2(e);
  const bool full_rank = sigma_n > 1e-12 * f.s(0);
  rep.precondition_met = full_rank && eps < 1.0 && within_hypothesis(norm_e, eps * sigma_n);
  rep.precondition = fmt::format("rank n: {}; ||E|| = {:.6e} <= eps sigma_n = {:.6e}; eps = {} < 1", full_rank, norm_e,
                                 eps * sigma_n, eps);
  const linalg::FullSvdResult ft = linalg::full_svd(a + e);
  const double sigma_n_t = ft.s(n - 1);
  const RealMatrix u = f.u.leftCols(n);
  const RealMatrix u_perp = ft.u.rightCols(a.rows() - n);
  const double overlap = u_perp.size() == 0 ? 0.0 : linalg::operator_norm_2to2(u_perp.transpose() * u);
  rep.inequalities.push_back({"(1 - eps) sigma_n <= sigma~_n", (1.0 - eps) * sigma_n, sigma_n_t});
  rep.inequalities.push_back({"||U~_perp^T U|| <= ||E|| / sigma~_n", overlap, norm_e / sigma_n_t});
  return rep;
}

LemmaReport lemma_b5_check(const RealMatrix& omega, const RealMatrix& omega_hat, int m, double eps) {
  if (omega.rows() != omega_hat.rows() || omega.cols() != omega_hat.cols()) {
    throw DimensionError("lemma B.5: Omega and Omega_hat differ in shape");
  }
  const Eigen::Index k = std::min(omega.rows(), omega.cols());
  if (m < 1 || m > k) throw DimensionError(fmt::format("lemma B.5: rank {} outside [1, {}]", m, k));
  LemmaReport rep{"truncated_frame_perturbation", true, "", {}};
  const linalg::SvdResult f = linalg::svd(omega);
  const linalg::SvdResult fh = linalg::svd(omega_hat);
  const double sm = f.s(m - 1);
  const double norm_e = linalg::operator_norm_2to2(omega - omega_hat);
  rep.precondition_met = sm > 0.0 && eps < 0.5 && within_hypothesis(norm_e, eps * sm);
  rep.precondition =
      fmt::format("||Omega - Omega_hat|| = {:.6e} <= eps sigma_m = {:.6e}; eps = {} < 1/2", norm_e, eps * sm, eps);
  const double eps0 = norm_e * norm_e / ((1.0 - eps) * sm * (1.0 - eps) * sm);
  const RealMatrix u = f.u.leftCols(m);
  const RealMatrix uh = fh.u.leftCols(m);
  const double root = std::sqrt(std::max(0.0, 1.0 - eps0));
  rep.inequalities.push_back({"eps0 < 1", eps0, 1.0});
  rep.inequalities.push_back(
      {"(1 - eps) sigma_m <= sigma_m(U_hat^T Omega_hat)", (1.0 - eps) * sm, smallest_singular(uh.transpose() * omega_hat, m)});
  rep.inequalities.push_back({"sqrt(1 - eps0) <= sigma_m(U_hat^T U)", root, smallest_singular(uh.transpose() * u, m)});
  rep.inequalities.push_back(
      {"sqrt(1 - eps0) sigma_m <= sigma_m(U_hat^T Omega)", root * sm, smallest_singular(uh.transpose() * omega, m)});
  return rep;
}

LemmaReport lemma_43_check(const OmegaData& exact, const OmegaData& noisy, const SvdTruncation& truncation) {
  exact.check_shapes();
  noisy.check_shapes();
  const int m = truncation.rank();
  LemmaReport rep{"realization_estimates", true, "", {}};
  const linalg::SvdResult f = linalg::svd(exact.omega);
  if (m > f.s.size()) throw DimensionError("lemma 4.3: truncation rank exceeds Omega dimensions");
  const double sm = f.s(m - 1);
  const RealMatrix d_omega = exact.omega - noisy.omega;
  const double d_omega_op = linalg::operator_norm_2to2(d_omega);
  rep.precondition_met = sm > 0.0 && within_hypothesis(d_omega_op, sm / 3.0);
  rep.precondition = fmt::format("||Omega - Omega_hat|| = {:.6e} <= sigma_m / 3 = {:.6e}", d_omega_op, sm / 3.0);
  if (!rep.precondition_met) return rep;

  const RealMatrix& uh = truncation.u_hat;
  const SpectralRealization hat = spectral_realization(noisy, truncation);
  const SpectralRealization tilde = empirical_realization(exact, uh);

  const double s_hat = linalg::sigma(noisy.omega, m);
  const double s_u_omega = smallest_singular(uh.transpose() * exact.omega, m);
  const double s_u_omega_hat = smallest_singular(uh.transpose() * noisy.omega, m);
  const double floor = std::min(s_hat, s_u_omega);
  const RealMatrix d_dot = exact.omega_dot_flat() - noisy.omega_dot_flat();
  const double d_dot_op = linalg::operator_norm_2to2(d_dot);
  const double d_dot_fro = d_dot.norm();
  const double d_omega_fro = d_omega.norm();
  const double d_one = (exact.omega_one - noisy.omega_one).norm();
  const double d_tau = (exact.tau - noisy.tau).norm();

  const double k_gap = linalg::operator_norm_2to2(flatten(tilde.model.kappa) - flatten(hat.model.kappa));
  const double e_gap = (hat.model.e - tilde.model.e).norm();
  const double rho_gap = (hat.model.rho - tilde.model.rho).norm();
  const RealMatrix u = f.u.leftCols(m);
  const double inv_norm = 1.0 / smallest_singular(uh.transpose() * u, m);

  rep.inequalities.push_back(
      {"tildeKhatK", k_gap, kPhi * d_omega_op / (floor * floor) + d_dot_op / s_u_omega_hat});
  rep.inequalities.push_back({"bounde", e_gap, d_one});
  rep.inequalities.push_back(
      {"bounddelta12", rho_gap, kPhi * d_omega_fro / (floor * floor) + d_tau / s_u_omega_hat});
  rep.inequalities.push_back({"uupert", inv_norm, 2.0 / std::sqrt(3.0)});
  rep.inequalities.push_back(
      {"tildeKhatK_relaxed", k_gap, 4.0 * (d_omega_fro / (sm * sm) + d_dot_fro / (3.0 * sm)), true});
  rep.inequalities.push_back(
      {"bounddelta12_relaxed", rho_gap, 4.0 * (d_omega_fro / (sm * sm) + d_tau / (3.0 * sm)), true});
  return rep;
}

}  // namespace fcs
