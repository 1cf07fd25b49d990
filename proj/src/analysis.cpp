#include "fcs/analysis.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace fcs {

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(fmt::format("trace distance of {}x{} and {}x{} matrices", a.rows(), a.cols(), b.rows(), b.cols()));
  }
  linalg::require_hermitian(a);
  linalg::require_hermitian(b);
  return 0.5 * linalg::trace_norm_hermitian(a - b);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) { return trace_distance(a.matrix, b.matrix); }

double hs_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.coefficients.size() != b.coefficients.size()) {
    throw DimensionError(fmt::format("HS distance of coefficient vectors of lengths {} and {}", a.coefficients.size(),
                                     b.coefficients.size()));
  }
  return (a.coefficients - b.coefficients).norm();
}

void ErrorParameters::validate() const {
  if (!(delta_1 >= 0.0 && delta_inf >= 0.0 && delta_cap >= 0.0)) {
    throw PreconditionError(fmt::format("error parameters must be non-negative ({}, {}, {})", delta_1, delta_inf, delta_cap));
  }
  if (t < 0) throw PreconditionError(fmt::format("site count {} must be non-negative", t));
}

double error_propagation_bound(const ErrorParameters& ep) {
  ep.validate();
  return (1.0 + ep.delta_1) * (1.0 + ep.delta_inf) * std::pow(1.0 + ep.delta_cap, ep.t) - 1.0;
}

PerturbationSizes perturbation_sizes(const OmegaData& exact, const OmegaData& noisy) {
  exact.check_shapes();
  noisy.check_shapes();
  const RealMatrix d_omega = exact.omega - noisy.omega;
  const RealMatrix d_dot = exact.omega_dot_flat() - noisy.omega_dot_flat();
  PerturbationSizes s;
  s.omega_fro = d_omega.norm();
  s.omega_op = linalg::operator_norm_2to2(d_omega);
  s.omega_dot_fro = d_dot.norm();
  s.omega_dot_op = linalg::operator_norm_2to2(d_dot);
  s.omega_one = (exact.omega_one - noisy.omega_one).norm();
  s.tau = (exact.tau - noisy.tau).norm();
  return s;
}

ErrorParameters surrogate_parameters(const PerturbationSizes& sizes, double sigma_m, int m_or_db, int d_a, int t,
                                     BoundVariant variant) {
  if (!(sigma_m > 0.0)) throw PreconditionError(fmt::format("sigma_m must be positive, got {}", sigma_m));
  if (m_or_db < 1 || d_a < 1) throw PreconditionError("memory and local dimensions must be >= 1");
  const double root3 = std::sqrt(3.0);
  const double c = variant == BoundVariant::CStar ? std::sqrt(static_cast<double>(m_or_db)) : 1.0;
  ErrorParameters ep;
  ep.t = t;
  ep.delta_inf = 2.0 * c * sizes.omega_one / (root3 * sigma_m);
  ep.delta_cap = 8.0 * m_or_db * std::sqrt(static_cast<double>(d_a)) / (root3 * sigma_m) *
                 (sizes.omega_fro / (sigma_m * sigma_m) + sizes.omega_dot_fro / (3.0 * sigma_m));
  ep.delta_1 = 4.0 * (sizes.omega_fro / (sigma_m * sigma_m) + sizes.tau / (3.0 * sigma_m));
  return ep;
}

PrecisionBudget precision_budget(double epsilon, double sigma_m, int m_or_db, int d_a, int t, BoundVariant variant) {
  if (!(sigma_m > 0.0)) throw PreconditionError(fmt::format("sigma_m must be positive, got {}", sigma_m));
  if (sigma_m > 1.0) throw PreconditionError(fmt::format("sigma_m must not exceed 1, got {}", sigma_m));
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError(fmt::format("epsilon must lie in (0, 1), got {}", epsilon));
  if (m_or_db < 1 || d_a < 1 || t < 1) throw PreconditionError("t, memory and local dimensions must be >= 1");
  const double root3 = std::sqrt(3.0);
  const double k = m_or_db;
  const double root_d = std::sqrt(static_cast<double>(d_a));
  const double s = sigma_m;
  PrecisionBudget b{epsilon, sigma_m, m_or_db, d_a, t, variant};
  b.tau_tol = 3.0 * s * epsilon / 4.0;
  b.omega_one_tol = root3 * s * epsilon / 2.0;
  if (variant == BoundVariant::CStar) b.omega_one_tol /= std::sqrt(k);
  b.omega_tol = std::min(s * s * epsilon / 4.0, root3 * s * s * s * epsilon / (8.0 * t * k * root_d)) / 3.0;
  b.omega_dot_tol = 3.0 * root3 * s * s * epsilon / (8.0 * t * k * root_d);
  b.aggregate = epsilon * s * s * s / (20.0 * t * k * root_d);
  return b;
}

double sigma_m(const RealMatrix& omega, int m) {
  const RealVector s = linalg::singular_values(omega);
  if (m < 1 || m > s.size()) throw DimensionError(fmt::format("sigma_m index {} outside [1, {}]", m, s.size()));
  if (!(s(m - 1) > 1e-12 * s(0))) {
    throw DimensionError(fmt::format("sigma_{} = {:.3e} is beyond the numerical rank", m, s(m - 1)));
  }
  return s(m - 1);
}

double omega_norm(const RealVector& xi, const RealMatrix& omega) {
  if (xi.size() != omega.cols()) {
    throw DimensionError(fmt::format("coefficient vector of length {} for Omega with {} columns", xi.size(), omega.cols()));
  }
  return (omega * xi).norm();
}

}  // namespace fcs
