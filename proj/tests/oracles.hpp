#pragma once

// Reference computations for the tests. They deliberately avoid the
// library's realization, basis-transform and spectral code paths: states
// and correlators are built by brute-force dense contraction, and
// matrix facts come from closed forms or plain iterations.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Cplx = std::complex<double>;

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out = CMat::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Heisenberg-picture word value Tr(rho0 E_{A1}(E_{A2}(... E_{An}(1)))),
/// E_A(B) = V^dagger (A (x) B) V.
inline Cplx heisenberg_word(const CMat& v, const CMat& rho0, const std::vector<CMat>& word) {
  const Eigen::Index db = rho0.rows();
  CMat b = CMat::Identity(db, db);
  for (auto it = word.rbegin(); it != word.rend(); ++it) b = v.adjoint() * kron(*it, b) * v;
  return (rho0 * b).trace();
}

/// Schroedinger-picture t-site marginal: apply V t times to rho0, each
/// time appending a site just before the memory, then trace out memory.
inline CMat schrodinger_marginal(const CMat& v, const CMat& rho0, int d_a, int t) {
  const Eigen::Index db = rho0.rows();
  CMat joint = rho0;  // (d_a^k d_b) square
  Eigen::Index dim_sites = 1;
  for (int k = 0; k < t; ++k) {
    const CMat w = kron(CMat::Identity(dim_sites, dim_sites), v);
    joint = w * joint * w.adjoint();
    dim_sites *= d_a;
  }
  CMat out = CMat::Zero(dim_sites, dim_sites);
  for (Eigen::Index i = 0; i < dim_sites; ++i)
    for (Eigen::Index j = 0; j < dim_sites; ++j)
      for (Eigen::Index b = 0; b < db; ++b) out(i, j) += joint(i * db + b, j * db + b);
  return out;
}

/// Schroedinger-picture state of a non-homogeneous chain, sites in order.
inline CMat chain_state(const std::vector<CMat>& vs, const CMat& rho0, int d_a) {
  const Eigen::Index db = rho0.rows();
  CMat joint = rho0;
  Eigen::Index dim_sites = 1;
  for (const auto& v : vs) {
    const CMat w = kron(CMat::Identity(dim_sites, dim_sites), v);
    joint = w * joint * w.adjoint();
    dim_sites *= d_a;
  }
  CMat out = CMat::Zero(dim_sites, dim_sites);
  for (Eigen::Index i = 0; i < dim_sites; ++i)
    for (Eigen::Index j = 0; j < dim_sites; ++j)
      for (Eigen::Index b = 0; b < db; ++b) out(i, j) += joint(i * db + b, j * db + b);
  return out;
}

/// The eight Gell-Mann matrices in the textbook numbering, divided by
/// sqrt(2), preceded by 1/sqrt(3).
inline std::vector<CMat> gellmann3() {
  const Cplx i(0.0, 1.0);
  std::vector<CMat> g(9, CMat::Zero(3, 3));
  g[0] = CMat::Identity(3, 3) / std::sqrt(3.0);
  g[1](0, 1) = g[1](1, 0) = 1.0;
  g[2](0, 1) = -i;
  g[2](1, 0) = i;
  g[3](0, 0) = 1.0;
  g[3](1, 1) = -1.0;
  g[4](0, 2) = g[4](2, 0) = 1.0;
  g[5](0, 2) = -i;
  g[5](2, 0) = i;
  g[6](1, 2) = g[6](2, 1) = 1.0;
  g[7](1, 2) = -i;
  g[7](2, 1) = i;
  g[8](0, 0) = g[8](1, 1) = 1.0 / std::sqrt(3.0);
  g[8](2, 2) = -2.0 / std::sqrt(3.0);
  for (int k = 1; k < 9; ++k) g[k] /= std::sqrt(2.0);
  return g;
}

/// Eigenvalues of a real symmetric 3x3 matrix by the trigonometric
/// solution of the characteristic cubic, ascending.
inline Eigen::Vector3d symmetric3_eigenvalues(const Eigen::Matrix3d& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  Eigen::Vector3d out;
  if (p1 == 0.0) {
    out << a(0, 0), a(1, 1), a(2, 2);
    std::sort(out.data(), out.data() + 3);
    return out;
  }
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  out << e3, 3.0 * q - e1 - e3, e1;
  return out;
}

/// Spectral norm by power iteration on a^T a.
inline double power_norm(const RMat& a, int iters = 2000) {
  if (a.size() == 0) return 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(a.cols());
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) += 0.01 * static_cast<double>(k);
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXd y = a.transpose() * (a * x);
    const double n = y.norm();
    if (n == 0.0) return 0.0;
    lambda = n / x.norm();
    x = y / n;
  }
  return std::sqrt(lambda);
}

/// Pseudoinverse of a full-column-rank matrix via the normal equations.
inline RMat normal_equation_pinv(const RMat& a) {
  return (a.transpose() * a).inverse() * a.transpose();
}

/// Trace distance of two qubit states from their Bloch vectors.
inline double qubit_trace_distance(const CMat& a, const CMat& b) {
  auto bloch = [](const CMat& r) {
    return Eigen::Vector3d(2.0 * r(0, 1).real(), -2.0 * r(0, 1).imag(), (r(0, 0) - r(1, 1)).real());
  };
  return 0.5 * (bloch(a) - bloch(b)).norm();
}

/// Spin-1 S^z in the ordering |1>, |0>, |-1>.
inline CMat spin1_sz() {
  CMat s = CMat::Zero(3, 3);
  s(0, 0) = 1.0;
  s(2, 2) = -1.0;
  return s;
}

/// AKLT two-point function <S^z_0 S^z_r> = (4/3)(-1/3)^r for r >= 1.
inline double aklt_szsz(int r) { return 4.0 / 3.0 * std::pow(-1.0 / 3.0, r); }

/// Random complex density matrix of dimension d (Wishart, seeded).
inline CMat random_density(int d, unsigned seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> n;
  CMat x(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = Cplx(n(g), n(g));
  CMat r = x * x.adjoint();
  return r / r.trace();
}

}  // namespace oracle
