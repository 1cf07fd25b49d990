#include "fcs/noise.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <random>

namespace fcs {

namespace {

double direction_norm(const RealMatrix& p, NoiseNorm norm) {
  return norm == NoiseNorm::Frobenius ? p.norm() : linalg::operator_norm_2to2(p);
}

struct LocalEigen {
  std::vector<RealVector> values;       // per basis element
  std::vector<ComplexMatrix> vectors;   // columns are eigenvectors
};

LocalEigen local_eigen(const HermitianBasis& basis) {
  LocalEigen out;
  for (const auto& el : basis.elements()) {
    const linalg::HermitianEigen eig = linalg::hermitian_eigen(el);
    out.values.push_back(eig.eigenvalues);
    out.vectors.push_back(eig.eigenvectors);
  }
  return out;
}

// Outcome probabilities and eigenvalues of one block element measured in
// its product eigenbasis.
struct Outcomes {
  RealVector prob;
  RealVector value;
};

Outcomes block_outcomes(const DensityMatrix& exact, const LocalEigen& le, std::span<const int> multi) {
  ComplexMatrix w = ComplexMatrix::Ones(1, 1);
  RealVector g = RealVector::Ones(1);
  for (int i : multi) {
    w = linalg::kron(w, le.vectors[i]);
    RealVector next(g.size() * le.values[i].size());
    for (Eigen::Index a = 0; a < g.size(); ++a) {
      next.segment(a * le.values[i].size(), le.values[i].size()) = g(a) * le.values[i];
    }
    g.swap(next);
  }
  const ComplexMatrix rw = exact.matrix * w;
  RealVector p(w.cols());
  for (Eigen::Index k = 0; k < w.cols(); ++k) p(k) = w.col(k).dot(rw.col(k)).real();

  const double worst = p.minCoeff();
  if (worst < 0.0) {
    if (worst < -1e-9) {
      spdlog::warn("tomography: negative outcome probability {:.3e}; clipping and renormalizing", worst);
    }
    p = p.cwiseMax(0.0);
  }
  const double total = p.sum();
  if (!(total > 0.0)) throw PreconditionError("tomography: outcome distribution has no mass");
  p /= total;
  return {p, g};
}

// Var = <G^2> - <G>^2 loses everything below the roundoff of <G^2>; an
// operator with a single eigenvalue must come out exactly noiseless.
double outcome_variance(const Outcomes& o, double mean) {
  const double second = o.prob.dot(o.value.cwiseAbs2());
  const double var = second - mean * mean;
  return var > 64.0 * std::numeric_limits<double>::epsilon() * second ? var : 0.0;
}

}  // namespace

RealMatrix perturb_matrix(const RealMatrix& a, double epsilon, Rng& rng, NoiseNorm norm) {
  if (!(epsilon >= 0.0)) throw PreconditionError(fmt::format("noise level {} must be non-negative", epsilon));
  RealMatrix p(a.rows(), a.cols());
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    for (Eigen::Index r = 0; r < p.rows(); ++r) p(r, c) = rng.normal();
  }
  const double n = direction_norm(p, norm);
  if (epsilon == 0.0 || n == 0.0) return a;
  return a + (epsilon / n) * p;
}

RealVector perturb_vector(const RealVector& v, double epsilon, Rng& rng) {
  return perturb_matrix(v, epsilon, rng, NoiseNorm::Frobenius);
}

OmegaData perturb_omega_data(const OmegaData& od, double epsilon, double epsilon_prime, Rng& rng, NoiseNorm norm) {
  od.check_shapes();
  if (!(epsilon_prime >= 0.0)) throw PreconditionError(fmt::format("noise level {} must be non-negative", epsilon_prime));
  OmegaData out = od;
  out.omega = perturb_matrix(od.omega, epsilon, rng, norm);
  for (std::size_t k = 0; k < od.omega_dot.size(); ++k) {
    out.omega_dot[k] = perturb_matrix(od.omega_dot[k], epsilon_prime, rng, norm);
  }
  out.omega_one = perturb_vector(od.omega_one, epsilon, rng);
  out.tau = perturb_vector(od.tau, epsilon, rng);
  return out;
}

ChainOmegaData perturb_chain_omega_data(const ChainOmegaData& od, double epsilon, double epsilon_prime, Rng& rng,
                                        NoiseNorm norm) {
  od.check_shapes();
  ChainOmegaData out = od;
  for (int j = 1; j < od.n; ++j) out.omega[j] = perturb_matrix(od.omega[j], epsilon, rng, norm);
  for (int j = 1; j <= od.n; ++j) {
    for (std::size_t a = 0; a < od.omega_dot[j].size(); ++a) {
      out.omega_dot[j][a] = perturb_matrix(od.omega_dot[j][a], epsilon_prime, rng, norm);
    }
  }
  return out;
}

ShotMoments shot_moments(const DensityMatrix& exact, const HermitianBasis& basis, std::int64_t flat_index) {
  const LocalEigen le = local_eigen(basis);
  const auto multi = decode_block_index(flat_index, basis.dim(), exact.sites);
  const Outcomes o = block_outcomes(exact, le, multi);
  const double mean = o.prob.dot(o.value);
  return {mean, outcome_variance(o, mean)};
}

RealVector simulate_tomography(const DensityMatrix& exact, const HermitianBasis& basis, std::int64_t shots,
                               ShotMode mode, Rng& rng) {
  if (shots < 1) throw PreconditionError(fmt::format("shot count must be >= 1, got {}", shots));
  if (exact.d != basis.dim()) throw DimensionError("tomography: basis does not match the state");
  const LocalEigen le = local_eigen(basis);
  const std::int64_t n_elements = block_size(basis.dim(), exact.sites);
  RealVector out(n_elements);
  const double n = static_cast<double>(shots);
  for (std::int64_t idx = 0; idx < n_elements; ++idx) {
    const auto multi = decode_block_index(idx, basis.dim(), exact.sites);
    const Outcomes o = block_outcomes(exact, le, multi);
    if (mode == ShotMode::Gaussian) {
      const double mean = o.prob.dot(o.value);
      const double var = outcome_variance(o, mean);
      out(idx) = mean + std::sqrt(var / n) * rng.normal();
      continue;
    }
    std::int64_t remaining = shots;
    double mass = 1.0;
    double acc = 0.0;
    const Eigen::Index last = o.prob.size() - 1;
    for (Eigen::Index k = 0; k <= last && remaining > 0; ++k) {
      std::int64_t count = remaining;
      if (k < last) {
        const double q = mass > 0.0 ? std::clamp(o.prob(k) / mass, 0.0, 1.0) : 1.0;
        std::binomial_distribution<std::int64_t> draw(remaining, q);
        count = draw(rng.engine());
      }
      acc += static_cast<double>(count) * o.value(k);
      remaining -= count;
      mass -= o.prob(k);
    }
    out(idx) = acc / n;
  }
  return out;
}

}  // namespace fcs
