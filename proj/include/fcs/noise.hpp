#pragma once

// Simulated estimation error: Gaussian matrix perturbations of fixed norm
// and a finite-shot tomography simulator.

#include "fcs/nonhomog.hpp"
#include "fcs/rng.hpp"
#include "fcs/spectral.hpp"

namespace fcs {

/// Norm used to normalize a Gaussian perturbation direction. With
/// Frobenius (the default) ||out - a||_F equals epsilon; with Spectral the
/// operator norm does.
enum class NoiseNorm { Frobenius, Spectral };

/// a + epsilon P / ||P|| with P i.i.d. standard normal entries, drawn
/// column-major from rng. The draw happens even for epsilon = 0 so the
/// stream position does not depend on epsilon.
RealMatrix perturb_matrix(const RealMatrix& a, double epsilon, Rng& rng, NoiseNorm norm = NoiseNorm::Frobenius);

/// Vector version, normalized in the Euclidean norm.
RealVector perturb_vector(const RealVector& v, double epsilon, Rng& rng);

/// Perturbs omega at epsilon, each omega_dot slice independently at
/// epsilon_prime, and omega_one and tau at epsilon (Euclidean norm). Draw
/// order: omega, slices 0..d^2-1, omega_one, tau.
OmegaData perturb_omega_data(const OmegaData& od, double epsilon, double epsilon_prime, Rng& rng,
                             NoiseNorm norm = NoiseNorm::Frobenius);

/// Chain analogue: omega[j] (1 <= j <= n-1) at epsilon, every omega_dot[j]
/// slice at epsilon_prime. The boundary entries omega[0], omega[n] are not
/// used by the reconstruction and are copied.
ChainOmegaData perturb_chain_omega_data(const ChainOmegaData& od, double epsilon, double epsilon_prime, Rng& rng,
                                        NoiseNorm norm = NoiseNorm::Frobenius);

enum class ShotMode { Gaussian, Multinomial };

/// Estimated block-basis coefficients of an s-site state from n shots per
/// basis element. Each Lambda_I = sum_k g_k Pi_k is measured in its
/// eigenbasis (products of single-site eigenbases); Multinomial draws the
/// outcome counts, Gaussian adds N(0, (<G^2> - <G>^2)/n) to the exact value.
/// Negative outcome probabilities below -1e-9 are clipped and the rest
/// renormalized, with a logged warning.
RealVector simulate_tomography(const DensityMatrix& exact, const HermitianBasis& basis, std::int64_t shots,
                               ShotMode mode, Rng& rng);

/// Exact mean and variance of a single-shot measurement of Lambda_I.
struct ShotMoments {
  double mean = 0.0;
  double variance = 0.0;
};
ShotMoments shot_moments(const DensityMatrix& exact, const HermitianBasis& basis, std::int64_t flat_index);

}  // namespace fcs
