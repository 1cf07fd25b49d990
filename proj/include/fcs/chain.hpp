#pragma once

// Finite chains generated by site-dependent Kraus isometries, their dense
// states, and the Omega^{[i,j,k]} matrices read off from them.
//
// v1 restriction: every site has the same local dimension d_a and the
// memory dimension d_b is constant along the chain.

#include "fcs/realization.hpp"

namespace fcs {

/// Site j (1-based) applies V_j : C^{d_b} -> C^{d_a} (x) C^{d_b}. The chain
/// state is obtained by preparing rho0 on the memory, applying V_1, ...,
/// V_N in turn, and discarding the memory at the end.
struct ChainRealization {
  int n = 0;
  int d_a = 0;
  int d_b = 0;
  std::vector<ComplexMatrix> v;  // n isometries, each (d_a d_b) x d_b
  ComplexMatrix rho0;

  void validate(double tol = 1e-10) const;
};

/// Independent Haar-random isometries per site; rho0 = 1/d_b.
ChainRealization random_chain(int n, int d_a, int d_b, std::uint64_t seed);

/// Dense N-site state by sequential channel application. Site 1 is the
/// most significant tensor factor.
ComplexMatrix chain_state(const ChainRealization& c, std::int64_t dense_cap = kDefaultDenseCap);

/// Reduced state of a homogeneous n-site density matrix on sites
/// first..last (1-based, inclusive). An empty range returns [[Tr rho]].
ComplexMatrix reduced_state(const ComplexMatrix& rho, int d, int n, int first, int last);

/// Omega^{[i,j,k]} and Omega_A^{[i,j,k]} of a dense chain state, with the
/// boundary convention Omega^{[i,j,k]} = Omega^{[max(1,i), j, min(k,N)]}.
/// Rows index the left block max(1,i)..j, columns the right block
/// j+1..min(k,N); an empty block contributes a single index.
class ChainOmega {
 public:
  ChainOmega(ComplexMatrix state, int d_a, int n);

  [[nodiscard]] int sites() const { return n_; }
  [[nodiscard]] int local_dim() const { return d_a_; }
  [[nodiscard]] const ComplexMatrix& state() const { return state_; }

  [[nodiscard]] RealMatrix omega(int i, int j, int k) const;

  /// Slices a = 0..d_a^2-1 of Omega_A^{[i,j,k]}: left block max(1,i)..j, A
  /// on site j+1, right block j+2..min(k,N).
  [[nodiscard]] std::vector<RealMatrix> omega_dot(int i, int j, int k) const;

 private:
  [[nodiscard]] RealVector block_coefficients(int first, int last) const;

  ComplexMatrix state_;
  int d_a_;
  int n_;
  HermitianBasis basis_;
};

}  // namespace fcs
