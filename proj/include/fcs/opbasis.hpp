#pragma once

// Orthonormal Hermitian operator bases (normalized Gell-Mann matrices) and
// their tensor-product extensions to blocks of s sites.
//
// Flattening: a block element is lambda_{i1} (x) ... (x) lambda_{is} with
// flat index sum_k i_k * (d^2)^(s-k), i.e. the leftmost site is the most
// significant digit and the leftmost Kronecker factor.

#include "fcs/linalg.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fcs {

using linalg::ComplexMatrix;
using linalg::RealMatrix;
using linalg::RealVector;

class HermitianBasis {
 public:
  /// Normalized Gell-Mann basis of d x d matrices, d >= 2.
  ///
  /// Element 0 is 1/sqrt(d). The traceless generators are grouped by the
  /// larger level k = 1..d-1: for each j < k the symmetric and then the
  /// antisymmetric pair on (j, k), followed by the k-th diagonal matrix.
  /// For d = 3 this is lambda_1..lambda_8 in the usual numbering.
  static HermitianBasis gellmann(int d);

  /// Same as gellmann(d) but also admits d = 1 (the basis {[1]}), which
  /// is what a trivial memory algebra needs.
  static HermitianBasis for_algebra(int d);

  [[nodiscard]] int dim() const { return d_; }
  [[nodiscard]] int size() const { return d_ * d_; }
  [[nodiscard]] const ComplexMatrix& operator[](int i) const { return elements_.at(i); }
  [[nodiscard]] const std::vector<ComplexMatrix>& elements() const { return elements_; }

  /// d^2 x d^2 matrix with entry (r*d + c, i) = lambda_i(r, c).
  [[nodiscard]] const ComplexMatrix& entry_table() const { return table_; }

 private:
  explicit HermitianBasis(int d);
  int d_;
  std::vector<ComplexMatrix> elements_;
  ComplexMatrix table_;
};

/// Number of block basis elements, (d^2)^s.
std::int64_t block_size(int d, int s);

/// Flat index <-> multi-index conversion for blocks of s sites.
std::int64_t encode_block_index(std::span<const int> multi, int d);
std::vector<int> decode_block_index(std::int64_t flat, int d, int s);

/// Kronecker product of single-site elements in site order.
ComplexMatrix block_element(const HermitianBasis& basis, std::span<const int> multi);
ComplexMatrix block_element(const HermitianBasis& basis, std::int64_t flat, int s);

/// Coefficients Tr(Lambda_I m) of a d^s x d^s matrix. For Hermitian m they
/// are real; imaginary parts above 1e-10 (relative to ||m||_F, floor 1)
/// raise PreconditionError, smaller ones are discarded.
RealVector expand_in_basis(const ComplexMatrix& m, const HermitianBasis& basis, int s);

/// Inverse of expand_in_basis: sum_I c_I Lambda_I.
ComplexMatrix assemble_from_coefficients(const RealVector& coeffs, const HermitianBasis& basis, int s);

/// A t-site density matrix (or an estimate of one) together with its
/// coefficient vector in the block basis.
struct DensityMatrix {
  int d = 0;
  int sites = 0;
  ComplexMatrix matrix;
  RealVector coefficients;

  [[nodiscard]] double trace() const { return matrix.trace().real(); }
};

DensityMatrix density_from_coefficients(RealVector coeffs, const HermitianBasis& basis, int sites);
DensityMatrix density_from_matrix(ComplexMatrix m, const HermitianBasis& basis, int sites);

/// Integer power with overflow check.
std::int64_t checked_pow(std::int64_t base, int exp);

}  // namespace fcs
