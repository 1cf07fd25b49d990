#include "fcs/opbasis.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace fcs {

namespace {

using linalg::Complex;
using linalg::ComplexVector;

// Digit spreading tables mapping matrix row/column indices of a d^s x d^s
// matrix to the site-interleaved index sum_k (r_k d + c_k) (d^2)^(s-1-k).
struct Interleave {
  std::vector<std::int64_t> row;
  std::vector<std::int64_t> col;
};

Interleave interleave_tables(int d, int s) {
  const std::int64_t dim = checked_pow(d, s);
  Interleave t{std::vector<std::int64_t>(dim), std::vector<std::int64_t>(dim)};
  const std::int64_t d2 = static_cast<std::int64_t>(d) * d;
  for (std::int64_t x = 0; x < dim; ++x) {
    std::int64_t rest = x, weight = 1, spread = 0;
    for (int k = 0; k < s; ++k) {
      spread += (rest % d) * weight;
      rest /= d;
      weight *= d2;
    }
    t.col[x] = spread;
    t.row[x] = spread * d;
  }
  return t;
}

// Applies v <- (W (x) ... (x) W) v, the same d2 x d2 matrix on every site,
// expressed through the right-multiplied factor wt = W^T.
ComplexVector apply_all_modes(ComplexVector v, const ComplexMatrix& wt, int s) {
  const Eigen::Index d2 = wt.rows();
  ComplexVector out(v.size());
  for (int k = s - 1; k >= 0; --k) {
    Eigen::Index left = 1;
    for (int q = 0; q < k; ++q) left *= d2;
    const Eigen::Index right = v.size() / (left * d2);
    for (Eigen::Index l = 0; l < left; ++l) {
      const Eigen::Map<const ComplexMatrix> in(v.data() + l * d2 * right, right, d2);
      Eigen::Map<ComplexMatrix> dst(out.data() + l * d2 * right, right, d2);
      dst.noalias() = in * wt;
    }
    v.swap(out);
  }
  return v;
}

void require_block_dim(const ComplexMatrix& m, int d, int s) {
  const std::int64_t dim = checked_pow(d, s);
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionError(fmt::format("expected a {}x{} matrix for {} sites of dimension {}, got {}x{}", dim,
                                     dim, s, d, m.rows(), m.cols()));
  }
}

}  // namespace

std::int64_t checked_pow(std::int64_t base, int exp) {
  if (exp < 0) throw DimensionError(fmt::format("negative exponent {}", exp));
  std::int64_t out = 1;
  for (int k = 0; k < exp; ++k) {
    if (base != 0 && out > std::numeric_limits<std::int64_t>::max() / base) {
      throw DimensionError(fmt::format("{}^{} overflows", base, exp));
    }
    out *= base;
  }
  return out;
}

HermitianBasis::HermitianBasis(int d) : d_(d) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  elements_.reserve(static_cast<std::size_t>(d) * d);
  elements_.push_back(ComplexMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  for (int k = 1; k < d; ++k) {
    for (int j = 0; j < k; ++j) {
      ComplexMatrix sym = ComplexMatrix::Zero(d, d);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      elements_.push_back(sym);
      ComplexMatrix anti = ComplexMatrix::Zero(d, d);
      anti(j, k) = Complex(0.0, -inv_sqrt2);
      anti(k, j) = Complex(0.0, inv_sqrt2);
      elements_.push_back(anti);
    }
    ComplexMatrix diag = ComplexMatrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int q = 0; q < k; ++q) diag(q, q) = norm;
    diag(k, k) = -static_cast<double>(k) * norm;
    elements_.push_back(diag);
  }
  table_.resize(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d * d; ++i) {
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) table_(r * d + c, i) = elements_[i](r, c);
    }
  }
}

HermitianBasis HermitianBasis::gellmann(int d) {
  if (d < 2) throw DimensionError(fmt::format("Gell-Mann basis needs d >= 2, got {}", d));
  return HermitianBasis(d);
}

HermitianBasis HermitianBasis::for_algebra(int d) {
  if (d < 1) throw DimensionError(fmt::format("algebra dimension must be positive, got {}", d));
  return HermitianBasis(d);
}

std::int64_t block_size(int d, int s) { return checked_pow(static_cast<std::int64_t>(d) * d, s); }

std::int64_t encode_block_index(std::span<const int> multi, int d) {
  const int d2 = d * d;
  std::int64_t flat = 0;
  for (int i : multi) {
    if (i < 0 || i >= d2) throw DimensionError(fmt::format("basis index {} out of range [0, {})", i, d2));
    flat = flat * d2 + i;
  }
  return flat;
}

std::vector<int> decode_block_index(std::int64_t flat, int d, int s) {
  const std::int64_t n = block_size(d, s);
  if (flat < 0 || flat >= n) throw DimensionError(fmt::format("block index {} out of range [0, {})", flat, n));
  std::vector<int> multi(s);
  const int d2 = d * d;
  for (int k = s - 1; k >= 0; --k) {
    multi[k] = static_cast<int>(flat % d2);
    flat /= d2;
  }
  return multi;
}

ComplexMatrix block_element(const HermitianBasis& basis, std::span<const int> multi) {
  ComplexMatrix out = ComplexMatrix::Ones(1, 1);
  for (int i : multi) {
    if (i < 0 || i >= basis.size()) {
      throw DimensionError(fmt::format("basis index {} out of range [0, {})", i, basis.size()));
    }
    out = linalg::kron(out, basis[i]);
  }
  return out;
}

ComplexMatrix block_element(const HermitianBasis& basis, std::int64_t flat, int s) {
  const auto multi = decode_block_index(flat, basis.dim(), s);
  return block_element(basis, multi);
}

RealVector expand_in_basis(const ComplexMatrix& m, const HermitianBasis& basis, int s) {
  const int d = basis.dim();
  require_block_dim(m, d, s);
  const Interleave t = interleave_tables(d, s);
  const Eigen::Index dim = m.rows();
  ComplexVector v(dim * dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) v(t.row[r] + t.col[c]) = m(r, c);
  }
  const ComplexVector coeffs = apply_all_modes(std::move(v), basis.entry_table().conjugate(), s);
  const double imag = coeffs.imag().cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.norm());
  if (imag > 1e-10 * scale) {
    throw PreconditionError(
        fmt::format("expand_in_basis: input is not Hermitian (imaginary coefficient {:.3e})", imag));
  }
  return coeffs.real();
}

ComplexMatrix assemble_from_coefficients(const RealVector& coeffs, const HermitianBasis& basis, int s) {
  const int d = basis.dim();
  const std::int64_t n = block_size(d, s);
  if (coeffs.size() != n) {
    throw DimensionError(fmt::format("expected {} coefficients for {} sites, got {}", n, s, coeffs.size()));
  }
  const ComplexVector v = apply_all_modes(coeffs.cast<Complex>(), basis.entry_table().transpose(), s);
  const Interleave t = interleave_tables(d, s);
  const Eigen::Index dim = checked_pow(d, s);
  ComplexMatrix m(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) m(r, c) = v(t.row[r] + t.col[c]);
  }
  return m;
}

DensityMatrix density_from_coefficients(RealVector coeffs, const HermitianBasis& basis, int sites) {
  DensityMatrix out;
  out.d = basis.dim();
  out.sites = sites;
  out.matrix = assemble_from_coefficients(coeffs, basis, sites);
  out.coefficients = std::move(coeffs);
  return out;
}

DensityMatrix density_from_matrix(ComplexMatrix m, const HermitianBasis& basis, int sites) {
  DensityMatrix out;
  out.d = basis.dim();
  out.sites = sites;
  out.coefficients = expand_in_basis(m, basis, sites);
  out.matrix = std::move(m);
  return out;
}

}  // namespace fcs
