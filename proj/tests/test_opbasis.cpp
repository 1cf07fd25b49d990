#include "fcs/error.hpp"
#include "fcs/opbasis.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <array>

using namespace fcs;
using linalg::Complex;

TEST_CASE("qutrit basis is the textbook Gell-Mann set") {
  const HermitianBasis b = HermitianBasis::gellmann(3);
  const auto expect = oracle::gellmann3();
  REQUIRE(b.size() == 9);
  for (int k = 0; k < 9; ++k) CHECK((b[k] - expect[k]).norm() < 1e-15);
}

TEST_CASE("bases are Hermitian and orthonormal in the trace inner product") {
  for (int d = 2; d <= 5; ++d) {
    const HermitianBasis b = HermitianBasis::gellmann(d);
    CHECK((b[0] - ComplexMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d))).norm() < 1e-15);
    for (int i = 0; i < b.size(); ++i) {
      CHECK((b[i] - b[i].adjoint()).norm() < 1e-15);
      if (i > 0) CHECK(std::abs(b[i].trace()) < 1e-15);
      for (int j = 0; j < b.size(); ++j) {
        const Complex ip = (b[i].adjoint() * b[j]).trace();
        CHECK(std::abs(ip - Complex(i == j ? 1.0 : 0.0, 0.0)) < 1e-14);
      }
    }
  }
}

TEST_CASE("qubit basis is the Pauli set over sqrt 2") {
  const HermitianBasis b = HermitianBasis::gellmann(2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(b[1](0, 1) - Complex(r, 0)) < 1e-15);
  CHECK(std::abs(b[2](0, 1) - Complex(0, -r)) < 1e-15);
  CHECK(std::abs(b[3](0, 0) - Complex(r, 0)) < 1e-15);
  CHECK(std::abs(b[3](1, 1) - Complex(-r, 0)) < 1e-15);
}

TEST_CASE("gellmann rejects d below 2 while the algebra variant admits 1") {
  CHECK_THROWS_AS(HermitianBasis::gellmann(1), DimensionError);
  const HermitianBasis one = HermitianBasis::for_algebra(1);
  CHECK(one.size() == 1);
  CHECK(std::abs(one[0](0, 0) - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("flat index puts the leftmost site in the most significant digit") {
  const std::array<int, 3> multi{2, 0, 3};
  CHECK(encode_block_index(multi, 2) == 2 * 16 + 0 * 4 + 3);
  CHECK(decode_block_index(35, 2, 3) == std::vector<int>{2, 0, 3});
  for (std::int64_t f = 0; f < block_size(3, 2); ++f) {
    const auto m = decode_block_index(f, 3, 2);
    CHECK(encode_block_index(m, 3) == f);
  }
  const std::array<int, 2> bad{0, 4};
  CHECK_THROWS_AS(encode_block_index(bad, 2), DimensionError);
}

TEST_CASE("block element is the Kronecker product in site order") {
  const HermitianBasis b = HermitianBasis::gellmann(2);
  const std::array<int, 2> multi{1, 3};
  CHECK((block_element(b, multi) - oracle::kron(b[1], b[3])).norm() < 1e-15);
  CHECK((block_element(b, 7, 2) - oracle::kron(b[1], b[3])).norm() < 1e-15);
}

TEST_CASE("expansion matches brute-force traces and round-trips") {
  for (int d = 2; d <= 3; ++d) {
    const HermitianBasis b = HermitianBasis::gellmann(d);
    for (int s = 1; s <= 3; ++s) {
      const int dim = static_cast<int>(checked_pow(d, s));
      const ComplexMatrix rho = oracle::random_density(dim, static_cast<unsigned>(10 * d + s));
      const RealVector c = expand_in_basis(rho, b, s);
      REQUIRE(c.size() == block_size(d, s));
      for (std::int64_t f = 0; f < c.size(); f += 7) {
        const Complex direct = (block_element(b, f, s) * rho).trace();
        CHECK(c(f) == doctest::Approx(direct.real()).epsilon(1e-12));
      }
      CHECK(c(0) == doctest::Approx(std::pow(d, -0.5 * s)));
      CHECK((assemble_from_coefficients(c, b, s) - rho).norm() < 1e-13);
    }
  }
}

TEST_CASE("expansion rejects anti-Hermitian content and wrong shapes") {
  const HermitianBasis b = HermitianBasis::gellmann(2);
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(expand_in_basis(m, b, 1), PreconditionError);
  CHECK_THROWS_AS(expand_in_basis(ComplexMatrix::Identity(3, 3), b, 1), DimensionError);
  CHECK_THROWS_AS(assemble_from_coefficients(RealVector::Zero(5), b, 1), DimensionError);
}

TEST_CASE("density wrappers agree") {
  const HermitianBasis b = HermitianBasis::gellmann(2);
  const ComplexMatrix rho = oracle::random_density(4, 3);
  const DensityMatrix a = density_from_matrix(rho, b, 2);
  const DensityMatrix c = density_from_coefficients(a.coefficients, b, 2);
  CHECK((a.matrix - c.matrix).norm() < 1e-14);
  CHECK(c.trace() == doctest::Approx(1.0));
}

TEST_CASE("checked_pow detects overflow") {
  CHECK(checked_pow(3, 7) == 2187);
  CHECK(checked_pow(5, 0) == 1);
  CHECK_THROWS_AS(checked_pow(10, 30), DimensionError);
  CHECK_THROWS_AS(checked_pow(2, -1), DimensionError);
}
