#include "fcs/analysis.hpp"
#include "fcs/error.hpp"
#include "fcs/noise.hpp"
#include "fcs/spectral.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace fcs;

namespace {

Realization aklt_model() { return from_cstar(aklt(aklt_theta()), HermitianBasis::gellmann(3)); }

MarginalCoefficients marginals_of(const Realization& r, std::initializer_list<int> sizes) {
  MarginalCoefficients out;
  for (int s : sizes) out[s] = word_coefficients(r, s);
  return out;
}

}  // namespace

TEST_CASE("AKLT Omega has the expected corner and rank") {
  const OmegaData od = build_omega(aklt_model(), 1, 1);
  CHECK(od.omega.rows() == 9);
  CHECK(od.omega.cols() == 9);
  CHECK(od.omega(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(numerical_rank(od.omega) == 4);
  CHECK(linalg::sigma(od.omega, 4) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  od.check_consistency();
}

TEST_CASE("Omega from marginals equals Omega from word values") {
  const Realization r = from_cstar(random_cstar(2, 2, 3), HermitianBasis::gellmann(2));
  for (int sl = 1; sl <= 2; ++sl) {
    for (int sr = 1; sr <= 2; ++sr) {
      const OmegaData a = build_omega(r, sl, sr);
      const OmegaData b = build_omega(marginals_of(r, {1, 2, 3, 4, 5}), 2, sl, sr);
      CHECK((a.omega - b.omega).norm() < 1e-14);
      for (std::size_t k = 0; k < a.omega_dot.size(); ++k) CHECK((a.omega_dot[k] - b.omega_dot[k]).norm() < 1e-14);
      CHECK((a.omega_one - b.omega_one).norm() < 1e-14);
      CHECK((a.tau - b.tau).norm() < 1e-14);
      b.check_consistency();
    }
  }
}

TEST_CASE("missing marginal is reported") {
  const Realization r = aklt_model();
  CHECK_THROWS_AS(build_omega(marginals_of(r, {1, 2}), 3, 1, 1), PreconditionError);
}

TEST_CASE("consistency check rejects tampered data") {
  OmegaData od = build_omega(aklt_model(), 1, 1);
  OmegaData bad_one = od;
  bad_one.omega_one(2) += 1e-3;
  CHECK_THROWS_AS(bad_one.check_consistency(), PreconditionError);
  OmegaData bad_dot = od;
  bad_dot.omega_dot[4](0, 5) += 1e-3;
  CHECK_THROWS_AS(bad_dot.check_consistency(), PreconditionError);
}

TEST_CASE("threshold truncation keeps ties and fixed rank rejects deficiency") {
  const RealMatrix id = RealMatrix::Identity(4, 4);
  CHECK(truncate(id, TruncationMode::at_threshold(0.5)).rank() == 4);
  CHECK(truncate(id, TruncationMode::at_threshold(1.0)).rank() == 4);
  RealMatrix d = RealMatrix::Zero(2, 2);
  d.diagonal() << 1.0, 0.3;
  const SvdTruncation t = truncate(d, TruncationMode::at_threshold(0.5));
  CHECK(t.rank() == 1);
  CHECK(t.s_discarded.size() == 1);
  CHECK(t.s_discarded(0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(truncate(d, TruncationMode::at_threshold(2.0)), PreconditionError);
  RealMatrix low = RealMatrix::Zero(3, 3);
  low(0, 0) = 1.0;
  CHECK_THROWS_AS(truncate(low, TruncationMode::fixed_rank(2)), PreconditionError);
  CHECK_THROWS_AS(truncate(low, TruncationMode::fixed_rank(4)), DimensionError);
}

TEST_CASE("truncated frame is orthonormal") {
  const OmegaData od = build_omega(aklt_model(), 1, 1);
  const SvdTruncation t = truncate(od.omega, TruncationMode::fixed_rank(4));
  CHECK((t.u_hat.transpose() * t.u_hat - RealMatrix::Identity(4, 4)).norm() < 1e-13);
}

TEST_CASE("exact data reproduce every marginal") {
  const HermitianBasis b = HermitianBasis::gellmann(3);
  const Realization r = aklt_model();
  const OmegaData od = build_omega(r, 1, 1);
  const SpectralRealization sr = spectral_realization(od, truncate(od.omega, TruncationMode::fixed_rank(4)));
  CHECK(sr.diagnostics.rank == 4);
  CHECK(sr.diagnostics.sigma_m_omega == doctest::Approx(2.0 / 9.0));
  for (int t = 1; t <= 5; ++t) {
    CHECK(trace_distance(reconstruct_marginal(sr, b, t), marginal(r, b, t)) < 1e-12);
  }
}

TEST_CASE("product state is recovered with rank one") {
  const HermitianBasis b = HermitianBasis::gellmann(2);
  const ComplexMatrix phi = oracle::random_density(2, 41);
  const Realization r = product_realization(phi, b);
  const OmegaData od = build_omega(r, 1, 1);
  const SpectralRealization sr = spectral_realization(od, truncate(od.omega, TruncationMode::at_threshold(1e-9)));
  CHECK(sr.model.m == 1);
  CHECK((reconstruct_marginal(sr, b, 4).matrix - marginal(r, b, 4).matrix).norm() < 1e-13);
}

TEST_CASE("reconstruction does not depend on the gauge of the source model") {
  const HermitianBasis b = HermitianBasis::gellmann(2);
  const Realization r = from_cstar(random_cstar(2, 2, 12), b);
  Realization g = r;
  RealMatrix s = RealMatrix::Identity(r.m, r.m);
  s(0, 1) = 0.4;
  s(2, 3) = -0.7;
  s(3, 0) = 0.2;
  const RealMatrix si = s.inverse();
  for (auto& k : g.kappa) k = si * k * s;
  g.e = si * r.e;
  g.rho = s.transpose() * r.rho;
  const OmegaData a = build_omega(r, 1, 1);
  const OmegaData c = build_omega(g, 1, 1);
  CHECK((a.omega - c.omega).norm() < 1e-12);
  const int m = numerical_rank(a.omega);
  const SpectralRealization ra = spectral_realization(a, truncate(a.omega, TruncationMode::fixed_rank(m)));
  const SpectralRealization rc = spectral_realization(c, truncate(c.omega, TruncationMode::fixed_rank(m)));
  CHECK((word_coefficients(ra.model, 4) - word_coefficients(rc.model, 4)).norm() < 1e-11);
}

TEST_CASE("empirical realization with an exact frame equals the spectral one") {
  const OmegaData od = build_omega(aklt_model(), 1, 1);
  const SvdTruncation t = truncate(od.omega, TruncationMode::fixed_rank(4));
  const SpectralRealization a = spectral_realization(od, t);
  const SpectralRealization e = empirical_realization(od, t.u_hat);
  CHECK(e.diagnostics.frame_overlap == doctest::Approx(1.0));
  CHECK((word_coefficients(a.model, 3) - word_coefficients(e.model, 3)).norm() < 1e-12);
}

TEST_CASE("empirical realization with a rotated noisy frame still reproduces the state") {
  const HermitianBasis b = HermitianBasis::gellmann(3);
  const Realization r = aklt_model();
  const OmegaData od = build_omega(r, 1, 1);
  Rng rng(5);
  const RealMatrix noisy = perturb_matrix(od.omega, 1e-3, rng);
  const SvdTruncation t = truncate(noisy, TruncationMode::fixed_rank(4));
  const SpectralRealization e = empirical_realization(od, t.u_hat);
  CHECK(e.diagnostics.frame_overlap > 0.99);
  // Any invertible U^T U gives an exact realization of the true state.
  CHECK(trace_distance(reconstruct_marginal(e, b, 4), marginal(r, b, 4)) < 1e-10);
}

TEST_CASE("empirical realization rejects an orthogonal frame") {
  const OmegaData od = build_omega(aklt_model(), 1, 1);
  const linalg::FullSvdResult f = linalg::full_svd(od.omega);
  CHECK_THROWS_AS(empirical_realization(od, f.u.rightCols(4)), PreconditionError);
}

TEST_CASE("small noise keeps the reconstructed trace near one") {
  const HermitianBasis b = HermitianBasis::gellmann(3);
  const Realization r = aklt_model();
  const OmegaData od = build_omega(r, 1, 1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const OmegaData noisy = perturb_omega_data(od, 1e-4, 1e-4, rng);
    const SpectralRealization sr = spectral_realization(noisy, truncate(noisy.omega, TruncationMode::fixed_rank(4)));
    const DensityMatrix m = reconstruct_marginal(sr, b, 4);
    CHECK(std::abs(m.trace() - 1.0) < 1e-2);
    CHECK(trace_distance(m, marginal(r, b, 4)) < 1e-2);
  }
}

TEST_CASE("projection to a density matrix clips negative eigenvalues") {
  const HermitianBasis b = HermitianBasis::gellmann(2);
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.1;
  const DensityMatrix p = project_to_density(density_from_matrix(m, b, 1), b);
  CHECK(p.trace() == doctest::Approx(1.0));
  CHECK(p.matrix(1, 1).real() == doctest::Approx(0.0));
}
