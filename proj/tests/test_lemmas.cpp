#include "fcs/error.hpp"
#include "fcs/lemmas.hpp"
#include "fcs/noise.hpp"

#include <doctest.h>

using namespace fcs;

namespace {

RealMatrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  RealMatrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = rng.normal();
  return a;
}

OmegaData aklt_omega() { return build_omega(from_cstar(aklt(aklt_theta()), HermitianBasis::gellmann(3)), 1, 1); }

LemmaReport lemma_43_at(const OmegaData& od, int m, double eps, std::uint64_t seed) {
  Rng rng(seed);
  const OmegaData noisy = perturb_omega_data(od, eps, eps, rng, NoiseNorm::Spectral);
  return lemma_43_check(od, noisy, truncate(noisy.omega, TruncationMode::fixed_rank(m)));
}

}  // namespace

TEST_CASE("slack is absolute plus relative") {
  CHECK(InequalityCheck{"x", 1.0 + 1e-10, 1.0}.holds());
  CHECK_FALSE(InequalityCheck{"x", 1.0 + 1e-6, 1.0}.holds());
  CHECK_FALSE(InequalityCheck{"x", std::nan(""), 1.0}.holds());
  CHECK(InequalityCheck{"x", 0.5, 1.0}.margin() == doctest::Approx(0.5));
}

TEST_CASE("monitored entries do not change the status") {
  LemmaReport rep{"demo", true, "", {{"hard", 0.0, 1.0}, {"soft", 2.0, 1.0, true}}};
  CHECK(rep.status() == CheckStatus::Holds);
  rep.inequalities.push_back({"hard2", 2.0, 1.0});
  CHECK(rep.status() == CheckStatus::Violated);
  rep.precondition_met = false;
  CHECK(rep.status() == CheckStatus::PreconditionUnmet);
  CHECK(std::string(to_string(CheckStatus::PreconditionUnmet)) == "precondition_unmet");
}

TEST_CASE("zero perturbation of diag(2, 1) gives equality") {
  RealMatrix a = RealMatrix::Zero(2, 2);
  a.diagonal() << 2.0, 1.0;
  const RealMatrix z = RealMatrix::Zero(2, 2);
  const LemmaReport b1 = lemma_b1_check(a, z);
  CHECK(b1.holds());
  CHECK(b1.inequalities[0].lhs == 0.0);
  CHECK(b1.inequalities[0].rhs == 0.0);
  CHECK(lemma_b2_check(a, a).holds());
  CHECK(corollary_b3_check(a, z, 0.5).holds());
}

TEST_CASE("unmet hypotheses are flagged rather than passed") {
  RealMatrix a = RealMatrix::Zero(2, 2);
  a.diagonal() << 2.0, 1.0;
  RealMatrix big = RealMatrix::Zero(2, 2);
  big(1, 1) = 0.9;
  CHECK(corollary_b3_check(a, big, 0.5).status() == CheckStatus::PreconditionUnmet);
  CHECK(corollary_b3_check(a, big, 1.5).status() == CheckStatus::PreconditionUnmet);
  CHECK(lemma_b5_check(a, a + big, 2, 0.4).status() == CheckStatus::PreconditionUnmet);
  const OmegaData od = aklt_omega();
  OmegaData noisy = od;
  noisy.omega(0, 0) += 1.0;
  const LemmaReport rep = lemma_43_check(od, noisy, truncate(noisy.omega, TruncationMode::fixed_rank(4)));
  CHECK(rep.status() == CheckStatus::PreconditionUnmet);
  CHECK_FALSE(rep.precondition.empty());
}

TEST_CASE("random instances satisfy the Weyl bound") {
  Rng rng(2024);
  for (int k = 0; k < 500; ++k) {
    const auto rows = 1 + static_cast<Eigen::Index>(rng.uniform() * 12);
    const auto cols = 1 + static_cast<Eigen::Index>(rng.uniform() * 12);
    const RealMatrix a = gaussian(rng, rows, cols);
    const RealMatrix e = gaussian(rng, rows, cols) * std::pow(10.0, -4.0 * rng.uniform());
    CHECK(lemma_b1_check(a, e).holds());
  }
}

TEST_CASE("random instances satisfy the pseudoinverse and frame bounds") {
  Rng rng(77);
  for (int k = 0; k < 200; ++k) {
    const auto n = 1 + static_cast<Eigen::Index>(rng.uniform() * 6);
    const auto rows = n + static_cast<Eigen::Index>(rng.uniform() * 6);
    const RealMatrix a = gaussian(rng, rows, n);
    const RealMatrix dir = gaussian(rng, rows, n);
    const double eps = 0.05 + 0.9 * rng.uniform();
    const double sn = linalg::sigma(a, n);
    const RealMatrix e = dir * (eps * sn * rng.uniform() / linalg::operator_norm_2to2(dir));
    CHECK(lemma_b2_check(a, a + e).holds());
    const LemmaReport b3 = corollary_b3_check(a, e, eps);
    CHECK(b3.precondition_met);
    CHECK(b3.holds());
  }
}

TEST_CASE("AKLT Omega under a 0.1 perturbation satisfies the frame lemma") {
  const OmegaData od = aklt_omega();
  const double sm = linalg::sigma(od.omega, 4);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const RealMatrix noisy = perturb_matrix(od.omega, 0.1 * sm, rng, NoiseNorm::Spectral);
    const LemmaReport rep = lemma_b5_check(od.omega, noisy, 4, 0.1);
    CHECK(rep.precondition_met);
    CHECK(rep.holds());
    CHECK(rep.inequalities.size() == 4);
  }
}

TEST_CASE("realization estimates vanish at zero noise") {
  const OmegaData od = aklt_omega();
  const LemmaReport rep = lemma_43_check(od, od, truncate(od.omega, TruncationMode::fixed_rank(4)));
  CHECK(rep.holds());
  for (const auto& q : rep.inequalities) {
    if (q.name == "uupert") continue;
    CAPTURE(q.name);
    CHECK(q.lhs < 1e-12);
  }
}

TEST_CASE("realization estimates hold for AKLT at 1e-3 over 20 seeds") {
  const OmegaData od = aklt_omega();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const LemmaReport rep = lemma_43_at(od, 4, 1e-3, seed);
    CAPTURE(seed);
    CHECK(rep.precondition_met);
    CHECK(rep.holds());
  }
}

TEST_CASE("realization estimates hold for a random qubit model at 1e-4") {
  const Realization r = from_cstar(random_cstar(2, 2, 6), HermitianBasis::gellmann(2));
  const OmegaData od = build_omega(r, 1, 1);
  const int m = numerical_rank(od.omega);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const LemmaReport rep = lemma_43_at(od, m, 1e-4, seed);
    CAPTURE(seed);
    CHECK(rep.precondition_met);
    CHECK(rep.holds());
  }
}
