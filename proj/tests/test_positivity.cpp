#include <catch_amalgamated.hpp>

#include <random>

#include "nagaoka/corpus.hpp"
#include "nagaoka/positivity.hpp"

using namespace nagaoka;
using Catch::Approx;

namespace {

Magnetization half(int twice) { return Magnetization::from_twice(twice); }

SparseOperator real_op(const Eigen::MatrixXd& m) { return SparseOperator::from_dense(m.cast<cplx>(), false); }

// Direct-frame Fock value of the 2-site Holstein pair (g = 0.5, ω = 1, cutoff 16).
constexpr double kPairHolsteinFock = -1.16787065516708;

}  // namespace

TEST_CASE("positivity preservation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a(5, 5);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  CHECK(preserves_positivity(real_op(a)));

  Eigen::MatrixXd flip(2, 2);
  flip << 0, -1, -1, 0;
  CHECK_FALSE(preserves_positivity(real_op(flip)));

  // −H for pure hopping is entrywise nonnegative in the configuration basis.
  for (const auto& e : builtin_corpus()) {
    const auto m = e.model();
    for (auto mag : all_magnetizations(m.sites())) {
      CHECK(preserves_positivity(-1.0 * assemble_nagaoka_sector(m, mag).matrix));
    }
  }
}

TEST_CASE("positivity improvement of the exponential") {
  Eigen::MatrixXd cycle = Eigen::MatrixXd::Zero(3, 3);
  cycle(0, 1) = cycle(1, 2) = cycle(2, 0) = 1.0;
  CHECK(improves_positivity_exp(real_op(cycle)));

  Eigen::MatrixXd blocks = Eigen::MatrixXd::Zero(4, 4);
  blocks(0, 1) = blocks(1, 0) = blocks(2, 3) = blocks(3, 2) = 1.0;
  CHECK_FALSE(improves_positivity_exp(real_op(blocks)));

  Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(3, 3);
  upper(0, 1) = upper(1, 2) = upper(0, 2) = 1.0;
  CHECK_FALSE(improves_positivity_exp(real_op(upper)));

  Eigen::MatrixXd negative = cycle;
  negative(0, 1) = -1.0;
  CHECK_THROWS_AS(improves_positivity_exp(real_op(negative)), ValidationError);
}

TEST_CASE("ergodicity certificate matches connectivity") {
  CHECK(ergodicity_certificate(assemble_nagaoka_sector(corpus_entry("complete4").model(), half(1))));
  CHECK_FALSE(ergodicity_certificate(assemble_nagaoka_sector(corpus_entry("chain3").model(), half(0))));
  for (const auto& e : builtin_corpus()) {
    const auto m = e.model();
    CHECK(ergodicity_certificate(assemble_nagaoka_sector(m, half(m.sites() - 1))));
    for (auto mag : all_magnetizations(m.sites())) {
      INFO(e.name << " M=" << mag.str());
      CHECK(ergodicity_certificate(assemble_nagaoka_sector(m, mag)) == connectivity_check(m, mag).connected);
    }
  }
}

TEST_CASE("Perron-Frobenius certificates") {
  SECTION("pair") {
    const auto c = pf_certificate(assemble_nagaoka_sector(corpus_entry("pair").model(), half(1)));
    CHECK(c.holds());
    CHECK(c.min_entry == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
    CHECK(c.ground_energy == Approx(-1.0).margin(1e-12));
  }

  SECTION("complete graph, every sector") {
    const auto k4 = corpus_entry("complete4").model();
    for (auto mag : all_magnetizations(4)) {
      const auto c = pf_certificate(assemble_nagaoka_sector(k4, mag));
      CHECK(c.holds());
      CHECK(c.ground_energy == Approx(-3.0).margin(1e-10));
      // The ground vector is uniform over the sector.
      const double dim = static_cast<double>(enumerate_sector(4, mag).size());
      CHECK(c.min_entry == Approx(1.0 / std::sqrt(dim)).margin(1e-10));
    }
  }

  SECTION("disconnected chain makes no positivity claim") {
    const auto c = pf_certificate(assemble_nagaoka_sector(corpus_entry("chain3").model(), half(0)));
    CHECK(c.offdiag_sign_ok);
    CHECK_FALSE(c.irreducible);
    CHECK_FALSE(c.holds());
  }

  SECTION("an impossible ground vector is flagged") {
    const auto h = assemble_nagaoka_sector(corpus_entry("triangle").model(), half(0));
    DenseVec v = DenseVec::Ones(h.dimension());
    v[0] = -1.0;
    CHECK_THROWS_AS(pf_certificate(h.matrix, v, true, "test"), NumericalError);
  }
}

TEST_CASE("diagonal perturbations keep the certificate") {
  const auto sq = corpus_entry("square").model();
  const auto h = assemble_nagaoka_sector(sq, half(1));
  CHECK(diagonal_perturbation_equivalence(h.matrix, Eigen::VectorXd::Zero(h.dimension())));

  // Adding a Coulomb diagonal is the same kind of perturbation.
  const auto with_u = sq.with([](ModelSpec& s) {
    s.offsite_u = Eigen::MatrixXd::Constant(4, 4, 0.3);
    s.offsite_u.diagonal().setZero();
  });
  CHECK(ergodicity_certificate(assemble_nagaoka_sector(with_u, half(1))) == ergodicity_certificate(h));

  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> n(0.0, 3.0);
  for (const auto& e : builtin_corpus()) {
    const auto m = e.model();
    const auto mags = all_magnetizations(m.sites());
    for (int trial = 0; trial < 100; ++trial) {
      const auto hm = assemble_nagaoka_sector(m, mags[static_cast<std::size_t>(trial) % mags.size()]);
      Eigen::VectorXd d(hm.dimension());
      for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = n(rng);
      CHECK(diagonal_perturbation_equivalence(hm.matrix, d));
    }
  }
  CHECK_THROWS_AS(diagonal_perturbation_equivalence(h.matrix, Eigen::VectorXd::Zero(3)), ValidationError);
}

TEST_CASE("spin lowering is entrywise 0/+1") {
  const DenseMat pair = fock_sector_lowering(2, half(1)).dense();
  REQUIRE(pair.rows() == 2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    CHECK(pair.col(c).sum() == cplx(1.0, 0.0));
    CHECK(pair.col(c).cwiseAbs().maxCoeff() == 1.0);
  }

  const DenseMat top = fock_sector_lowering(4, half(3)).dense();
  for (Eigen::Index c = 0; c < top.cols(); ++c) CHECK(top.col(c).sum() == cplx(3.0, 0.0));

  for (int sites = 2; sites <= 6; ++sites) {
    for (auto mag : all_magnetizations(sites)) {
      if (mag.twice() - 2 < -(sites - 1)) continue;
      INFO(sites << " sites, M=" << mag.str());
      CHECK(spin_lowering_positivity(sites, mag));
    }
  }
  CHECK_THROWS_AS(spin_lowering_positivity(3, half(-2)), ValidationError);
}

TEST_CASE("position-grid certificate") {
  const auto pair = corpus_entry("pair").model();

  SECTION("decoupled: no relevant coordinates") {
    const auto q = qgrid_holstein_certify(with_diagonal_phonons(pair, 0.0, 1.0, 2), half(1), {64, 0.125});
    CHECK(q.relevant_modes == 0);
    CHECK(q.dimension == 2);
    CHECK(q.certificate.holds());
    CHECK(q.ground_energy == Approx(-1.0).margin(1e-12));
  }

  SECTION("commensurate pair at 64 points") {
    const auto m = with_diagonal_phonons(pair, 0.5, 1.0, 2);
    const auto q = qgrid_holstein_certify(m, half(1), {64, 0.125});
    CHECK(q.relevant_modes == 1);
    CHECK(q.shifts == std::vector<std::vector<int>>{{8}});
    CHECK(q.certificate.offdiag_sign_ok);
    CHECK(q.certificate.irreducible);
    CHECK(q.certificate.holds());
    CHECK(q.certificate.min_entry > 1e-12);
    CHECK(q.dropped_constant == Approx(-0.25).margin(1e-15));
    CHECK(std::abs(q.ground_energy + q.dropped_constant - kPairHolsteinFock) <= 1e-3);
  }

  SECTION("refinement converges") {
    const auto m = with_diagonal_phonons(pair, 0.5, 1.0, 2);
    double last = INFINITY;
    for (auto [n, h] : std::vector<std::pair<int, double>>{{16, 0.5}, {32, 0.25}, {64, 0.125}}) {
      const auto q = qgrid_holstein_certify(m, half(1), {n, h});
      const double err = std::abs(q.ground_energy + q.dropped_constant - kPairHolsteinFock);
      CHECK(err < last);
      last = err;
    }
  }

  SECTION("incommensurate spacing and budgets") {
    const auto m = with_diagonal_phonons(pair, 0.5, 1.0, 2);
    CHECK_THROWS_WITH(qgrid_holstein_certify(m, half(1), {64, 0.3}), Catch::Matchers::ContainsSubstring("incommensurate"));
    CHECK_THROWS_AS(qgrid_holstein_certify(with_diagonal_phonons(corpus_entry("square").model(), 0.5, 1.0, 2), half(1), {8, 0.5}),
                    BudgetError);
  }
}
