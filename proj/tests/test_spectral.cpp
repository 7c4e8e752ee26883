#include <catch_amalgamated.hpp>

#include <random>

#include "nagaoka/corpus.hpp"
#include "nagaoka/spectral.hpp"

using namespace nagaoka;
using Catch::Approx;

namespace {

Magnetization half(int twice) { return Magnetization::from_twice(twice); }

DenseMat random_hermitian(int n, std::uint64_t seed, bool real) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  DenseMat a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = real ? cplx(d(rng), 0.0) : cplx(d(rng), d(rng));
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("eigensolver small cases") {
  DenseMat flip(2, 2);
  flip << 0, -1, -1, 0;
  const auto e = eig_lowest(SparseOperator::from_dense(flip, true), 2);
  CHECK(e.values[0] == Approx(-1.0).margin(1e-14));
  CHECK(e.values[1] == Approx(1.0).margin(1e-14));
  const DenseVec g = e.vectors.col(0);
  CHECK(std::abs(std::abs(g[0]) - 1.0 / std::sqrt(2.0)) <= 1e-14);
  CHECK(std::abs(g[0] - g[1]) <= 1e-14);

  Eigen::VectorXd d(5);
  d << 3.0, -2.0, 7.0, 0.5, -2.5;
  const auto de = eig_lowest(diagonal(d), 5);
  Eigen::VectorXd sorted = d;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  CHECK((de.values - sorted).norm() == 0.0);

  CHECK_THROWS_AS(eig_lowest(SparseOperator::from_dense(flip, true), 3), ValidationError);
  CHECK_THROWS_AS(eig_lowest(SparseOperator::from_dense(flip, false), 1), ValidationError);
}

TEST_CASE("Lanczos agrees with the dense solver") {
  for (bool real : {true, false}) {
    const DenseMat a = random_hermitian(200, real ? 1 : 2, real);
    const SparseOperator op = SparseOperator::from_dense(a, true);
    const auto dense = eig_lowest(op, 4);
    const auto lanczos = eig_lowest(op, 4, 10);
    CHECK(dense.dense);
    CHECK_FALSE(lanczos.dense);
    CHECK((dense.values - lanczos.values).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(lanczos.max_residual <= kResidualTol);
    const DenseMat overlap = lanczos.vectors.adjoint() * lanczos.vectors;
    CHECK((overlap - DenseMat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
  }

  // Degenerate levels are all found.
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(300, 0.0, 10.0);
  d[1] = d[2] = d[0];
  const auto e = eig_lowest(diagonal(d), 3, 10);
  CHECK((e.values.array() - d[0]).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("operator norm") {
  CHECK(operator_norm(DenseMat::Identity(7, 7)) == Approx(1.0).margin(1e-14));
  DenseMat d = DenseMat::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -4.0;
  CHECK(operator_norm(d) == Approx(4.0).margin(1e-14));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  DenseMat a(50, 50);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = cplx(n(rng), n(rng));
  const double svd = Eigen::JacobiSVD<DenseMat>(a).singularValues()[0];
  CHECK(std::abs(operator_norm(a) - svd) <= 1e-7 * svd);
  CHECK(operator_norm(DenseMat::Zero(3, 3)) == 0.0);
}

TEST_CASE("ground reports") {
  SECTION("complete graph") {
    const auto k4 = corpus_entry("complete4").model();
    const auto r = ground_report(assemble_nagaoka_sector(k4, half(1)));
    CHECK(r.ground_energy == Approx(-3.0).margin(1e-10));
    CHECK(r.twice_resolved_s == 3);
    CHECK(r.degeneracy == 1);
    REQUIRE(r.gap);
    CHECK(*r.gap == Approx(1.0).margin(1e-10));
    CHECK(r.stot2_expectation == Approx(3.75).margin(1e-10));
  }

  SECTION("polarized sector is always maximal spin") {
    for (const auto& e : builtin_corpus()) {
      const auto m = e.model();
      const auto r = ground_report(assemble_nagaoka_sector(m, half(m.sites() - 1)));
      CHECK(r.twice_resolved_s == m.sites() - 1);
    }
  }

  SECTION("connected models share the ground energy across sectors") {
    for (const char* name : {"triangle", "square", "complete4", "square_diag"}) {
      const auto m = corpus_entry(name).model();
      std::vector<SpectralReport> reports;
      for (auto mag : all_magnetizations(m.sites())) reports.push_back(ground_report(assemble_nagaoka_sector(m, mag)));
      const auto s = summarize_multiplet(reports);
      INFO(name);
      CHECK(s.spread <= 1e-10);
      CHECK(s.size == m.sites());
      CHECK(s.twice_s == m.sites() - 1);
      CHECK(s.spins_agree);
      REQUIRE(s.gap);
      CHECK(*s.gap > 0.0);
    }
  }

  SECTION("square_diag frozen value") {
    const auto r = ground_report(assemble_nagaoka_sector(corpus_entry("square_diag").model(), half(1)));
    CHECK(r.ground_energy == Approx(-2.5615528128088298).margin(1e-10));
  }

  SECTION("disconnected chain: degenerate mixed-spin ground cluster") {
    const auto r = ground_report(assemble_nagaoka_sector(corpus_entry("chain3").model(), half(0)));
    CHECK(r.ground_energy == Approx(-std::sqrt(2.0)).margin(1e-10));
    CHECK(r.degeneracy == 2);
    CHECK(r.twice_cluster_spins == std::vector<int>{2, 0});
  }

  SECTION("finite-U Fock sector") {
    const auto m = corpus_entry("pair").model().with([](ModelSpec& s) { s.onsite_u = OnsiteU::finite(8.0); });
    const auto r = ground_report(assemble_hubbard_sector(m, half(1), 8.0), m);
    CHECK(r.provenance == Provenance::hubbard_fock);
    CHECK(r.ground_energy == Approx(-1.0).margin(1e-12));
    CHECK(r.twice_resolved_s == 1);
  }
}

TEST_CASE("total spin resolution") {
  CHECK(resolve_twice_spin(0.0) == 0);
  CHECK(resolve_twice_spin(0.75) == 1);
  CHECK(resolve_twice_spin(2.0) == 2);
  CHECK(resolve_twice_spin(3.75) == 3);
  CHECK_THROWS_AS(resolve_twice_spin(1.3), NumericalError);
}

TEST_CASE("norm-resolvent distance") {
  SECTION("two-site model has P = 1") {
    const auto pair = corpus_entry("pair").model();
    const cplx z = default_z(pair);
    CHECK(z.real() == 0.0);
    CHECK(z.imag() == Approx(2.0 * (1.0 + 1.0)).margin(1e-12));
    CHECK(resolvent_gap(pair, 1e6, z) <= 1e-4);
  }

  SECTION("square: decreasing with ratio one half") {
    const auto sq = corpus_entry("square").model();
    const ResolventStudy study(sq, default_z(sq));
    double prev = study.gap(1e2);
    for (double u : {1e3, 1e4, 1e5}) {
      const double d = study.gap(u);
      CHECK(d < prev);
      CHECK(study.gap(2.0 * u) / d == Approx(0.5).margin(0.1));
      prev = d;
    }
    CHECK(study.gap(1e6) <= 1e-4 * study.gap(1.0));
  }

  SECTION("validation") {
    const auto sq = corpus_entry("square").model();
    CHECK_THROWS_AS(ResolventStudy(sq, cplx(1.0, 0.0)), ValidationError);
    CHECK_THROWS_AS(ResolventStudy(sq, default_z(sq)).gap(-1.0), ValidationError);
  }
}

TEST_CASE("energy split bound") {
  const auto pair = energy_split_bound(corpus_entry("pair").model(), 10.0);
  CHECK(pair.vacuous);

  for (const char* name : {"chain3", "triangle", "square", "complete4", "square_diag"}) {
    const auto m = corpus_entry(name).model();
    const auto at0 = energy_split_bound(m, 0.0);
    CHECK(at0.bound_ok);
    CHECK(at0.e_h1 == Approx(at0.c).margin(1e-12));
    for (double u : {1.0, 10.0, 100.0, 1000.0}) {
      INFO(name << " U=" << u);
      CHECK(energy_split_bound(m, u).bound_ok);
    }
  }

  // E(H1) − U stays bounded on the triangle.
  const auto tri = corpus_entry("triangle").model();
  double lo = INFINITY;
  double hi = -INFINITY;
  for (double u : {1e1, 1e2, 1e3, 1e4, 1e5}) {
    const auto s = energy_split_bound(tri, u);
    lo = std::min(lo, s.e_h1 - u);
    hi = std::max(hi, s.e_h1 - u);
  }
  CHECK(hi - lo <= 10.0);
}
