#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "nagaoka/corpus.hpp"
#include "nagaoka/radiation.hpp"
#include "nagaoka/spectral.hpp"

using namespace nagaoka;
using Catch::Approx;

namespace {

Magnetization half(int twice) { return Magnetization::from_twice(twice); }

LatticeModel triangle_in_box(double kappa, int cutoff = 2) {
  return corpus_entry("triangle").model().with([&](ModelSpec& s) {
    RadiationParams r;
    r.box_length = 4.0;
    r.uv_cutoff = kappa;
    r.mass = 1.0;
    r.cutoff = cutoff;
    s.radiation = r;
  });
}

Eigen::VectorXd spectrum(const SparseOperator& h) { return Eigen::SelfAdjointEigenSolver<DenseMat>(h.dense()).eigenvalues(); }

}  // namespace

TEST_CASE("polarization vectors") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector3d k(d(rng), d(rng), d(rng));
    const Eigen::Vector3d e1 = polarization(k, 1);
    const Eigen::Vector3d e2 = polarization(k, 2);
    if (k[0] == 0.0 && k[1] == 0.0) {
      CHECK(e1.norm() == 0.0);
      CHECK(e2.norm() == 0.0);
      continue;
    }
    CHECK(e1.norm() == Approx(1.0).margin(1e-14));
    CHECK(e2.norm() == Approx(1.0).margin(1e-14));
    CHECK(std::abs(e1.dot(e2)) <= 1e-14);
    CHECK(std::abs(e1.dot(k)) <= 1e-14);
    CHECK(std::abs(e2.dot(k)) <= 1e-13);
  }
}

TEST_CASE("photon mode set") {
  RadiationParams r;
  r.box_length = 4.0;
  r.uv_cutoff = 2.0;
  r.mass = 0.7;
  const auto modes = photon_modes(r);
  // |n| ≤ κL/2π = 1.27: the origin plus the six unit vectors, two polarizations each.
  CHECK(modes.size() == 14);
  int zero = 0;
  for (const auto& m : modes) {
    if (m.n.isZero()) {
      ++zero;
      CHECK(m.omega == 0.7);
      CHECK(m.eps.isZero());
    } else {
      CHECK(m.k.norm() <= r.uv_cutoff);
      CHECK(m.omega == Approx(m.k.norm()));
    }
  }
  CHECK(zero == 2);
}

TEST_CASE("Peierls kernel") {
  const Eigen::Vector3d x(0.3, -0.2, 0.1);
  const Eigen::Vector3d y(-0.5, 0.4, 0.9);
  CHECK(std::abs(peierls_kernel(x, y, Eigen::Vector3d::Zero()) - 1.0) == 0.0);

  // k ⟂ (y − x)
  const Eigen::Vector3d k = (y - x).cross(Eigen::Vector3d(1.0, 0.0, 0.0));
  CHECK(std::abs(peierls_kernel(x, y, k) - std::exp(cplx(0.0, k.dot(x)))) <= 1e-15);

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Vector3d a(u(rng), u(rng), u(rng));
    const Eigen::Vector3d b(u(rng), u(rng), u(rng));
    const Eigen::Vector3d q(u(rng), u(rng), u(rng));
    worst = std::max(worst, std::abs(peierls_kernel(a, b, q)));
  }
  CHECK(worst <= 1.0 + 1e-15);

  // Small-argument branch matches the closed form.
  const Eigen::Vector3d tiny = 1e-5 * (y - x).normalized();
  const double s = tiny.dot(y - x);
  const cplx closed = std::exp(cplx(0.0, tiny.dot(x))) * (std::exp(cplx(0.0, s)) - 1.0) / cplx(0.0, s);
  CHECK(std::abs(peierls_kernel(x, y, tiny) - closed) <= 1e-10);
}

TEST_CASE("Riemann sums converge like 1/N") {
  const auto m = triangle_in_box(2.0);
  const auto& r = *m.radiation();
  const auto modes = photon_modes(r);
  const Eigen::Vector3d x = r.positions[0];
  const Eigen::Vector3d y = r.positions[2];
  double last = kernel_error(x, y, modes, 4);
  for (int n = 8; n <= 256; n *= 2) {
    const double e = kernel_error(x, y, modes, n);
    CHECK(e < last);
    CHECK(e / last == Approx(0.5).margin(0.125));
    last = e;
  }
  CHECK_THROWS_AS(riemann_kernel(x, y, modes[0].k, 0), ValidationError);
  CHECK_THROWS_AS(riemann_peierls(r, modes, x, x, 8, 2), ValidationError);
  CHECK_THROWS_AS(riemann_peierls(r, modes, x, y, 0, 2), ValidationError);
}

TEST_CASE("Peierls factors are unitary and reverse with the path") {
  const auto m = triangle_in_box(2.0);
  const auto& r = *m.radiation();
  const auto all = photon_modes(r);
  const auto coupled = coupled_modes(m, all);
  std::vector<PhotonMode> kept;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (coupled[i]) kept.push_back(all[i]);
  }
  REQUIRE(kept.size() == 2);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      const auto phi = peierls_factor(r, kept, r.positions[a], r.positions[b], 2);
      CHECK(max_abs_diff(phi.adjoint() * phi, SparseOperator::identity(phi.dimension())) <= 1e-12);
      CHECK(max_abs_diff(peierls_factor(r, kept, r.positions[b], r.positions[a], 2), phi.adjoint()) <= 1e-12);
    }
  }

  // e^{i𝒜_N} approaches e^{iφ} on the truncated space.
  const DenseMat target = peierls_factor(r, kept, r.positions[0], r.positions[2], 2).dense();
  double last = INFINITY;
  for (int n : {8, 32, 128}) {
    const DenseMat an = riemann_peierls(r, kept, r.positions[0], r.positions[2], n, 2).dense();
    const DenseMat expo = detail::hermitian_exp_i(an);
    const double dist = operator_norm(DenseMat(expo - target));
    CHECK(dist < last);
    last = dist;
  }
  CHECK(last < 5e-3);
}

TEST_CASE("radiation sector") {
  SECTION("decoupled limit reproduces the Nagaoka spectrum") {
    const auto m = triangle_in_box(1.0);  // below 2π/L: only k = 0, which has ε = 0
    for (auto mag : all_magnetizations(3)) {
      const auto h = assemble_radiation_sector(m, mag);
      CHECK(h.boson_dim == 1);
      CHECK(h.spectator_frequencies == std::vector<double>{1.0, 1.0});
      CHECK(max_abs_diff(h.matrix, assemble_nagaoka_sector(corpus_entry("triangle").model(), mag).matrix) <= 1e-14);

      const auto kept = assemble_radiation_sector(m, mag, RadiationOptions{std::nullopt, true});
      CHECK(kept.boson_dim == 9);
      const Eigen::VectorXd base = spectrum(h.matrix);
      std::vector<double> expected;
      for (Eigen::Index i = 0; i < base.size(); ++i) {
        for (int n1 = 0; n1 <= 2; ++n1) {
          for (int n2 = 0; n2 <= 2; ++n2) expected.push_back(base[i] + n1 + n2);
        }
      }
      std::sort(expected.begin(), expected.end());
      const Eigen::VectorXd got = spectrum(kept.matrix);
      for (std::size_t i = 0; i < expected.size(); ++i) CHECK(got[static_cast<Eigen::Index>(i)] == Approx(expected[i]).margin(1e-12));
    }
  }

  SECTION("coupled triangle keeps S = 1") {
    const auto m = triangle_in_box(2.0);
    for (auto mag : all_magnetizations(3)) {
      const auto h = assemble_radiation_sector(m, mag);
      CHECK(h.provenance == Provenance::radiation);
      CHECK(hermiticity_defect(h.matrix.matrix()) <= 1e-12);
      const auto rep = ground_report(h);
      CHECK(rep.twice_resolved_s == 2);
      CHECK(rep.degeneracy == 1);
    }
  }

  SECTION("radiation needs U = inf and a [radiation] block") {
    CHECK_THROWS_AS(assemble_radiation_sector(corpus_entry("triangle").model(), half(0)), ValidationError);
  }
}
