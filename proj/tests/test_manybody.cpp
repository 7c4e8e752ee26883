#include <catch_amalgamated.hpp>

#include <random>

#include "nagaoka/manybody.hpp"
#include "nagaoka/sector.hpp"

using namespace nagaoka;

namespace {

double dense_norm(const SparseOperator& a) { return a.nonzeros() == 0 ? 0.0 : a.dense().cwiseAbs().maxCoeff(); }

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

}  // namespace

TEST_CASE("Fock basis enumeration") {
  const FockBasis f(3, 2);
  CHECK(f.size() == binomial(6, 2));
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(std::popcount(f[i]) == 2);
    CHECK(f.find(f[i]) == i);
    if (i > 0) CHECK(f[i - 1] < f[i]);
  }
  CHECK_THROWS_AS(FockBasis(17, 1), ValidationError);
}

TEST_CASE("canonical anticommutation relations") {
  const int sites = 3;
  for (int n = 1; n <= 4; ++n) {
    const FockBasis here(sites, n);
    const FockBasis above(sites, n + 1);
    const FockBasis below(sites, n - 1);
    for (int x = 0; x < sites; ++x) {
      for (Spin s : {Spin::up, Spin::down}) {
        for (int y = 0; y < sites; ++y) {
          for (Spin t : {Spin::up, Spin::down}) {
            // {c_xs, c†_yt} on the N-particle space.
            const SparseOperator anti = build_fermion_op(above, FermionOp::annihilate, x, s) *
                                            build_fermion_op(here, FermionOp::create, y, t) +
                                        build_fermion_op(below, FermionOp::create, y, t) *
                                            build_fermion_op(here, FermionOp::annihilate, x, s);
            const double expected = (x == y && s == t) ? 1.0 : 0.0;
            const SparseOperator target = expected * SparseOperator::identity(static_cast<Eigen::Index>(here.size()));
            CHECK(max_abs_diff(anti, target) <= 1e-14);
          }
        }
        // Pauli exclusion: c c = 0, and n is a 0/1 diagonal.
        CHECK(dense_norm(build_fermion_op(below, FermionOp::annihilate, x, s) *
                         build_fermion_op(here, FermionOp::annihilate, x, s)) == 0.0);
        const DenseMat num = build_fermion_op(here, FermionOp::number, x, s).dense();
        CHECK((num - DenseMat(num.diagonal().asDiagonal())).norm() == 0.0);
        for (Eigen::Index i = 0; i < num.rows(); ++i) CHECK((num(i, i) == 0.0 || num(i, i) == 1.0));
      }
    }
  }
}

TEST_CASE("hopping operator equals c† c") {
  const FockBasis f(3, 2);
  const FockBasis below(3, 1);
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      const SparseOperator ref = build_fermion_op(below, FermionOp::create, x, Spin::down) *
                                 build_fermion_op(f, FermionOp::annihilate, y, Spin::down);
      CHECK(max_abs_diff(build_hop(f, x, y, Spin::down), ref) <= 1e-15);
    }
  }
}

TEST_CASE("Gutzwiller projector") {
  for (int sites = 2; sites <= 5; ++sites) {
    const FockBasis f(sites, sites - 1);
    const SparseOperator p = build_gutzwiller(f);
    CHECK(max_abs_diff(p * p, p) == 0.0);
    CHECK(max_abs_diff(p.adjoint(), p) == 0.0);
    const double rank = std::real(p.dense().trace());
    CHECK(rank == static_cast<double>(sites * (std::size_t{1} << (sites - 1))));
  }
  const FockBasis f2(2, 1);
  CHECK(max_abs_diff(build_gutzwiller(f2), SparseOperator::identity(4)) == 0.0);
}

TEST_CASE("spin algebra") {
  const FockBasis f(3, 2);
  const SpinOperators s = build_spin_ops(f);
  CHECK(max_abs_diff(commutator(s.splus, s.sminus), 2.0 * s.s3) <= 1e-12);
  CHECK(max_abs_diff(commutator(s.stot2, s.s3), SparseOperator::identity(f.size()) - SparseOperator::identity(f.size())) <= 1e-12);
  CHECK(max_abs_diff(commutator(s.stot2, s.splus), 0.0 * s.splus) <= 1e-12);

  // Gutzwiller projection commutes with every spin operator.
  const SparseOperator p = build_gutzwiller(f);
  for (const auto* op : {&s.s3, &s.splus, &s.sminus, &s.stot2}) CHECK(dense_norm(commutator(p, *op)) <= 1e-12);

  // Fully polarized |hole at 0, ↑↑⟩: S = 1.
  const auto [word, sign] = configuration_word(3, HoleSpinConfig{0, 0b110});
  const auto idx = f.find(word);
  REQUIRE(idx);
  DenseVec v = DenseVec::Zero(static_cast<Eigen::Index>(f.size()));
  v[static_cast<Eigen::Index>(*idx)] = sign;
  const DenseVec sv = s.stot2.apply(v);
  CHECK((sv - 2.0 * v).norm() <= 1e-12);
}

TEST_CASE("bosons below the cutoff") {
  const BosonBasis b(2, 3);
  CHECK(b.size() == 16);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.index(b.occupations(i)) == i);
  CHECK(b.stride(0) == 4);
  CHECK(b.stride(1) == 1);

  for (int mode = 0; mode < 2; ++mode) {
    const SparseOperator a = build_boson_op(b, BosonOp::annihilate, mode);
    const SparseOperator ad = build_boson_op(b, BosonOp::create, mode);
    CHECK(max_abs_diff(ad, a.adjoint()) <= 1e-15);
    const DenseMat ccr = (a * ad - ad * a).dense();
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto occ = b.occupations(i);
      if (occ[static_cast<std::size_t>(mode)] < b.cutoff()) {
        DenseVec e = DenseVec::Zero(static_cast<Eigen::Index>(b.size()));
        e[static_cast<Eigen::Index>(i)] = 1.0;
        CHECK((ccr * e - e).norm() <= 1e-12);
      }
    }
    // b|0⟩ = 0
    DenseVec vac = DenseVec::Zero(static_cast<Eigen::Index>(b.size()));
    vac[0] = 1.0;
    CHECK(a.apply(vac).norm() == 0.0);
  }

  const DenseMat n = build_boson_op(b, BosonOp::number_total).dense();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto occ = b.occupations(i);
    CHECK(std::real(n(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))) == occ[0] + occ[1]);
  }
}

TEST_CASE("tensor products") {
  const SparseOperator i2 = SparseOperator::identity(2);
  const SparseOperator i3 = SparseOperator::identity(3);
  CHECK(max_abs_diff(tensor(i2, i3), SparseOperator::identity(6)) == 0.0);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> d;
  auto random = [&](int n) {
    DenseMat m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(d(rng), d(rng));
    return SparseOperator::from_dense(m, false);
  };
  const auto a = random(2);
  const auto b = random(3);
  const auto c = random(2);
  const auto e = random(3);
  CHECK(max_abs_diff(tensor(a, b) * tensor(c, e), tensor(a * c, b * e)) <= 1e-12);
  CHECK(tensor(a, b).dimension() == 6);

  // kron_modes uses the same mode-0-major order as BosonBasis.
  const BosonBasis bb(2, 2);
  const DenseMat b1 = single_mode_annihilator(2).cast<cplx>();
  const DenseMat id = DenseMat::Identity(3, 3);
  CHECK(max_abs_diff(kron_modes({b1, id}), build_boson_op(bb, BosonOp::annihilate, 0)) <= 1e-15);
  CHECK(max_abs_diff(kron_modes({id, b1}), build_boson_op(bb, BosonOp::annihilate, 1)) <= 1e-15);
}

TEST_CASE("configuration embedding is an isometry onto ran P") {
  const FockBasis f(4, 3);
  const SparseOperator p = build_gutzwiller(f);
  std::size_t total = 0;
  for (auto m : all_magnetizations(4)) {
    const SectorBasis s = enumerate_sector(4, m);
    const SparseOperator v = configuration_embedding(f, s);
    CHECK(max_abs_diff(v.adjoint() * v, SparseOperator::identity(static_cast<Eigen::Index>(s.size()))) <= 1e-15);
    CHECK(max_abs_diff(p * v, v) == 0.0);
    total += s.size();
  }
  CHECK(static_cast<double>(total) == std::real(p.dense().trace()));
}
