#include <catch_amalgamated.hpp>

#include <set>

#include "nagaoka/corpus.hpp"
#include "nagaoka/sector.hpp"

using namespace nagaoka;

namespace {
Magnetization half(int twice) { return Magnetization::from_twice(twice); }
}  // namespace

TEST_CASE("sector dimensions") {
  CHECK(enumerate_sector(2, half(1)).size() == 2);
  CHECK(enumerate_sector(4, half(1)).size() == 12);
  CHECK(enumerate_sector(4, half(3)).size() == 4);
  for (int n = 2; n <= 8; ++n) {
    std::size_t total = 0;
    for (auto m : all_magnetizations(n)) {
      const auto b = enumerate_sector(n, m);
      CHECK(b.size() == n * binomial(n - 1, up_count(n, m)));
      total += b.size();
    }
    CHECK(total == n * (std::size_t{1} << (n - 1)));
  }
  CHECK_THROWS_AS(enumerate_sector(3, half(1)), ValidationError);
  CHECK_THROWS_AS(enumerate_sector(4, half(5)), ValidationError);
}

TEST_CASE("basis is sorted, unique and searchable") {
  const auto b = enumerate_sector(5, half(2));
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(b.find(b[i]) == i);
    CHECK(((b[i].up_mask >> b[i].hole) & 1u) == 0);
    if (i > 0) CHECK(b[i - 1] < b[i]);
  }
  CHECK_FALSE(b.find(HoleSpinConfig{0, 0b11110}).has_value());  // wrong sector
}

TEST_CASE("hole moves") {
  const HoleSpinConfig c{0, 0b010};  // hole at 0, up at 1, down at 2
  const auto moved = apply_move(c, 0, 1);
  REQUIRE(moved);
  CHECK(moved->hole == 1);
  CHECK(moved->spin_at(0) == +1);
  CHECK(moved->spin_at(2) == -1);

  CHECK_FALSE(apply_move(HoleSpinConfig{2, 0b001}, 0, 1));

  for (const auto& cfg : enumerate_sector(4, half(1)).configs()) {
    for (int to = 0; to < 4; ++to) {
      if (to == cfg.hole) continue;
      const auto there = apply_move(cfg, cfg.hole, to);
      REQUIRE(there);
      CHECK(apply_move(*there, to, cfg.hole) == cfg);
    }
  }
}

TEST_CASE("connectivity of corpus sectors") {
  const auto chain3 = corpus_entry("chain3").model();
  const auto r = connectivity_check(chain3, half(0));
  CHECK_FALSE(r.connected);
  CHECK(r.dimension == 6);
  CHECK(r.orbit_sizes() == std::vector<std::size_t>{3, 3});

  CHECK(connectivity_check(corpus_entry("complete4").model(), half(1)).connected);

  // The polarized sector reduces to the hopping graph itself.
  for (const auto& e : builtin_corpus()) {
    const auto m = e.model();
    INFO(e.name);
    CHECK(connectivity_check(m, half(m.sites() - 1)).connected);
  }

  const auto split = parse_model("[lattice]\nsites = 4\nhopping = 0 1 1\nhopping = 1 0 1\nhopping = 2 3 1\nhopping = 3 2 1\n");
  const auto s = connectivity_check(split, half(3));
  CHECK_FALSE(s.connected);
  CHECK(s.orbit_sizes() == std::vector<std::size_t>{2, 2});
}

TEST_CASE("orbits partition the sector") {
  for (const auto& e : builtin_corpus()) {
    const auto m = e.model();
    for (auto mag : all_magnetizations(m.sites())) {
      const auto r = connectivity_check(m, mag);
      std::set<std::size_t> seen;
      for (const auto& orbit : r.orbits) seen.insert(orbit.begin(), orbit.end());
      CHECK(seen.size() == r.dimension);
      CHECK(r.connected == (r.orbits.size() == 1));
    }
  }
}

TEST_CASE("connectors") {
  const auto pair = corpus_entry("pair").model();
  const HoleSpinConfig a{0, 0b10};
  const auto self = find_connector(pair, half(1), a, a);
  REQUIRE(self);
  CHECK(self->length() == 0);

  const auto hop = find_connector(pair, half(1), a, HoleSpinConfig{1, 0b01});
  REQUIRE(hop);
  CHECK(hop->path == std::vector<int>{0, 1});
  CHECK(hop->length() == 1);

  // Open chain: the relative spin order is frozen, so ud and du are unreachable.
  const auto chain3 = corpus_entry("chain3").model();
  CHECK_FALSE(find_connector(chain3, half(0), HoleSpinConfig{0, 0b010}, HoleSpinConfig{0, 0b100}));

  // Every connector on the complete graph replays to its target.
  const auto k4 = corpus_entry("complete4").model();
  const auto basis = enumerate_sector(k4, half(1));
  const ConfigurationGraph graph(k4, basis);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto c = find_connector(graph, basis[0], basis[j]);
    REQUIRE(c);
    HoleSpinConfig cur = basis[0];
    for (std::size_t s = 0; s + 1 < c->path.size(); ++s) {
      const auto next = apply_move(cur, c->path[s], c->path[s + 1]);
      REQUIRE(next);
      cur = *next;
    }
    CHECK(cur == basis[j]);
  }
}

TEST_CASE("lowering entries are single spin flips") {
  const auto from = enumerate_sector(2, half(1));
  const auto to = enumerate_sector(2, half(-1));
  const auto entries = lowering_entries(from, to);
  CHECK(entries.size() == 2);
  std::set<std::size_t> cols;
  for (const auto& e : entries) cols.insert(e.col);
  CHECK(cols.size() == 2);

  // From the polarized sector every column has |Λ|-1 entries.
  const auto top = enumerate_sector(4, half(3));
  const auto below = enumerate_sector(4, half(1));
  std::vector<int> per_col(top.size(), 0);
  for (const auto& e : lowering_entries(top, below)) ++per_col[e.col];
  for (int c : per_col) CHECK(c == 3);
}

TEST_CASE("sector cache returns the same graph") {
  const auto square = corpus_entry("square").model();
  SectorCache cache(square);
  const auto g1 = cache.graph(half(1));
  const auto g2 = cache.graph(half(1));
  CHECK(g1.get() == g2.get());
  CHECK(g1->basis().size() == 12);
}
