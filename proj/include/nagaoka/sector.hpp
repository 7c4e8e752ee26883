#pragma once

// Hole-spin configuration space C_M for one hole among |Λ| sites, the hole
// moves S_yx, connectivity of the configuration graph, and connectors.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "nagaoka/core.hpp"
#include "nagaoka/model.hpp"

namespace nagaoka {

/// Hole position plus the set of up spins; every other non-hole site is down.
struct HoleSpinConfig {
  int hole = 0;
  std::uint32_t up_mask = 0;  // bit `hole` is always 0

  [[nodiscard]] int n_up() const { return std::popcount(up_mask); }
  [[nodiscard]] std::uint32_t down_mask(int sites) const {
    const std::uint32_t all = (sites >= 32) ? ~0u : ((1u << sites) - 1u);
    return all & ~up_mask & ~(1u << hole);
  }
  /// +1 up, -1 down, 0 hole.
  [[nodiscard]] int spin_at(int site) const {
    if (site == hole) return 0;
    return ((up_mask >> site) & 1u) ? +1 : -1;
  }

  auto operator<=>(const HoleSpinConfig&) const = default;
};

/// S_yx: moves the hole from `from` to `to`; the spin at `to` lands on `from`.
/// Empty when the hole is not at `from`.
inline std::optional<HoleSpinConfig> apply_move(const HoleSpinConfig& c, int from, int to) {
  if (c.hole != from || from == to) return std::nullopt;
  HoleSpinConfig out{to, c.up_mask};
  if ((c.up_mask >> to) & 1u) {
    out.up_mask &= ~(1u << to);
    out.up_mask |= (1u << from);
  }
  return out;
}

class SectorBasis {
 public:
  SectorBasis(int sites, Magnetization m, std::vector<HoleSpinConfig> configs)
      : sites_(sites), m_(m), configs_(std::move(configs)) {}

  [[nodiscard]] int sites() const { return sites_; }
  [[nodiscard]] Magnetization magnetization() const { return m_; }
  [[nodiscard]] std::size_t size() const { return configs_.size(); }
  [[nodiscard]] const HoleSpinConfig& operator[](std::size_t i) const { return configs_[i]; }
  [[nodiscard]] const std::vector<HoleSpinConfig>& configs() const { return configs_; }

  [[nodiscard]] std::optional<std::size_t> find(const HoleSpinConfig& c) const {
    const auto it = std::lower_bound(configs_.begin(), configs_.end(), c);
    if (it == configs_.end() || *it != c) return std::nullopt;
    return static_cast<std::size_t>(it - configs_.begin());
  }

 private:
  int sites_;
  Magnetization m_;
  std::vector<HoleSpinConfig> configs_;  // sorted by (hole, up_mask)
};

inline int up_count(int sites, Magnetization m) {
  const int twice_up = (sites - 1) + m.twice();
  return twice_up / 2;
}

inline void check_magnetization(int sites, Magnetization m) {
  const int t = m.twice();
  if (t < -(sites - 1) || t > sites - 1 || ((t + sites - 1) % 2) != 0) {
    throw ValidationError("M = " + m.str() + " out of range for " + std::to_string(sites) + " sites");
  }
}

inline SectorBasis enumerate_sector(int sites, Magnetization m) {
  check_magnetization(sites, m);
  const int n_up = up_count(sites, m);
  std::vector<HoleSpinConfig> configs;
  configs.reserve(static_cast<std::size_t>(sites) * binomial(sites - 1, n_up));
  for (int hole = 0; hole < sites; ++hole) {
    for (std::uint32_t mask = 0; mask < (1u << sites); ++mask) {
      if (((mask >> hole) & 1u) == 0 && std::popcount(mask) == n_up) configs.push_back({hole, mask});
    }
  }
  return SectorBasis(sites, m, std::move(configs));
}

inline SectorBasis enumerate_sector(const LatticeModel& model, Magnetization m) {
  return enumerate_sector(model.sites(), m);
}

// ---------------------------------------------------------------------------
// Configuration graph
// ---------------------------------------------------------------------------

struct ConfigurationEdge {
  std::size_t target;
  int from;  // hole leaves `from`
  int to;    // and arrives at `to`
};

/// Edges (c, S_yx(c)) for every hop with t_xy != 0.
class ConfigurationGraph {
 public:
  ConfigurationGraph(const LatticeModel& model, SectorBasis basis) : basis_(std::move(basis)) {
    adjacency_.resize(basis_.size());
    const int n = basis_.sites();
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const HoleSpinConfig& c = basis_[i];
      for (int y = 0; y < n; ++y) {
        if (y == c.hole || model.t(c.hole, y) == 0.0) continue;
        const auto moved = apply_move(c, c.hole, y);
        adjacency_[i].push_back({*basis_.find(*moved), c.hole, y});
      }
    }
  }

  [[nodiscard]] const SectorBasis& basis() const { return basis_; }
  [[nodiscard]] const std::vector<ConfigurationEdge>& edges(std::size_t i) const { return adjacency_[i]; }

  /// BFS from `source`: parent edge per reached node (source maps to itself).
  [[nodiscard]] std::vector<std::optional<std::pair<std::size_t, int>>> bfs_tree(std::size_t source) const {
    std::vector<std::optional<std::pair<std::size_t, int>>> parent(basis_.size());
    parent[source] = std::pair{source, -1};
    std::deque<std::size_t> queue{source};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (const auto& e : adjacency_[u]) {
        if (!parent[e.target]) {
          parent[e.target] = std::pair{u, e.to};
          queue.push_back(e.target);
        }
      }
    }
    return parent;
  }

 private:
  SectorBasis basis_;
  std::vector<std::vector<ConfigurationEdge>> adjacency_;
};

struct ConnectivityReport {
  Magnetization m;
  std::size_t dimension = 0;
  bool connected = false;
  std::vector<std::vector<std::size_t>> orbits;  // canonical indices, ordered by smallest member

  [[nodiscard]] std::vector<std::size_t> orbit_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& o : orbits) out.push_back(o.size());
    return out;
  }
};

inline ConnectivityReport connectivity_check(const ConfigurationGraph& graph) {
  const auto& basis = graph.basis();
  ConnectivityReport rep{basis.magnetization(), basis.size(), false, {}};
  std::vector<bool> seen(basis.size(), false);
  for (std::size_t s = 0; s < basis.size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> orbit;
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      orbit.push_back(u);
      for (const auto& e : graph.edges(u)) {
        if (!seen[e.target]) {
          seen[e.target] = true;
          queue.push_back(e.target);
        }
      }
    }
    std::sort(orbit.begin(), orbit.end());
    rep.orbits.push_back(std::move(orbit));
  }
  rep.connected = rep.orbits.size() == 1;
  return rep;
}

inline ConnectivityReport connectivity_check(const LatticeModel& model, Magnetization m) {
  return connectivity_check(ConfigurationGraph(model, enumerate_sector(model, m)));
}

/// Site path x_1..x_l; consecutive hops carry nonzero t.
struct Connector {
  std::vector<int> path;
  [[nodiscard]] std::size_t length() const { return path.empty() ? 0 : path.size() - 1; }
};

/// Shortest connector from a to b, or nullopt when they lie in different orbits.
inline std::optional<Connector> find_connector(const ConfigurationGraph& graph, const HoleSpinConfig& a,
                                               const HoleSpinConfig& b) {
  const auto ia = graph.basis().find(a);
  const auto ib = graph.basis().find(b);
  if (!ia || !ib) throw ValidationError("find_connector: configuration not in sector");
  const auto parent = graph.bfs_tree(*ia);
  if (!parent[*ib]) return std::nullopt;
  std::vector<int> reversed;
  for (std::size_t v = *ib; v != *ia; v = parent[v]->first) reversed.push_back(parent[v]->second);
  reversed.push_back(a.hole);
  return Connector{{reversed.rbegin(), reversed.rend()}};
}

inline std::optional<Connector> find_connector(const LatticeModel& model, Magnetization m, const HoleSpinConfig& a,
                                               const HoleSpinConfig& b) {
  return find_connector(ConfigurationGraph(model, enumerate_sector(model, m)), a, b);
}

/// Per-sector cache of configuration graphs for one model.
class SectorCache {
 public:
  explicit SectorCache(const LatticeModel& model) : model_(model) {}

  std::shared_ptr<const ConfigurationGraph> graph(Magnetization m) {
    std::lock_guard lock(mutex_);
    auto& slot = graphs_[m.twice()];
    if (!slot) slot = std::make_shared<const ConfigurationGraph>(model_, enumerate_sector(model_, m));
    return slot;
  }

 private:
  const LatticeModel& model_;
  std::mutex mutex_;
  std::map<int, std::shared_ptr<const ConfigurationGraph>> graphs_;
};

/// S^- from sector M to M-1 written combinatorially: every flippable up spin
/// contributes +1 (Tasaki basis). The fermionic route lives in positivity.hpp.
struct LoweringEntry {
  std::size_t row;  // index in sector M-1
  std::size_t col;  // index in sector M
};

inline std::vector<LoweringEntry> lowering_entries(const SectorBasis& from, const SectorBasis& to) {
  std::vector<LoweringEntry> out;
  for (std::size_t j = 0; j < from.size(); ++j) {
    const HoleSpinConfig& c = from[j];
    for (int y = 0; y < from.sites(); ++y) {
      if ((c.up_mask >> y) & 1u) {
        const HoleSpinConfig flipped{c.hole, c.up_mask & ~(1u << y)};
        out.push_back({*to.find(flipped), j});
      }
    }
  }
  return out;
}

}  // namespace nagaoka
