#pragma once

// Lattice models: validated hopping/Coulomb/phonon/radiation data, lattice
// generators, and the plain-text model file format.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nagaoka/core.hpp"

namespace nagaoka {

inline constexpr int kMaxSites = 16;

/// On-site repulsion: a finite value or the distinguished symbol INFINITE.
class OnsiteU {
 public:
  static OnsiteU infinite() { return OnsiteU(true, 0.0); }
  static OnsiteU finite(double u) { return OnsiteU(false, u); }

  [[nodiscard]] bool is_infinite() const { return infinite_; }
  [[nodiscard]] double value() const {
    if (infinite_) throw ValidationError("on-site U is INFINITE; no finite value");
    return value_;
  }

 private:
  OnsiteU(bool inf, double v) : infinite_(inf), value_(v) {}
  bool infinite_ = true;
  double value_ = 0.0;
};

struct PhononParams {
  Eigen::MatrixXd coupling;  // g_xy
  double omega = 1.0;
  int cutoff = 2;  // per-site occupation ceiling
};

struct RadiationParams {
  double box_length = 4.0;  // L, V = [-L/2, L/2]^3
  double uv_cutoff = 2.0;   // kappa
  double mass = 1.0;        // m0 = omega(0)
  int cutoff = 2;           // per-mode photon ceiling
  std::vector<Eigen::Vector3d> positions;
};

/// Mutable description; becomes a LatticeModel only through validation.
struct ModelSpec {
  int sites = 0;
  Eigen::MatrixXd hopping;
  OnsiteU onsite_u = OnsiteU::infinite();
  Eigen::MatrixXd offsite_u;  // empty means zero
  std::optional<PhononParams> phonon;
  std::optional<RadiationParams> radiation;
};

/// Integer points of the x axis, centred on the origin.
inline std::vector<Eigen::Vector3d> default_positions(int sites) {
  std::vector<Eigen::Vector3d> out;
  const int offset = (sites - 1) / 2;
  for (int i = 0; i < sites; ++i) out.emplace_back(static_cast<double>(i - offset), 0.0, 0.0);
  return out;
}

namespace detail {

inline std::string at(int x, int y) {
  return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

inline void require_symmetric(const Eigen::MatrixXd& m, std::string_view condition, std::string_view what) {
  for (int x = 0; x < m.rows(); ++x) {
    for (int y = x + 1; y < m.cols(); ++y) {
      if (m(x, y) != m(y, x)) {
        throw ValidationError(std::string(condition) + " violated at " + at(x, y) + ": " + std::string(what) +
                              " is not symmetric");
      }
    }
  }
}

inline void require_finite(const Eigen::MatrixXd& m, std::string_view what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + " has non-finite entries");
}

}  // namespace detail

/// Immutable, validated model; electron number is always N = |Λ| - 1.
class LatticeModel {
 public:
  explicit LatticeModel(ModelSpec spec) : spec_(std::move(spec)) {
    auto& s = spec_;
    if (s.sites < 2 || s.sites > kMaxSites) {
      throw ValidationError("sites must be in [2, " + std::to_string(kMaxSites) + "], got " + std::to_string(s.sites));
    }
    const auto n = static_cast<Eigen::Index>(s.sites);
    if (s.hopping.rows() != n || s.hopping.cols() != n) throw ValidationError("hopping matrix must be sites x sites");
    if (s.offsite_u.size() == 0) s.offsite_u = Eigen::MatrixXd::Zero(n, n);
    if (s.offsite_u.rows() != n || s.offsite_u.cols() != n) throw ValidationError("offsite U must be sites x sites");
    detail::require_finite(s.hopping, "hopping");
    detail::require_finite(s.offsite_u, "offsite U");
    detail::require_symmetric(s.hopping, "A.1", "hopping");
    detail::require_symmetric(s.offsite_u, "A.1", "offsite U");
    for (int x = 0; x < s.sites; ++x) {
      for (int y = 0; y < s.sites; ++y) {
        if (s.hopping(x, y) < 0.0) {
          throw ValidationError("A.2 violated at " + detail::at(x, y) + ": t = " + std::to_string(s.hopping(x, y)));
        }
      }
    }
    if (!s.onsite_u.is_infinite() && !(s.onsite_u.value() >= 0.0 && std::isfinite(s.onsite_u.value()))) {
      throw ValidationError("on-site U must be finite and >= 0, or inf");
    }
    if (s.phonon) {
      auto& p = *s.phonon;
      if (p.coupling.size() == 0) p.coupling = Eigen::MatrixXd::Zero(n, n);
      if (p.coupling.rows() != n || p.coupling.cols() != n) throw ValidationError("phonon coupling must be sites x sites");
      detail::require_finite(p.coupling, "phonon coupling");
      detail::require_symmetric(p.coupling, "A.4", "phonon coupling g");
      if (!(p.omega > 0.0) || !std::isfinite(p.omega)) throw ValidationError("phonon omega must be > 0");
      if (p.cutoff < 0) throw ValidationError("phonon cutoff must be >= 0");
    }
    if (s.radiation) {
      auto& r = *s.radiation;
      if (!(r.box_length > 0.0)) throw ValidationError("radiation L must be > 0");
      if (!(r.uv_cutoff > 0.0)) throw ValidationError("radiation kappa must be > 0");
      if (!(r.mass > 0.0)) throw ValidationError("radiation m0 must be > 0");
      if (r.cutoff < 0) throw ValidationError("radiation cutoff must be >= 0");
      if (r.positions.empty()) r.positions = default_positions(s.sites);
      if (static_cast<int>(r.positions.size()) != s.sites) throw ValidationError("radiation needs one position per site");
      for (int i = 0; i < s.sites; ++i) {
        if (r.positions[i].cwiseAbs().maxCoeff() > 0.5 * r.box_length) {
          throw ValidationError("site " + std::to_string(i) + " lies outside V = [-L/2, L/2]^3");
        }
        for (int j = 0; j < i; ++j) {
          if (r.positions[i] == r.positions[j]) {
            throw ValidationError("sites " + std::to_string(j) + " and " + std::to_string(i) + " share a position");
          }
        }
      }
    }
  }

  [[nodiscard]] int sites() const { return spec_.sites; }
  [[nodiscard]] int electrons() const { return spec_.sites - 1; }
  [[nodiscard]] const Eigen::MatrixXd& hopping() const { return spec_.hopping; }
  [[nodiscard]] double t(int x, int y) const { return spec_.hopping(x, y); }
  [[nodiscard]] const OnsiteU& onsite_u() const { return spec_.onsite_u; }
  [[nodiscard]] const Eigen::MatrixXd& offsite_u() const { return spec_.offsite_u; }
  [[nodiscard]] const std::optional<PhononParams>& phonon() const { return spec_.phonon; }
  [[nodiscard]] const std::optional<RadiationParams>& radiation() const { return spec_.radiation; }
  [[nodiscard]] const ModelSpec& spec() const { return spec_; }

  /// Copy with a different description; revalidates.
  [[nodiscard]] LatticeModel with(const std::function<void(ModelSpec&)>& edit) const {
    ModelSpec s = spec_;
    edit(s);
    return LatticeModel(std::move(s));
  }

 private:
  ModelSpec spec_;
};

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

enum class LatticeFamily { chain, ring, complete, square_patch, triangular_patch };

inline LatticeFamily parse_family(std::string_view name) {
  if (name == "chain") return LatticeFamily::chain;
  if (name == "ring") return LatticeFamily::ring;
  if (name == "complete") return LatticeFamily::complete;
  if (name == "square_patch") return LatticeFamily::square_patch;
  if (name == "triangular_patch") return LatticeFamily::triangular_patch;
  throw ValidationError("unknown lattice generator: " + std::string(name));
}

/// Nearest-neighbour hopping matrix of a named graph. Patches are open
/// w x h grids with row-major site index i + w*j; the triangular patch adds
/// the (i,j)-(i+1,j+1) diagonal of every plaquette.
inline Eigen::MatrixXd generate_lattice(LatticeFamily family, std::span<const int> extent, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("generator hopping t must be > 0");
  auto link = [t](Eigen::MatrixXd& m, int a, int b) {
    m(a, b) = t;
    m(b, a) = t;
  };
  switch (family) {
    case LatticeFamily::chain:
    case LatticeFamily::ring:
    case LatticeFamily::complete: {
      if (extent.size() != 1) throw ValidationError("chain/ring/complete take a single extent");
      const int n = extent[0];
      const int min_n = family == LatticeFamily::ring ? 3 : 2;
      if (n < min_n || n > kMaxSites) throw ValidationError("unsupported extent " + std::to_string(n));
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
      if (family == LatticeFamily::complete) {
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b) link(m, a, b);
      } else {
        for (int a = 0; a + 1 < n; ++a) link(m, a, a + 1);
        if (family == LatticeFamily::ring) link(m, n - 1, 0);
      }
      return m;
    }
    case LatticeFamily::square_patch:
    case LatticeFamily::triangular_patch: {
      if (extent.size() != 2) throw ValidationError("patches take extent w x h");
      const int w = extent[0];
      const int h = extent[1];
      if (w < 1 || h < 1 || w * h < 2 || w * h > kMaxSites) {
        throw ValidationError("unsupported extent " + std::to_string(w) + "x" + std::to_string(h));
      }
      const int n = w * h;
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
      auto id = [w](int i, int j) { return i + w * j; };
      for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
          if (i + 1 < w) link(m, id(i, j), id(i + 1, j));
          if (j + 1 < h) link(m, id(i, j), id(i, j + 1));
          if (family == LatticeFamily::triangular_patch && i + 1 < w && j + 1 < h) link(m, id(i, j), id(i + 1, j + 1));
        }
      }
      return m;
    }
  }
  throw ValidationError("unknown lattice family");
}

// ---------------------------------------------------------------------------
// Model file format
//
//   [lattice]     sites = N | generator = name, extent = 3 | 2x2, t = 1
//                 hopping = x y value          (repeatable)
//   [coulomb]     u = number | inf ; offsite = x y value
//   [phonon]      omega, cutoff ; coupling = x y value
//   [radiation]   L, kappa, m0, cutoff ; position = site px py pz
//
// '#' starts a comment. Unspecified matrix entries are 0.
// ---------------------------------------------------------------------------

namespace detail {

struct Entry {
  int x;
  int y;
  double value;
  int line;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void parse_fail(int line, const std::string& msg) {
  throw ValidationError("parse error at line " + std::to_string(line) + ": " + msg);
}

inline double parse_double(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') parse_fail(line, "expected a number, got '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s, int line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') parse_fail(line, "expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline Eigen::MatrixXd fill_matrix(int n, const std::vector<Entry>& entries, std::string_view what) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  std::set<std::pair<int, int>> seen;
  for (const auto& e : entries) {
    if (e.x < 0 || e.x >= n || e.y < 0 || e.y >= n) {
      parse_fail(e.line, std::string(what) + " index out of range for " + std::to_string(n) + " sites");
    }
    if (!seen.insert({e.x, e.y}).second) parse_fail(e.line, std::string(what) + " entry " + at(e.x, e.y) + " given twice");
    m(e.x, e.y) = e.value;
  }
  return m;
}

}  // namespace detail

inline LatticeModel parse_model(std::string_view text) {
  using namespace detail;
  using Section = std::map<std::string, std::vector<std::pair<std::string, int>>>;
  std::map<std::string, Section> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(line_no, "unterminated section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      static const std::set<std::string> known{"lattice", "coulomb", "phonon", "radiation"};
      if (!known.contains(current)) parse_fail(line_no, "unknown section [" + current + "]");
      if (sections.contains(current)) parse_fail(line_no, "section [" + current + "] repeated");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected key = value");
    if (current.empty()) parse_fail(line_no, "entry outside of a section");
    sections[current][trim(std::string_view(line).substr(0, eq))].emplace_back(
        trim(std::string_view(line).substr(eq + 1)), line_no);
  }

  auto single = [](const Section& sec, const std::string& key) -> std::optional<std::pair<std::string, int>> {
    const auto it = sec.find(key);
    if (it == sec.end()) return std::nullopt;
    if (it->second.size() != 1) parse_fail(it->second[1].second, "key '" + key + "' repeated");
    return it->second.front();
  };
  auto triplets = [](const Section& sec, const std::string& key) {
    std::vector<Entry> out;
    if (const auto it = sec.find(key); it != sec.end()) {
      for (const auto& [value, line] : it->second) {
        const auto toks = split_ws(value);
        if (toks.size() != 3) parse_fail(line, key + " expects 'x y value'");
        out.push_back({parse_int(toks[0], line), parse_int(toks[1], line), parse_double(toks[2], line), line});
      }
    }
    return out;
  };
  auto check_keys = [](const Section& sec, const std::string& name, const std::set<std::string>& allowed) {
    for (const auto& [key, values] : sec) {
      if (!allowed.contains(key)) parse_fail(values.front().second, "unknown key '" + key + "' in [" + name + "]");
    }
  };

  if (!sections.contains("lattice")) throw ValidationError("parse error: missing [lattice] section");
  const Section& lat = sections.at("lattice");
  check_keys(lat, "lattice", {"sites", "generator", "extent", "t", "hopping"});

  ModelSpec spec;
  const auto sites_kv = single(lat, "sites");
  const auto gen_kv = single(lat, "generator");
  if (gen_kv) {
    const auto extent_kv = single(lat, "extent");
    if (!extent_kv) parse_fail(gen_kv->second, "generator needs an extent");
    std::vector<int> extent;
    std::string ext = extent_kv->first;
    for (char& c : ext) {
      if (c == 'x' || c == 'X' || c == ',') c = ' ';
    }
    for (const auto& tok : split_ws(ext)) extent.push_back(parse_int(tok, extent_kv->second));
    const auto t_kv = single(lat, "t");
    const double t = t_kv ? parse_double(t_kv->first, t_kv->second) : 1.0;
    spec.hopping = generate_lattice(parse_family(gen_kv->first), extent, t);
    spec.sites = static_cast<int>(spec.hopping.rows());
    if (sites_kv && parse_int(sites_kv->first, sites_kv->second) != spec.sites) {
      parse_fail(sites_kv->second, "sites disagrees with generator extent");
    }
    if (lat.contains("hopping")) parse_fail(lat.at("hopping").front().second, "give either generator or hopping rows");
  } else {
    if (!sites_kv) throw ValidationError("parse error: [lattice] needs sites or generator");
    spec.sites = parse_int(sites_kv->first, sites_kv->second);
    if (spec.sites < 2 || spec.sites > kMaxSites) parse_fail(sites_kv->second, "sites out of range");
    spec.hopping = fill_matrix(spec.sites, triplets(lat, "hopping"), "hopping");
  }

  if (const auto it = sections.find("coulomb"); it != sections.end()) {
    check_keys(it->second, "coulomb", {"u", "offsite"});
    if (const auto u = single(it->second, "u")) {
      if (u->first == "inf" || u->first == "INFINITE" || u->first == "infinite" || u->first == "\"inf\"") {
        spec.onsite_u = OnsiteU::infinite();
      } else {
        spec.onsite_u = OnsiteU::finite(parse_double(u->first, u->second));
      }
    }
    spec.offsite_u = fill_matrix(spec.sites, triplets(it->second, "offsite"), "offsite");
  }

  if (const auto it = sections.find("phonon"); it != sections.end()) {
    check_keys(it->second, "phonon", {"omega", "cutoff", "coupling"});
    PhononParams p;
    const auto omega = single(it->second, "omega");
    if (!omega) throw ValidationError("parse error: [phonon] needs omega");
    p.omega = parse_double(omega->first, omega->second);
    if (const auto c = single(it->second, "cutoff")) p.cutoff = parse_int(c->first, c->second);
    p.coupling = fill_matrix(spec.sites, triplets(it->second, "coupling"), "coupling");
    spec.phonon = p;
  }

  if (const auto it = sections.find("radiation"); it != sections.end()) {
    check_keys(it->second, "radiation", {"L", "kappa", "m0", "cutoff", "position"});
    RadiationParams r;
    auto need = [&](const std::string& key) {
      const auto kv = single(it->second, key);
      if (!kv) throw ValidationError("parse error: [radiation] needs " + key);
      return parse_double(kv->first, kv->second);
    };
    r.box_length = need("L");
    r.uv_cutoff = need("kappa");
    r.mass = need("m0");
    if (const auto c = single(it->second, "cutoff")) r.cutoff = parse_int(c->first, c->second);
    if (const auto pit = it->second.find("position"); pit != it->second.end()) {
      std::vector<std::optional<Eigen::Vector3d>> pos(static_cast<std::size_t>(spec.sites));
      for (const auto& [value, line] : pit->second) {
        const auto toks = split_ws(value);
        if (toks.size() != 4) parse_fail(line, "position expects 'site x y z'");
        const int site = parse_int(toks[0], line);
        if (site < 0 || site >= spec.sites) parse_fail(line, "position site out of range");
        if (pos[static_cast<std::size_t>(site)]) parse_fail(line, "position for site given twice");
        pos[static_cast<std::size_t>(site)] =
            Eigen::Vector3d(parse_double(toks[1], line), parse_double(toks[2], line), parse_double(toks[3], line));
      }
      for (std::size_t i = 0; i < pos.size(); ++i) {
        if (!pos[i]) throw ValidationError("parse error: radiation positions must cover every site (missing " +
                                           std::to_string(i) + ")");
        r.positions.push_back(*pos[i]);
      }
    }
    spec.radiation = r;
  }
  return LatticeModel(std::move(spec));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("file not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LatticeModel load_model(const std::string& path) { return parse_model(read_file(path)); }

/// Sites with a nonzero hopping link, ignoring the diagonal.
inline bool hopping_graph_connected(const LatticeModel& model) {
  const int n = model.sites();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (int y = 0; y < n; ++y) {
      if (y != x && model.t(x, y) != 0.0 && !seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = true;
        stack.push_back(y);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace nagaoka
