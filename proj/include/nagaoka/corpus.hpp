#pragma once

// Built-in model corpus: small lattices spanning connected and disconnected
// configuration sectors.

#include <string>
#include <vector>

#include "nagaoka/model.hpp"

namespace nagaoka {

struct CorpusEntry {
  std::string name;
  std::string text;  // model file contents

  [[nodiscard]] LatticeModel model() const { return parse_model(text); }
};

inline const std::vector<CorpusEntry>& builtin_corpus() {
  static const std::vector<CorpusEntry> corpus{
      {"pair", "[lattice]\ngenerator = chain\nextent = 2\n"},
      {"chain3", "[lattice]\ngenerator = chain\nextent = 3\n"},
      {"triangle", "[lattice]\ngenerator = complete\nextent = 3\n"},
      {"square", "[lattice]\ngenerator = square_patch\nextent = 2x2\n"},
      {"complete4", "[lattice]\ngenerator = complete\nextent = 4\n"},
      {"square_diag",
       "[lattice]\nsites = 4\n"
       "hopping = 0 1 1\nhopping = 1 0 1\nhopping = 2 3 1\nhopping = 3 2 1\n"
       "hopping = 0 2 1\nhopping = 2 0 1\nhopping = 1 3 1\nhopping = 3 1 1\n"
       "hopping = 0 3 1\nhopping = 3 0 1\n"},
  };
  return corpus;
}

inline const CorpusEntry& corpus_entry(const std::string& name) {
  for (const auto& e : builtin_corpus()) {
    if (e.name == name) return e;
  }
  throw ValidationError("no built-in model named " + name);
}

/// Copy of `model` with diagonal Holstein coupling g δ_xy.
inline LatticeModel with_diagonal_phonons(const LatticeModel& model, double g, double omega, int cutoff) {
  return model.with([&](ModelSpec& s) {
    PhononParams p;
    p.omega = omega;
    p.cutoff = cutoff;
    p.coupling = g * Eigen::MatrixXd::Identity(s.sites, s.sites);
    s.phonon = p;
  });
}

}  // namespace nagaoka
