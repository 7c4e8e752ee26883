#pragma once

// Fixed-particle-number fermion Fock bases, truncated boson bases and the
// second-quantized operators acting on them.
//
// Fermion modes: up spin at site x is mode x, down spin is mode |Λ| + x.
// c†_m on a bit word w carries the sign (-1)^{#occupied modes below m}.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nagaoka/core.hpp"
#include "nagaoka/sector.hpp"
#include "nagaoka/sparse.hpp"

namespace nagaoka {

enum class Spin { up = 0, down = 1 };

using FockWord = std::uint64_t;

inline int fermion_mode(int sites, int site, Spin s) { return s == Spin::up ? site : sites + site; }

/// (-1)^{popcount of w below bit m}.
inline double jw_sign(FockWord w, int mode) {
  const FockWord below = (FockWord{1} << mode) - 1;
  return (std::popcount(w & below) % 2 == 0) ? 1.0 : -1.0;
}

/// All bit words over 2|Λ| modes with exactly `electrons` bits, ascending.
class FockBasis {
 public:
  FockBasis(int sites, int electrons) : sites_(sites), electrons_(electrons) {
    const int modes = 2 * sites;
    if (sites < 1 || modes > 32) throw ValidationError("Fock basis supports 1..16 sites");
    if (electrons < 0 || electrons > modes) throw ValidationError("electron count out of range");
    check_budget(binomial(modes, electrons), "Fock basis");
    states_.reserve(binomial(modes, electrons));
    if (electrons == 0) {
      states_.push_back(0);
      return;
    }
    const FockWord limit = FockWord{1} << modes;
    // Gosper's hack enumerates same-popcount words in increasing order.
    for (FockWord w = (FockWord{1} << electrons) - 1; w < limit;) {
      states_.push_back(w);
      const FockWord c = w & (~w + 1);
      const FockWord r = w + c;
      w = (((r ^ w) >> 2) / c) | r;
    }
  }

  [[nodiscard]] int sites() const { return sites_; }
  [[nodiscard]] int modes() const { return 2 * sites_; }
  [[nodiscard]] int electrons() const { return electrons_; }
  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] FockWord operator[](std::size_t i) const { return states_[i]; }
  [[nodiscard]] const std::vector<FockWord>& states() const { return states_; }

  [[nodiscard]] std::optional<std::size_t> find(FockWord w) const {
    const auto it = std::lower_bound(states_.begin(), states_.end(), w);
    if (it == states_.end() || *it != w) return std::nullopt;
    return static_cast<std::size_t>(it - states_.begin());
  }

  [[nodiscard]] bool doubly_occupied(FockWord w) const {
    const FockWord mask = (FockWord{1} << sites_) - 1;
    return ((w & mask) & (w >> sites_)) != 0;
  }
  [[nodiscard]] int occupation(FockWord w, int site) const {
    return static_cast<int>((w >> site) & 1u) + static_cast<int>((w >> (sites_ + site)) & 1u);
  }
  /// Twice the S^3 eigenvalue of a basis word.
  [[nodiscard]] int twice_sz(FockWord w) const {
    const FockWord mask = (FockWord{1} << sites_) - 1;
    return std::popcount(w & mask) - std::popcount(w >> sites_);
  }

 private:
  int sites_;
  int electrons_;
  std::vector<FockWord> states_;
};

enum class FermionOp { create, annihilate, number };

/// c†, c or n for one (site, spin). create maps N -> N+1 and annihilate N -> N-1
/// (rows index the target fixed-N basis); number is square.
inline SparseOperator build_fermion_op(const FockBasis& basis, FermionOp kind, int site, Spin spin) {
  if (site < 0 || site >= basis.sites()) throw ValidationError("site out of range");
  const int m = fermion_mode(basis.sites(), site, spin);
  const FockWord bit = FockWord{1} << m;
  std::vector<Triplet> t;
  if (kind == FermionOp::number) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (basis[i] & bit) t.emplace_back(i, i, 1.0);
    }
    return SparseOperator::from_triplets(basis.size(), basis.size(), t, true);
  }
  const int n_target = basis.electrons() + (kind == FermionOp::create ? 1 : -1);
  if (n_target < 0 || n_target > basis.modes()) {
    return SparseOperator(SpMat(0, static_cast<Eigen::Index>(basis.size())), false);
  }
  const FockBasis target(basis.sites(), n_target);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const FockWord w = basis[i];
    const bool occupied = (w & bit) != 0;
    if (kind == FermionOp::create && !occupied) {
      t.emplace_back(*target.find(w | bit), i, jw_sign(w, m));
    } else if (kind == FermionOp::annihilate && occupied) {
      t.emplace_back(*target.find(w & ~bit), i, jw_sign(w, m));
    }
  }
  return SparseOperator::from_triplets(target.size(), basis.size(), t, false);
}

/// c†_{x s} c_{y s} as a square matrix on the fixed-N basis.
inline SparseOperator build_hop(const FockBasis& basis, int x, int y, Spin spin) {
  const int mx = fermion_mode(basis.sites(), x, spin);
  const int my = fermion_mode(basis.sites(), y, spin);
  const FockWord bx = FockWord{1} << mx;
  const FockWord by = FockWord{1} << my;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const FockWord w = basis[i];
    if (!(w & by)) continue;
    const FockWord mid = w & ~by;
    if (mid & bx) continue;
    t.emplace_back(*basis.find(mid | bx), i, jw_sign(w, my) * jw_sign(mid, mx));
  }
  return SparseOperator::from_triplets(basis.size(), basis.size(), t, x == y);
}

/// Diagonal projector onto words without a doubly occupied site.
inline SparseOperator build_gutzwiller(const FockBasis& basis) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (!basis.doubly_occupied(basis[i])) t.emplace_back(i, i, 1.0);
  }
  return SparseOperator::from_triplets(basis.size(), basis.size(), t, true);
}

struct SpinOperators {
  SparseOperator s3;
  SparseOperator splus;
  SparseOperator sminus;
  SparseOperator stot2;
};

inline SpinOperators build_spin_ops(const FockBasis& basis) {
  Eigen::VectorXd sz(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) sz[static_cast<Eigen::Index>(i)] = 0.5 * basis.twice_sz(basis[i]);
  SpinOperators ops;
  ops.s3 = diagonal(sz);
  SpMat sminus(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(basis.size()));
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const FockWord w = basis[i];
    for (int x = 0; x < basis.sites(); ++x) {
      const int mu = fermion_mode(basis.sites(), x, Spin::up);
      const int md = fermion_mode(basis.sites(), x, Spin::down);
      const FockWord bu = FockWord{1} << mu;
      const FockWord bd = FockWord{1} << md;
      if (!(w & bu) || (w & bd)) continue;
      const FockWord mid = w & ~bu;
      t.emplace_back(*basis.find(mid | bd), i, jw_sign(w, mu) * jw_sign(mid, md));
    }
  }
  sminus.setFromTriplets(t.begin(), t.end());
  ops.sminus = SparseOperator(sminus, false);
  ops.splus = ops.sminus.adjoint();
  const SpMat s3 = ops.s3.matrix();
  const SpMat s2 = s3 * s3 + 0.5 * (ops.splus.matrix() * ops.sminus.matrix()) +
                   0.5 * (ops.sminus.matrix() * ops.splus.matrix());
  ops.stot2 = SparseOperator(s2, true);
  return ops;
}

// ---------------------------------------------------------------------------
// Bosons
// ---------------------------------------------------------------------------

/// Occupation tuples (n_0, ..., n_{modes-1}) with n_i <= cutoff, mixed radix
/// with mode 0 most significant (matches Kronecker order of per-mode factors).
class BosonBasis {
 public:
  BosonBasis(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
    if (modes < 0 || cutoff < 0) throw ValidationError("boson basis needs modes >= 0 and cutoff >= 0");
    std::size_t dim = 1;
    for (int i = 0; i < modes; ++i) {
      dim *= static_cast<std::size_t>(cutoff + 1);
      check_budget(dim, "boson basis");
    }
    dim_ = dim;
  }

  [[nodiscard]] int modes() const { return modes_; }
  [[nodiscard]] int cutoff() const { return cutoff_; }
  [[nodiscard]] std::size_t size() const { return dim_; }

  [[nodiscard]] std::vector<int> occupations(std::size_t index) const {
    std::vector<int> occ(static_cast<std::size_t>(modes_));
    for (int m = modes_ - 1; m >= 0; --m) {
      occ[static_cast<std::size_t>(m)] = static_cast<int>(index % static_cast<std::size_t>(cutoff_ + 1));
      index /= static_cast<std::size_t>(cutoff_ + 1);
    }
    return occ;
  }
  [[nodiscard]] std::size_t index(const std::vector<int>& occ) const {
    std::size_t idx = 0;
    for (int m = 0; m < modes_; ++m) idx = idx * static_cast<std::size_t>(cutoff_ + 1) + static_cast<std::size_t>(occ[static_cast<std::size_t>(m)]);
    return idx;
  }
  /// Stride of mode m in the flat index.
  [[nodiscard]] std::size_t stride(int mode) const {
    std::size_t s = 1;
    for (int m = mode + 1; m < modes_; ++m) s *= static_cast<std::size_t>(cutoff_ + 1);
    return s;
  }

 private:
  int modes_;
  int cutoff_;
  std::size_t dim_ = 1;
};

enum class BosonOp { create, annihilate, number_total };

/// Truncated ladder operators: b† annihilates the top level.
inline SparseOperator build_boson_op(const BosonBasis& basis, BosonOp kind, int mode = 0) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  std::vector<Triplet> t;
  if (kind == BosonOp::number_total) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      int n = 0;
      for (int o : basis.occupations(i)) n += o;
      if (n != 0) t.emplace_back(i, i, static_cast<double>(n));
    }
    return SparseOperator::from_triplets(dim, dim, t, true);
  }
  if (mode < 0 || mode >= basis.modes()) throw ValidationError("boson mode out of range");
  const std::size_t stride = basis.stride(mode);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int n = basis.occupations(i)[static_cast<std::size_t>(mode)];
    if (kind == BosonOp::create && n < basis.cutoff()) {
      t.emplace_back(i + stride, i, std::sqrt(static_cast<double>(n + 1)));
    } else if (kind == BosonOp::annihilate && n > 0) {
      t.emplace_back(i - stride, i, std::sqrt(static_cast<double>(n)));
    }
  }
  return SparseOperator::from_triplets(dim, dim, t, false);
}

/// Single-mode ladder matrix b on levels 0..cutoff.
inline Eigen::MatrixXd single_mode_annihilator(int cutoff) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return b;
}

/// Kronecker product of dense per-mode factors, mode 0 most significant.
inline SparseOperator kron_modes(const std::vector<DenseMat>& factors) {
  std::size_t dim = 1;
  for (const auto& f : factors) {
    dim *= static_cast<std::size_t>(f.rows());
    check_budget(dim, "mode product");
  }
  SpMat out(1, 1);
  out.insert(0, 0) = 1.0;
  for (const auto& f : factors) out = Eigen::kroneckerProduct(out, SpMat(f.sparseView())).eval();
  return SparseOperator(std::move(out), false);
}

// ---------------------------------------------------------------------------
// Embedding of the hole-spin configuration basis into the Fock space
// ---------------------------------------------------------------------------

/// Fock word and sign of |x,σ> = c_{x↑} Π'_z c†_{z σ'_z} Ω, where the product
/// runs over sites in ascending order (site 0 leftmost) and σ'_x = ↑.
inline std::pair<FockWord, double> configuration_word(int sites, const HoleSpinConfig& c) {
  FockWord w = 0;
  double sign = 1.0;
  for (int z = sites - 1; z >= 0; --z) {
    const bool up = z == c.hole || ((c.up_mask >> z) & 1u);
    const int m = fermion_mode(sites, z, up ? Spin::up : Spin::down);
    sign *= jw_sign(w, m);
    w |= FockWord{1} << m;
  }
  sign *= jw_sign(w, c.hole);
  w &= ~(FockWord{1} << c.hole);
  return {w, sign};
}

/// Isometry V: sector basis -> N-electron Fock basis (columns are |x,σ>).
inline SparseOperator configuration_embedding(const FockBasis& fock, const SectorBasis& sector) {
  if (fock.sites() != sector.sites() || fock.electrons() != sector.sites() - 1) {
    throw ValidationError("embedding needs the N = |Λ| - 1 Fock basis of the same lattice");
  }
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < sector.size(); ++j) {
    const auto [w, sign] = configuration_word(sector.sites(), sector[j]);
    t.emplace_back(*fock.find(w), j, sign);
  }
  return SparseOperator::from_triplets(fock.size(), sector.size(), t, false);
}

}  // namespace nagaoka
