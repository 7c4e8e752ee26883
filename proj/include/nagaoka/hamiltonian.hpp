#pragma once

// Hamiltonian assembly: full-space finite-U Hubbard (optionally with phonons),
// the U = ∞ single-hole sector Hamiltonian by two independent routes, and the
// Holstein-Hubbard sector Hamiltonian in the direct and Lang-Firsov frames.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nagaoka/core.hpp"
#include "nagaoka/manybody.hpp"
#include "nagaoka/model.hpp"
#include "nagaoka/sector.hpp"
#include "nagaoka/sparse.hpp"

namespace nagaoka {

enum class Provenance { direct_formula, projected, holstein_direct, lang_firsov, radiation, position_grid, hubbard_fock };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::direct_formula: return "direct_formula";
    case Provenance::projected: return "projected";
    case Provenance::holstein_direct: return "holstein_direct";
    case Provenance::lang_firsov: return "lang_firsov";
    case Provenance::radiation: return "radiation";
    case Provenance::position_grid: return "position_grid";
    case Provenance::hubbard_fock: return "hubbard_fock";
  }
  return "?";
}

/// A sector Hamiltonian on (configuration basis) ⊗ (boson space of dimension
/// boson_dim), configuration index major.
struct SectorHamiltonian {
  SectorBasis basis;
  SparseOperator matrix;
  Provenance provenance = Provenance::direct_formula;
  std::size_t boson_dim = 1;
  int cutoff = 0;

  // Lang-Firsov: the dropped -ω⁻¹ Σ_x (g²)_xx n_x term, one value per hole position.
  std::vector<double> dropped_per_hole;
  bool dropped_is_constant = true;
  bool dropped_restored = false;

  // Radiation: frequencies of modes factored out as exact spectators.
  std::vector<double> spectator_frequencies;

  [[nodiscard]] Eigen::Index dimension() const { return matrix.dimension(); }
  [[nodiscard]] Magnetization magnetization() const { return basis.magnetization(); }
  /// Value of the dropped term when it is a true constant (0 otherwise / when absent).
  [[nodiscard]] double dropped_constant() const {
    if (dropped_per_hole.empty() || !dropped_is_constant) return 0.0;
    return dropped_per_hole.front();
  }
};

namespace detail {

inline void require_infinite_u(const LatticeModel& model) {
  if (!model.onsite_u().is_infinite()) {
    throw ValidationError("sector Hamiltonians require U = inf (use assemble_hubbard_full for finite U)");
  }
}

/// Σ_{x≠y} U_xy n_x n_y on a configuration (hole empty, every other site singly occupied).
inline double offsite_energy(const Eigen::MatrixXd& u, const HoleSpinConfig& c) {
  double e = 0.0;
  const auto n = static_cast<int>(u.rows());
  for (int x = 0; x < n; ++x) {
    if (x == c.hole) continue;
    for (int y = 0; y < n; ++y) {
      if (y != x && y != c.hole) e += u(x, y);
    }
  }
  return e;
}

/// −t_xy entries at (S_yx(c), c), the t_xx n_x diagonal and the U_xy diagonal.
inline std::vector<Triplet> sector_electron_triplets(const LatticeModel& model, const SectorBasis& basis,
                                                     const Eigen::MatrixXd& coulomb) {
  std::vector<Triplet> t;
  const int n = model.sites();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const HoleSpinConfig& c = basis[i];
    double diag = offsite_energy(coulomb, c);
    for (int z = 0; z < n; ++z) {
      if (z != c.hole) diag += model.t(z, z);
    }
    if (diag != 0.0) t.emplace_back(i, i, diag);
    for (int y = 0; y < n; ++y) {
      if (y == c.hole || model.t(c.hole, y) == 0.0) continue;
      t.emplace_back(*basis.find(*apply_move(c, c.hole, y)), i, -model.t(c.hole, y));
    }
  }
  return t;
}

inline SparseOperator phonon_part(const SparseOperator& electron_identity, const std::vector<SparseOperator>& n_site,
                                  const PhononParams& ph, int sites) {
  const BosonBasis bosons(sites, ph.cutoff);
  SparseOperator total = tensor(electron_identity, ph.omega * build_boson_op(bosons, BosonOp::number_total));
  for (int y = 0; y < sites; ++y) {
    const SparseOperator b = build_boson_op(bosons, BosonOp::annihilate, y);
    const SparseOperator q = (b + b.adjoint()).as_hermitian();
    for (int x = 0; x < sites; ++x) {
      if (ph.coupling(x, y) != 0.0) total = total + tensor(ph.coupling(x, y) * n_site[static_cast<std::size_t>(x)], q);
    }
  }
  return total;
}

}  // namespace detail

/// Σ t_xy c†_xσ c_yσ + U Σ n↑n↓ + Σ_{x≠y} U_xy n_x n_y on the N = |Λ|-1 Fock
/// space, plus Σ g_xy n_x (b†_y + b_y) + ω N_b when the model has phonons.
inline SparseOperator assemble_hubbard_full(const LatticeModel& model, double u) {
  if (!std::isfinite(u)) throw ValidationError("assemble_hubbard_full needs a finite U");
  const int n = model.sites();
  const FockBasis fock(n, model.electrons());
  const auto dim = static_cast<Eigen::Index>(fock.size());
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < fock.size(); ++i) {
    const FockWord w = fock[i];
    double diag = 0.0;
    for (int x = 0; x < n; ++x) {
      const int nx = fock.occupation(w, x);
      if (nx == 2) diag += u;
      for (int y = 0; y < n; ++y) {
        if (y != x) diag += model.offsite_u()(x, y) * nx * fock.occupation(w, y);
      }
    }
    if (diag != 0.0) t.emplace_back(i, i, diag);
  }
  SparseOperator h = SparseOperator::from_triplets(dim, dim, t, true);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (model.t(x, y) == 0.0) continue;
      for (Spin s : {Spin::up, Spin::down}) h = h + model.t(x, y) * build_hop(fock, x, y, s);
    }
  }
  h = h.as_hermitian();
  if (!model.phonon()) return h;
  const auto& ph = *model.phonon();
  std::vector<SparseOperator> n_site;
  for (int x = 0; x < n; ++x) {
    n_site.push_back(build_fermion_op(fock, FermionOp::number, x, Spin::up) +
                     build_fermion_op(fock, FermionOp::number, x, Spin::down));
  }
  const BosonBasis bosons(n, ph.cutoff);
  const SparseOperator id_b = SparseOperator::identity(static_cast<Eigen::Index>(bosons.size()));
  return (tensor(h, id_b) + detail::phonon_part(SparseOperator::identity(dim), n_site, ph, n)).as_hermitian();
}

/// Finite-U Hamiltonian restricted to one S³ = M block of the N = |Λ|-1 Fock
/// space (phonons included when present). `states` are Fock-basis indices.
struct FockSectorHamiltonian {
  Magnetization m;
  double u = 0.0;
  std::vector<std::size_t> states;
  SparseOperator matrix;
  std::size_t boson_dim = 1;
  int cutoff = 0;

  [[nodiscard]] Eigen::Index dimension() const { return matrix.dimension(); }
};

inline FockSectorHamiltonian assemble_hubbard_sector(const LatticeModel& model, Magnetization m, double u) {
  check_magnetization(model.sites(), m);
  if (model.radiation()) throw ValidationError("finite-U assembly does not support radiation models");
  const FockBasis fock(model.sites(), model.electrons());
  FockSectorHamiltonian out;
  out.m = m;
  out.u = u;
  for (std::size_t i = 0; i < fock.size(); ++i) {
    if (fock.twice_sz(fock[i]) == m.twice()) out.states.push_back(i);
  }
  if (model.phonon()) {
    out.cutoff = model.phonon()->cutoff;
    out.boson_dim = BosonBasis(model.sites(), out.cutoff).size();
  }
  check_budget(out.states.size() * out.boson_dim, "Fock sector");
  const SparseOperator full = assemble_hubbard_full(model, u);
  // Rows of the full operator indexed by (fock, boson) with the boson index fastest.
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(full.dimension()), -1);
  Eigen::Index next = 0;
  for (std::size_t f : out.states) {
    for (std::size_t b = 0; b < out.boson_dim; ++b) pos[f * out.boson_dim + b] = next++;
  }
  std::vector<Triplet> t;
  const SpMat& a = full.matrix();
  for (int c = 0; c < a.outerSize(); ++c) {
    for (SpMat::InnerIterator it(a, c); it; ++it) {
      const Eigen::Index r = pos[static_cast<std::size_t>(it.row())];
      const Eigen::Index k = pos[static_cast<std::size_t>(it.col())];
      if (r >= 0 && k >= 0) t.emplace_back(r, k, it.value());
    }
  }
  out.matrix = SparseOperator::from_triplets(next, next, t, true);
  return out;
}

/// Single-hole U = ∞ Hamiltonian written directly in the configuration basis.
inline SectorHamiltonian assemble_nagaoka_sector(const LatticeModel& model, Magnetization m) {
  detail::require_infinite_u(model);
  SectorBasis basis = enumerate_sector(model, m);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  auto t = detail::sector_electron_triplets(model, basis, model.offsite_u());
  SectorHamiltonian out{std::move(basis), SparseOperator::from_triplets(dim, dim, t, true)};
  out.provenance = Provenance::direct_formula;
  return out;
}

/// V† P H^{U=0} P V, with V the isometry onto the |x,σ> vectors of sector M.
inline SectorHamiltonian assemble_nagaoka_projected(const LatticeModel& model, Magnetization m) {
  detail::require_infinite_u(model);
  SectorBasis basis = enumerate_sector(model, m);
  const FockBasis fock(model.sites(), model.electrons());
  const LatticeModel bare = model.with([](ModelSpec& s) {
    s.onsite_u = OnsiteU::finite(0.0);
    s.phonon.reset();
    s.radiation.reset();
  });
  const SparseOperator h0 = assemble_hubbard_full(bare, 0.0);
  const SparseOperator p = build_gutzwiller(fock);
  const SparseOperator v = configuration_embedding(fock, basis);
  const SparseOperator php = p * h0 * p;
  SparseOperator h = (v.adjoint() * php * v);
  SectorHamiltonian out{std::move(basis), SparseOperator(h.matrix(), true)};
  out.provenance = Provenance::projected;
  return out;
}

/// U_eff = U_xy − ω⁻¹ (g g)_xy, the full symmetric matrix (its diagonal is unused).
inline Eigen::MatrixXd effective_coulomb(const LatticeModel& model) {
  if (!model.phonon()) throw ValidationError("effective_coulomb needs a [phonon] block");
  const auto& ph = *model.phonon();
  return model.offsite_u() - (ph.coupling * ph.coupling) / ph.omega;
}

namespace detail {

inline const PhononParams& require_phonon(const LatticeModel& model) {
  require_infinite_u(model);
  if (!model.phonon()) throw ValidationError("model has no [phonon] block");
  return *model.phonon();
}

inline int resolve_cutoff(const PhononParams& ph, std::optional<int> cutoff) {
  const int c = cutoff.value_or(ph.cutoff);
  if (c < 0) throw ValidationError("cutoff must be >= 0");
  return c;
}

}  // namespace detail

/// (hopping + U_xy) ⊗ I + Σ g_xy n̂_x ⊗ (b†_y + b_y) + I ⊗ ω N_b.
inline SectorHamiltonian assemble_holstein_sector(const LatticeModel& model, Magnetization m,
                                                  std::optional<int> cutoff = std::nullopt) {
  const PhononParams& ph = detail::require_phonon(model);
  PhononParams params = ph;
  params.cutoff = detail::resolve_cutoff(ph, cutoff);
  SectorBasis basis = enumerate_sector(model, m);
  const BosonBasis bosons(model.sites(), params.cutoff);
  check_budget(basis.size() * bosons.size(), "Holstein sector");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const auto te = detail::sector_electron_triplets(model, basis, model.offsite_u());
  const SparseOperator he = SparseOperator::from_triplets(dim, dim, te, true);
  std::vector<SparseOperator> n_site;
  for (int x = 0; x < model.sites(); ++x) {
    Eigen::VectorXd d(dim);
    for (std::size_t i = 0; i < basis.size(); ++i) d[static_cast<Eigen::Index>(i)] = basis[i].hole == x ? 0.0 : 1.0;
    n_site.push_back(diagonal(d));
  }
  const SparseOperator h =
      tensor(he, SparseOperator::identity(static_cast<Eigen::Index>(bosons.size()))) +
      detail::phonon_part(SparseOperator::identity(dim), n_site, params, model.sites());
  SectorHamiltonian out{std::move(basis), h.as_hermitian()};
  out.provenance = Provenance::holstein_direct;
  out.boson_dim = bosons.size();
  out.cutoff = params.cutoff;
  return out;
}

/// Dressed hopping phase ϑ_xy = exp(−i√2 ω^{-3/2} Σ_z (g_xz − g_yz) p_z) with
/// p_z = i√(ω/2)(b†_z − b_z) truncated; built per mode from the eigen-
/// decomposition of the truncated p and multiplied out in Kronecker order.
inline SparseOperator lang_firsov_phase(const PhononParams& ph, int sites, int x, int y) {
  const int levels = ph.cutoff + 1;
  const Eigen::MatrixXd b = single_mode_annihilator(ph.cutoff);
  const DenseMat p = cplx(0.0, std::sqrt(ph.omega / 2.0)) * (b.transpose() - b).cast<cplx>();
  const Eigen::SelfAdjointEigenSolver<DenseMat> eig(p);
  const double scale = std::sqrt(2.0) * std::pow(ph.omega, -1.5);
  std::vector<DenseMat> factors;
  for (int z = 0; z < sites; ++z) {
    const double a = scale * (ph.coupling(x, z) - ph.coupling(y, z));
    if (a == 0.0) {
      factors.push_back(DenseMat::Identity(levels, levels));
      continue;
    }
    const Eigen::VectorXcd phases = (cplx(0.0, -a) * eig.eigenvalues().cast<cplx>()).array().exp();
    // −i a p = a√(ω/2)(b† − b) is real antisymmetric, so the exponential is real
    // orthogonal; drop the rounding-level imaginary part.
    const DenseMat f = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
    factors.push_back(f.real().cast<cplx>());
  }
  return kron_modes(factors);
}

/// Σ ϑ_xy ⊗ T_xy(σ) + Ũ_eff + ω N_b, in the Lang-Firsov frame. The diagonal
/// −ω⁻¹ Σ_x (g²)_xx n_x is dropped (recorded per hole position) unless
/// `restore_dropped` puts it back into the matrix.
inline SectorHamiltonian assemble_lang_firsov_sector(const LatticeModel& model, Magnetization m,
                                                     std::optional<int> cutoff = std::nullopt,
                                                     bool restore_dropped = false) {
  const PhononParams& ph = detail::require_phonon(model);
  PhononParams params = ph;
  params.cutoff = detail::resolve_cutoff(ph, cutoff);
  SectorBasis basis = enumerate_sector(model, m);
  const int n = model.sites();
  const BosonBasis bosons(n, params.cutoff);
  const std::size_t db = bosons.size();
  check_budget(basis.size() * db, "Lang-Firsov sector");

  const Eigen::MatrixXd ueff = effective_coulomb(model);
  const Eigen::MatrixXd g2 = params.coupling * params.coupling;
  std::vector<double> dropped(static_cast<std::size_t>(n));
  for (int h = 0; h < n; ++h) dropped[static_cast<std::size_t>(h)] = -(g2.trace() - g2(h, h)) / params.omega;
  bool constant = true;
  for (double d : dropped) constant = constant && std::abs(d - dropped.front()) <= 1e-14 * (1.0 + std::abs(d));

  // One phase matrix per ordered pair, computed once.
  std::vector<std::optional<SparseOperator>> phase(static_cast<std::size_t>(n * n));
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x != y && model.t(x, y) != 0.0) phase[static_cast<std::size_t>(x * n + y)] = lang_firsov_phase(params, n, x, y);
    }
  }

  std::vector<Triplet> t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const HoleSpinConfig& c = basis[i];
    double diag = detail::offsite_energy(ueff, c);
    for (int z = 0; z < n; ++z) {
      if (z != c.hole) diag += model.t(z, z);
    }
    if (restore_dropped) diag += dropped[static_cast<std::size_t>(c.hole)];
    if (diag != 0.0) {
      for (std::size_t k = 0; k < db; ++k) t.emplace_back(i * db + k, i * db + k, diag);
    }
    for (int y = 0; y < n; ++y) {
      if (y == c.hole || model.t(c.hole, y) == 0.0) continue;
      const std::size_t j = *basis.find(*apply_move(c, c.hole, y));
      const SpMat& th = phase[static_cast<std::size_t>(c.hole * n + y)]->matrix();
      for (int col = 0; col < th.outerSize(); ++col) {
        for (SpMat::InnerIterator it(th, col); it; ++it) {
          t.emplace_back(j * db + static_cast<std::size_t>(it.row()), i * db + static_cast<std::size_t>(col),
                         -model.t(c.hole, y) * it.value());
        }
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(basis.size() * db);
  const auto de = static_cast<Eigen::Index>(basis.size());
  const SparseOperator h = SparseOperator::from_triplets(dim, dim, t, false) +
                           tensor(SparseOperator::identity(de), params.omega * build_boson_op(bosons, BosonOp::number_total));
  SectorHamiltonian out{std::move(basis), SparseOperator(h.matrix(), true)};
  out.provenance = Provenance::lang_firsov;
  out.boson_dim = db;
  out.cutoff = params.cutoff;
  out.dropped_per_hole = std::move(dropped);
  out.dropped_is_constant = constant;
  out.dropped_restored = restore_dropped;
  return out;
}

}  // namespace nagaoka
