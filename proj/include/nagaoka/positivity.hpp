#pragma once

// Finite-dimensional positivity machinery in a distinguished orthonormal basis:
// positivity preserving/improving predicates, ergodicity as irreducibility,
// Perron-Frobenius certificates, spin-lowering positivity and a position-grid
// representation of the Lang-Firsov Holstein Hamiltonian.

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "nagaoka/core.hpp"
#include "nagaoka/hamiltonian.hpp"
#include "nagaoka/manybody.hpp"
#include "nagaoka/sector.hpp"
#include "nagaoka/spectral.hpp"
#include "nagaoka/sparse.hpp"

namespace nagaoka {

inline constexpr double kStrictPositivity = 1e-12;

/// Every entry real and ≥ −tol.
inline bool preserves_positivity(const SparseOperator& a, double tol = 0.0) {
  const SpMat& m = a.matrix();
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      if (std::abs(it.value().imag()) > tol || it.value().real() < -tol) return false;
    }
  }
  return true;
}

namespace detail {

/// Adjacency lists of {(row, col): entry > tol, row ≠ col}; edge col -> row.
inline std::vector<std::vector<Eigen::Index>> support_digraph(const SpMat& m, double tol, bool reverse) {
  std::vector<std::vector<Eigen::Index>> adj(static_cast<std::size_t>(m.rows()));
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      if (it.row() == it.col() || it.value().real() <= tol) continue;
      if (reverse) {
        adj[static_cast<std::size_t>(it.row())].push_back(it.col());
      } else {
        adj[static_cast<std::size_t>(it.col())].push_back(it.row());
      }
    }
  }
  return adj;
}

inline bool reaches_all(const std::vector<std::vector<Eigen::Index>>& adj) {
  if (adj.empty()) return true;
  std::vector<bool> seen(adj.size(), false);
  std::deque<Eigen::Index> queue{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    const Eigen::Index u = queue.front();
    queue.pop_front();
    for (Eigen::Index v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == adj.size();
}

inline bool strongly_connected(const SpMat& m, double tol) {
  return reaches_all(support_digraph(m, tol, false)) && reaches_all(support_digraph(m, tol, true));
}

}  // namespace detail

/// e^A ⊳ 0 for entrywise-nonnegative A: the support digraph is strongly
/// connected (ℓ = 0 covers the diagonal).
inline bool improves_positivity_exp(const SparseOperator& a, double tol = 0.0) {
  if (!preserves_positivity(a, tol)) throw ValidationError("improves_positivity_exp needs an entrywise-nonnegative matrix");
  return detail::strongly_connected(a.matrix(), tol);
}

/// Connectivity of the positive off-diagonal support of −H.
inline bool ergodicity_certificate(const SparseOperator& h) {
  return detail::strongly_connected(SpMat(-h.matrix()), 0.0);
}

inline bool ergodicity_certificate(const SectorHamiltonian& h) { return ergodicity_certificate(h.matrix); }

/// Off-diagonal entries of −H real and ≥ −tol.
inline bool offdiag_sign_ok(const SparseOperator& h, double tol = 1e-14) {
  const SpMat& m = h.matrix();
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      if (it.row() == it.col()) continue;
      if (std::abs(it.value().imag()) > tol || -it.value().real() < -tol) return false;
    }
  }
  return true;
}

struct PositivityCertificate {
  std::string basis;
  bool offdiag_sign_ok = false;
  bool irreducible = false;
  bool ground_unique = false;
  bool ground_strictly_positive = false;
  double min_entry = 0.0;  // after sign normalization, unit vector
  double ground_energy = 0.0;
  std::optional<double> gap;

  /// Sign structure + irreducibility, and the Perron-Frobenius conclusion.
  [[nodiscard]] bool holds() const {
    return offdiag_sign_ok && irreducible && ground_unique && ground_strictly_positive;
  }
};

/// Certificate from a ground vector. Normalizes the phase so the largest-
/// magnitude entry is positive; throws when sign structure and irreducibility
/// hold but the ground state is not unique and strictly positive.
inline PositivityCertificate pf_certificate(const SparseOperator& h, const DenseVec& v0, bool unique,
                                            std::string basis_tag) {
  PositivityCertificate c;
  c.basis = std::move(basis_tag);
  c.offdiag_sign_ok = offdiag_sign_ok(h);
  c.irreducible = ergodicity_certificate(h);
  c.ground_unique = unique;
  Eigen::Index arg = 0;
  v0.cwiseAbs().maxCoeff(&arg);
  const cplx phase = std::conj(v0[arg]) / std::abs(v0[arg]);
  const DenseVec v = phase * v0 / v0.norm();
  double min_re = INFINITY;
  double max_im = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    min_re = std::min(min_re, v[i].real());
    max_im = std::max(max_im, std::abs(v[i].imag()));
  }
  c.min_entry = min_re;
  c.ground_strictly_positive = min_re > kStrictPositivity && max_im <= kStrictPositivity;
  if (c.offdiag_sign_ok && c.irreducible && !(c.ground_unique && c.ground_strictly_positive)) {
    throw NumericalError("Perron-Frobenius inconsistency in basis '" + c.basis + "': unique=" +
                         std::to_string(c.ground_unique) + " min_entry=" + std::to_string(c.min_entry));
  }
  return c;
}

/// Solves for the two lowest levels and certifies.
inline PositivityCertificate pf_certificate(const SparseOperator& h, std::string basis_tag) {
  const int n = static_cast<int>(h.dimension());
  const EigenResult e = eig_lowest(h, std::min(n, 2));
  bool unique = true;
  std::optional<double> gap;
  if (n > 1) {
    gap = e.values[1] - e.values[0];
    unique = *gap > kClusterTol * (1.0 + std::abs(e.values[0]));
  }
  PositivityCertificate c = pf_certificate(h, e.vectors.col(0), unique, std::move(basis_tag));
  c.ground_energy = e.values[0];
  c.gap = gap;
  return c;
}

inline PositivityCertificate pf_certificate(const SectorHamiltonian& h) {
  return pf_certificate(h.matrix, std::string("configuration M=") + h.magnetization().str());
}

/// Adding a real diagonal never changes the ergodicity certificate.
inline bool diagonal_perturbation_equivalence(const SparseOperator& h, const Eigen::VectorXd& d) {
  if (d.size() != h.dimension()) throw ValidationError("diagonal perturbation has the wrong length");
  return ergodicity_certificate(h) == ergodicity_certificate(h + diagonal(d));
}

/// S⁻ from sector M to M−1 computed through the Fock space, V_{M−1}† S⁻ V_M.
inline SparseOperator fock_sector_lowering(int sites, Magnetization m) {
  const SectorBasis from = enumerate_sector(sites, m);
  const SectorBasis to = enumerate_sector(sites, Magnetization::from_twice(m.twice() - 2));
  const FockBasis fock(sites, sites - 1);
  const SpinOperators spin = build_spin_ops(fock);
  return configuration_embedding(fock, to).adjoint() * spin.sminus * configuration_embedding(fock, from);
}

/// Every entry of S⁻ (M -> M−1) in {0, +1}, each column holding one +1 per up spin.
inline bool spin_lowering_positivity(int sites, Magnetization m) {
  if (m.twice() - 2 < -(sites - 1)) throw ValidationError("no sector below M = " + m.str());
  const SectorBasis from = enumerate_sector(sites, m);
  const SparseOperator s = fock_sector_lowering(sites, m);
  const SpMat& mat = s.matrix();
  for (int col = 0; col < mat.outerSize(); ++col) {
    int ones = 0;
    for (SpMat::InnerIterator it(mat, col); it; ++it) {
      if (it.value() != cplx(1.0, 0.0)) return false;
      ++ones;
    }
    if (ones != from[static_cast<std::size_t>(col)].n_up()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Position-grid representation of the Lang-Firsov Holstein Hamiltonian
// ---------------------------------------------------------------------------

struct GridSpec {
  int points = 64;       // per relevant phonon coordinate
  double spacing = 0.125;
};

struct QgridResult {
  PositivityCertificate certificate;
  double ground_energy = 0.0;  // Lang-Firsov frame, dropped term not included
  double dropped_constant = 0.0;
  int relevant_modes = 0;
  std::size_t dimension = 0;
  std::vector<std::vector<int>> shifts;  // per ordered pair (x<y first), grid steps per relevant mode
};

namespace detail {

/// Discrete ½(p² + ω²q²) − ω/2 with Dirichlet ends.
inline Eigen::MatrixXd grid_oscillator(int points, double h, double omega) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(points, points);
  for (int j = 0; j < points; ++j) {
    const double q = (j - 0.5 * (points - 1)) * h;
    k(j, j) = 1.0 / (h * h) + 0.5 * omega * omega * q * q - 0.5 * omega;
    if (j + 1 < points) k(j, j + 1) = k(j + 1, j) = -0.5 / (h * h);
  }
  return k;
}

/// (S f)(j) = f(j − s), zero fill.
inline Eigen::MatrixXd grid_shift(int points, int s) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(points, points);
  for (int j = 0; j < points; ++j) {
    if (j - s >= 0 && j - s < points) m(j, j - s) = 1.0;
  }
  return m;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

}  // namespace detail

/// H'_∞ on (configurations ⊗ grid): hopping −t_xy times exact grid shifts by the
/// Lang-Firsov displacement, Ũ_eff on configurations, and a discrete oscillator
/// per relevant coordinate. Coordinates are rotated onto an orthonormal basis of
/// the span of the displacement vectors; displacements must be commensurate.
inline QgridResult qgrid_holstein_certify(const LatticeModel& model, Magnetization m, const GridSpec& grid) {
  const PhononParams& ph = detail::require_phonon(model);
  const int n = model.sites();
  if (n > 3) throw BudgetError("position grid supports at most 3 sites");
  if (grid.points < 2 || !(grid.spacing > 0.0)) throw ValidationError("grid needs >= 2 points and spacing > 0");

  struct Pair {
    int x;
    int y;
    Eigen::VectorXd d;
  };
  std::vector<Pair> pairs;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      if (model.t(x, y) == 0.0) continue;
      const Eigen::VectorXd d =
          std::sqrt(2.0) * std::pow(ph.omega, -1.5) * (ph.coupling.row(x) - ph.coupling.row(y)).transpose();
      pairs.push_back({x, y, d});
    }
  }
  // Gram-Schmidt in canonical pair order.
  std::vector<Eigen::VectorXd> basis;
  for (const auto& p : pairs) {
    Eigen::VectorXd r = p.d;
    for (const auto& e : basis) r -= e.dot(r) * e;
    if (r.norm() > 1e-12 * std::max(1.0, p.d.norm())) basis.push_back(r.normalized());
  }
  const int modes = static_cast<int>(basis.size());
  if (modes > 2) throw BudgetError("position grid supports at most 2 relevant phonon coordinates");

  QgridResult out;
  out.relevant_modes = modes;
  std::vector<std::vector<int>> steps(static_cast<std::size_t>(n * n));
  for (const auto& p : pairs) {
    std::vector<int> s;
    for (const auto& e : basis) {
      const double c = e.dot(p.d) / grid.spacing;
      const double r = std::round(c);
      if (std::abs(c - r) > 1e-9) {
        throw ValidationError("incommensurate displacement " + std::to_string(e.dot(p.d)) + " for spacing " +
                              std::to_string(grid.spacing));
      }
      s.push_back(static_cast<int>(r));
    }
    out.shifts.push_back(s);
    steps[static_cast<std::size_t>(p.x * n + p.y)] = s;
    std::vector<int> neg;
    for (int v : s) neg.push_back(-v);
    steps[static_cast<std::size_t>(p.y * n + p.x)] = neg;
  }

  std::size_t gdim = 1;
  for (int k = 0; k < modes; ++k) gdim *= static_cast<std::size_t>(grid.points);
  const SectorBasis sector = enumerate_sector(model, m);
  check_budget(sector.size() * gdim, "position grid");

  // Oscillator on the grid space.
  const Eigen::MatrixXd osc1 = detail::grid_oscillator(grid.points, grid.spacing, ph.omega);
  const Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(grid.points, grid.points);
  Eigen::MatrixXd osc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gdim), static_cast<Eigen::Index>(gdim));
  if (modes == 1) osc = osc1;
  if (modes == 2) osc = detail::kron(osc1, id1) + detail::kron(id1, osc1);

  auto shift_op = [&](const std::vector<int>& s) {
    Eigen::MatrixXd out_m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(gdim), static_cast<Eigen::Index>(gdim));
    if (modes == 1) out_m = detail::grid_shift(grid.points, s[0]);
    if (modes == 2) out_m = detail::kron(detail::grid_shift(grid.points, s[0]), detail::grid_shift(grid.points, s[1]));
    return out_m;
  };

  const Eigen::MatrixXd ueff = effective_coulomb(model);
  std::vector<Triplet> t;
  auto add_block = [&](std::size_t r, std::size_t c, const Eigen::MatrixXd& b, double scale) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        if (b(i, j) != 0.0) t.emplace_back(r * gdim + static_cast<std::size_t>(i), c * gdim + static_cast<std::size_t>(j), scale * b(i, j));
      }
    }
  };
  for (std::size_t i = 0; i < sector.size(); ++i) {
    const HoleSpinConfig& c = sector[i];
    double diag = detail::offsite_energy(ueff, c);
    for (int z = 0; z < n; ++z) {
      if (z != c.hole) diag += model.t(z, z);
    }
    add_block(i, i, osc + diag * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(gdim), static_cast<Eigen::Index>(gdim)), 1.0);
    for (int y = 0; y < n; ++y) {
      if (y == c.hole || model.t(c.hole, y) == 0.0) continue;
      const std::size_t j = *sector.find(*apply_move(c, c.hole, y));
      add_block(j, i, shift_op(steps[static_cast<std::size_t>(c.hole * n + y)]), -model.t(c.hole, y));
    }
  }
  const auto dim = static_cast<Eigen::Index>(sector.size() * gdim);
  const SparseOperator h = SparseOperator::from_triplets(dim, dim, t, true);
  out.dimension = sector.size() * gdim;
  out.certificate = pf_certificate(h, "configuration x position grid M=" + m.str());
  out.ground_energy = out.certificate.ground_energy;
  const Eigen::MatrixXd g2 = ph.coupling * ph.coupling;
  out.dropped_constant = -(g2.trace() - g2(sector[0].hole, sector[0].hole)) / ph.omega;
  return out;
}

}  // namespace nagaoka
