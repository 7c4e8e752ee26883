#pragma once

// Eigensolvers, total-spin resolution of sector ground states, operator norms
// and the large-U resolvent study.

#include <Eigen/Dense>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nagaoka/core.hpp"
#include "nagaoka/hamiltonian.hpp"
#include "nagaoka/manybody.hpp"
#include "nagaoka/sector.hpp"
#include "nagaoka/sparse.hpp"

namespace nagaoka {

inline constexpr std::size_t kDenseLimit = 2048;
inline constexpr double kResidualTol = 1e-10;   // ‖Hv − λv‖ ≤ tol·(1+|λ|)
inline constexpr double kClusterTol = 1e-8;     // degeneracy: |E − E0| ≤ tol·(1+|E0|)
inline constexpr double kSpinTol = 1e-6;        // |S(S+1) − ⟨S²⟩| after rounding
inline constexpr std::uint64_t kSolverSeed = 0x6e61676f6b61ULL;

struct EigenResult {
  Eigen::VectorXd values;  // ascending
  DenseMat vectors;        // orthonormal columns
  double max_residual = 0.0;  // max of ‖Hv − λv‖ / (1+|λ|)
  bool dense = true;
  int matvecs = 0;
};

inline double relative_residual(const SpMat& h, const DenseVec& v, double lambda) {
  return (h * v - lambda * v).norm() / (1.0 + std::abs(lambda));
}

namespace detail {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Vec<Scalar> random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      v[i] = dist(rng);
    } else {
      const double re = dist(rng);
      v[i] = cplx(re, dist(rng));
    }
  }
  return v;
}

/// Two passes of classical Gram-Schmidt against the first `cols` columns of Q.
template <typename Scalar>
void orthogonalize(Vec<Scalar>& w, const Mat<Scalar>& q, Eigen::Index cols) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Vec<Scalar> c = q.leftCols(cols).adjoint() * w;
    w -= q.leftCols(cols) * c;
  }
}

/// Lanczos with full reorthogonalization and explicit restarts. Eigenpairs are
/// locked one at a time (lowest first), each pass working in the orthogonal
/// complement of the locked vectors, so degenerate copies are found in turn.
template <typename Scalar>
EigenResult lanczos(const Eigen::SparseMatrix<Scalar>& h, int k) {
  const Eigen::Index n = h.rows();
  const int krylov = static_cast<int>(std::min<Eigen::Index>(n, 80));
  constexpr int kMaxRestarts = 2000;
  std::mt19937_64 rng(kSolverSeed);
  Mat<Scalar> locked(n, k);
  std::vector<double> locked_values;
  int matvecs = 0;

  double scale = 0.0;
  for (int c = 0; c < h.outerSize(); ++c) {
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(h, c); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  scale = std::max(scale, 1.0);

  while (static_cast<int>(locked_values.size()) < k) {
    const auto nl = static_cast<Eigen::Index>(locked_values.size());
    Vec<Scalar> start = random_vector<Scalar>(n, rng);
    double last_residual = INFINITY;
    bool done = false;
    for (int restart = 0; restart < kMaxRestarts && !done; ++restart) {
      orthogonalize<Scalar>(start, locked, nl);
      const double sn = start.norm();
      if (sn == 0.0) throw NumericalError("Lanczos: start vector lies in the locked subspace");
      const int m = static_cast<int>(std::min<Eigen::Index>(krylov, n - nl));
      Mat<Scalar> q(n, m);
      std::vector<double> alpha;
      std::vector<double> beta;
      q.col(0) = start / sn;
      int steps = 0;
      for (int j = 0; j < m; ++j) {
        Vec<Scalar> w = h * q.col(j);
        ++matvecs;
        alpha.push_back(std::real(q.col(j).dot(w)));
        orthogonalize<Scalar>(w, locked, nl);
        orthogonalize<Scalar>(w, q, j + 1);
        steps = j + 1;
        const double b = w.norm();
        if (j + 1 == m || b <= 1e-14 * scale) break;
        beta.push_back(b);
        q.col(j + 1) = w / b;
      }
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
      for (int j = 0; j < steps; ++j) {
        t(j, j) = alpha[static_cast<std::size_t>(j)];
        if (j + 1 < steps) t(j, j + 1) = t(j + 1, j) = beta[static_cast<std::size_t>(j)];
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> te(t);
      Vec<Scalar> u = q.leftCols(steps) * te.eigenvectors().col(0).template cast<Scalar>();
      orthogonalize<Scalar>(u, locked, nl);
      u.normalize();
      const Vec<Scalar> hu = h * u;
      ++matvecs;
      const double rayleigh = std::real(u.dot(hu));
      last_residual = (hu - rayleigh * u).norm() / (1.0 + std::abs(rayleigh));
      // Lock with margin so the final Rayleigh-Ritz stays inside tolerance.
      if (last_residual <= 0.1 * kResidualTol) {
        locked.col(nl) = u;
        locked_values.push_back(rayleigh);
        done = true;
      } else {
        start = u;
      }
    }
    if (!done) {
      throw NumericalError("Lanczos did not converge: eigenpair " + std::to_string(locked_values.size()) +
                           " residual " + std::to_string(last_residual));
    }
  }

  // Final Rayleigh-Ritz over the locked block.
  const Mat<Scalar> hy = h * locked;
  matvecs += k;
  Mat<Scalar> g = locked.adjoint() * hy;
  g = 0.5 * (g + g.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<Mat<Scalar>> ge(g);
  EigenResult out;
  out.dense = false;
  out.values = ge.eigenvalues();
  const Mat<Scalar> y = locked * ge.eigenvectors();
  out.vectors = y.template cast<cplx>();
  const Mat<Scalar> r = hy * ge.eigenvectors() - y * ge.eigenvalues().asDiagonal();
  for (int i = 0; i < k; ++i) {
    out.max_residual = std::max(out.max_residual, r.col(i).norm() / (1.0 + std::abs(out.values[i])));
  }
  out.matvecs = matvecs;
  return out;
}

}  // namespace detail

/// k lowest eigenpairs of a Hermitian operator: dense solver up to kDenseLimit,
/// Lanczos above. Real arithmetic is used whenever every entry is real.
inline EigenResult eig_lowest(const SparseOperator& h, int k, std::size_t dense_limit = kDenseLimit) {
  if (!h.hermitian()) throw ValidationError("eig_lowest needs a Hermitian operator");
  const auto n = static_cast<int>(h.dimension());
  if (k < 1 || k > n) throw ValidationError("eig_lowest: requested " + std::to_string(k) + " of " + std::to_string(n));
  const bool real = h.is_real();
  EigenResult out;
  if (static_cast<std::size_t>(n) <= dense_limit) {
    if (real) {
      const Eigen::MatrixXd d = h.dense().real();
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
      if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
      out.values = es.eigenvalues().head(k);
      out.vectors = es.eigenvectors().leftCols(k).cast<cplx>();
    } else {
      const Eigen::SelfAdjointEigenSolver<DenseMat> es(h.dense());
      if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
      out.values = es.eigenvalues().head(k);
      out.vectors = es.eigenvectors().leftCols(k);
    }
    out.dense = true;
    for (int i = 0; i < k; ++i) {
      out.max_residual = std::max(out.max_residual, relative_residual(h.matrix(), out.vectors.col(i), out.values[i]));
    }
  } else if (real) {
    const Eigen::SparseMatrix<double> hr = h.matrix().real();
    out = detail::lanczos<double>(hr, k);
  } else {
    out = detail::lanczos<cplx>(h.matrix(), k);
  }
  if (out.max_residual > kResidualTol) {
    throw NumericalError("eigenpair residual " + std::to_string(out.max_residual) + " above tolerance");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Total spin in a sector
// ---------------------------------------------------------------------------

/// S^- between configuration sectors, extended by the identity on bosons.
inline SparseOperator sector_lowering(const SectorBasis& from, const SectorBasis& to, std::size_t boson_dim) {
  std::vector<Triplet> t;
  for (const auto& e : lowering_entries(from, to)) {
    for (std::size_t k = 0; k < boson_dim; ++k) t.emplace_back(e.row * boson_dim + k, e.col * boson_dim + k, 1.0);
  }
  return SparseOperator::from_triplets(static_cast<Eigen::Index>(to.size() * boson_dim),
                                       static_cast<Eigen::Index>(from.size() * boson_dim), t, false);
}

/// Matrix of S²_tot restricted to span(vectors) for states in sector M:
/// ⟨u|S²|v⟩ = M²⟨u|v⟩ + ½⟨S⁻u|S⁻v⟩ + ½⟨S⁺u|S⁺v⟩.
class SectorSpin {
 public:
  SectorSpin(const SectorBasis& basis, std::size_t boson_dim) : m_(basis.magnetization()) {
    const int n = basis.sites();
    const int t = m_.twice();
    if (t - 2 >= -(n - 1)) lower_ = sector_lowering(basis, enumerate_sector(n, Magnetization::from_twice(t - 2)), boson_dim);
    if (t + 2 <= n - 1) {
      raise_ = sector_lowering(enumerate_sector(n, Magnetization::from_twice(t + 2)), basis, boson_dim).adjoint();
    }
  }

  [[nodiscard]] DenseMat project(const DenseMat& v) const {
    DenseMat g = (m_.value() * m_.value()) * (v.adjoint() * v);
    if (lower_) {
      const DenseMat a = lower_->matrix() * v;
      g += 0.5 * (a.adjoint() * a);
    }
    if (raise_) {
      const DenseMat a = raise_->matrix() * v;
      g += 0.5 * (a.adjoint() * a);
    }
    return 0.5 * (g + g.adjoint());
  }

 private:
  Magnetization m_;
  std::optional<SparseOperator> lower_;
  std::optional<SparseOperator> raise_;
};

/// S with S(S+1) = s2, rounded to a half-integer (stored as 2S).
inline int resolve_twice_spin(double s2) {
  const double s = 0.5 * (-1.0 + std::sqrt(std::max(0.0, 1.0 + 4.0 * s2)));
  const int twice = static_cast<int>(std::lround(2.0 * s));
  const double exact = 0.5 * twice * (0.5 * twice + 1.0);
  if (std::abs(exact - s2) > kSpinTol) {
    throw NumericalError("ambiguous total spin: <S^2> = " + std::to_string(s2));
  }
  return twice;
}

struct SpectralReport {
  Magnetization m;
  Provenance provenance = Provenance::direct_formula;
  std::size_t dimension = 0;
  std::size_t boson_dim = 1;
  int cutoff = 0;
  double ground_energy = 0.0;
  int degeneracy = 1;
  std::optional<double> gap;       // E1 − E0 above the cluster; absent if the sector is exhausted
  double stot2_expectation = 0.0;  // of the highest-spin state in the ground cluster
  int twice_resolved_s = 0;
  std::vector<int> twice_cluster_spins;  // 2S of every cluster member, descending
  double dropped_constant = 0.0;         // Lang-Firsov term to add back for direct-frame energies
  double max_residual = 0.0;
  std::vector<double> lowest;  // computed eigenvalues

  [[nodiscard]] double resolved_s() const { return 0.5 * twice_resolved_s; }
};

inline SpectralReport ground_report(const SectorHamiltonian& h) {
  const int n = static_cast<int>(h.dimension());
  int k = std::min(n, 3);
  EigenResult eig;
  int cluster = 1;
  for (;;) {
    eig = eig_lowest(h.matrix, k);
    const double e0 = eig.values[0];
    cluster = 1;
    while (cluster < k && std::abs(eig.values[cluster] - e0) <= kClusterTol * (1.0 + std::abs(e0))) ++cluster;
    if (cluster < k || k == n) break;
    k = std::min(n, 2 * k);
  }
  SpectralReport r;
  r.m = h.magnetization();
  r.provenance = h.provenance;
  r.dimension = static_cast<std::size_t>(n);
  r.boson_dim = h.boson_dim;
  r.cutoff = h.cutoff;
  r.ground_energy = eig.values[0];
  r.degeneracy = cluster;
  if (cluster < n) r.gap = eig.values[cluster] - eig.values[0];
  r.max_residual = eig.max_residual;
  r.lowest.assign(eig.values.data(), eig.values.data() + eig.values.size());
  if (h.provenance == Provenance::lang_firsov && !h.dropped_restored) r.dropped_constant = h.dropped_constant();

  const SectorSpin spin(h.basis, h.boson_dim);
  const Eigen::SelfAdjointEigenSolver<DenseMat> s2(spin.project(eig.vectors.leftCols(cluster)));
  for (int i = cluster - 1; i >= 0; --i) r.twice_cluster_spins.push_back(resolve_twice_spin(s2.eigenvalues()[i]));
  r.stot2_expectation = s2.eigenvalues()[cluster - 1];
  r.twice_resolved_s = r.twice_cluster_spins.front();
  return r;
}

/// Same report for a finite-U Fock block; S² comes from the Fock-space operator.
inline SpectralReport ground_report(const FockSectorHamiltonian& h, const LatticeModel& model) {
  const int n = static_cast<int>(h.dimension());
  int k = std::min(n, 3);
  EigenResult eig;
  int cluster = 1;
  for (;;) {
    eig = eig_lowest(h.matrix, k);
    const double e0 = eig.values[0];
    cluster = 1;
    while (cluster < k && std::abs(eig.values[cluster] - e0) <= kClusterTol * (1.0 + std::abs(e0))) ++cluster;
    if (cluster < k || k == n) break;
    k = std::min(n, 2 * k);
  }
  SpectralReport r;
  r.m = h.m;
  r.provenance = Provenance::hubbard_fock;
  r.dimension = static_cast<std::size_t>(n);
  r.boson_dim = h.boson_dim;
  r.cutoff = h.cutoff;
  r.ground_energy = eig.values[0];
  r.degeneracy = cluster;
  if (cluster < n) r.gap = eig.values[cluster] - eig.values[0];
  r.max_residual = eig.max_residual;
  r.lowest.assign(eig.values.data(), eig.values.data() + eig.values.size());

  const FockBasis fock(model.sites(), model.electrons());
  const SparseOperator s2 = tensor(build_spin_ops(fock).stot2, SparseOperator::identity(static_cast<Eigen::Index>(h.boson_dim)));
  DenseMat full = DenseMat::Zero(s2.dimension(), cluster);
  Eigen::Index row = 0;
  for (std::size_t f : h.states) {
    for (std::size_t b = 0; b < h.boson_dim; ++b, ++row) {
      full.row(static_cast<Eigen::Index>(f * h.boson_dim + b)) = eig.vectors.row(row).head(cluster);
    }
  }
  DenseMat g = full.adjoint() * (s2.matrix() * full);
  g = 0.5 * (g + g.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<DenseMat> se(g);
  for (int i = cluster - 1; i >= 0; --i) r.twice_cluster_spins.push_back(resolve_twice_spin(se.eigenvalues()[i]));
  r.stot2_expectation = se.eigenvalues()[cluster - 1];
  r.twice_resolved_s = r.twice_cluster_spins.front();
  return r;
}

/// Ground multiplet assembled across magnetization sectors.
struct MultipletSummary {
  double ground_energy = 0.0;  // E†, lowest over sectors
  double spread = 0.0;         // max − min sector ground energy among sectors in the multiplet
  int size = 0;                // Σ degeneracies at E†
  int sectors_at_ground = 0;
  std::optional<double> gap;   // distance from E† to the next level in any sector
  int twice_s = 0;             // largest resolved spin at E†
  bool spins_agree = true;     // every sector at E† resolves the same S
};

inline MultipletSummary summarize_multiplet(const std::vector<SpectralReport>& reports) {
  if (reports.empty()) throw ValidationError("no sector reports");
  MultipletSummary s;
  s.ground_energy = INFINITY;
  for (const auto& r : reports) s.ground_energy = std::min(s.ground_energy, r.ground_energy);
  const double tol = kClusterTol * (1.0 + std::abs(s.ground_energy));
  double hi = s.ground_energy;
  std::optional<int> spin;
  for (const auto& r : reports) {
    const double above = r.ground_energy - s.ground_energy;
    if (above <= tol) {
      s.size += r.degeneracy;
      ++s.sectors_at_ground;
      hi = std::max(hi, r.ground_energy);
      if (spin && *spin != r.twice_resolved_s) s.spins_agree = false;
      spin = spin ? std::max(*spin, r.twice_resolved_s) : r.twice_resolved_s;
      if (r.gap) s.gap = s.gap ? std::min(*s.gap, *r.gap + above) : *r.gap + above;
    } else {
      s.gap = s.gap ? std::min(*s.gap, above) : above;
    }
  }
  s.spread = hi - s.ground_energy;
  s.twice_s = spin.value_or(0);
  return s;
}

// ---------------------------------------------------------------------------
// Operator norm and resolvents
// ---------------------------------------------------------------------------

/// Largest singular value of a dense matrix.
inline double operator_norm(const DenseMat& a) {
  if (a.size() == 0) return 0.0;
  // Largest eigenvalue of A†A; absolute accuracy ~ eps·‖A‖², which is all a norm needs.
  const DenseMat b = a.adjoint() * a;
  const Eigen::SelfAdjointEigenSolver<DenseMat> es(b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("operator_norm: eigensolver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double operator_norm(const SparseOperator& a) { return operator_norm(a.dense()); }

/// Gutzwiller projector on the N-electron space, extended by I on phonons.
inline SparseOperator full_gutzwiller(const LatticeModel& model) {
  const FockBasis fock(model.sites(), model.electrons());
  SparseOperator p = build_gutzwiller(fock);
  if (model.phonon()) {
    const BosonBasis b(model.sites(), model.phonon()->cutoff);
    p = tensor(p, SparseOperator::identity(static_cast<Eigen::Index>(b.size())));
  }
  return p;
}

/// P H^{U=0} P on the full N-electron (⊗ phonon) space.
inline SparseOperator projected_infinite_u(const LatticeModel& model) {
  const LatticeModel m0 = model.with([](ModelSpec& s) { s.onsite_u = OnsiteU::finite(0.0); });
  const SparseOperator p = full_gutzwiller(model);
  return (p * assemble_hubbard_full(m0, 0.0) * p).as_hermitian();
}

/// 2i(1 + ‖H_∞‖).
inline cplx default_z(const LatticeModel& model) {
  return cplx(0.0, 2.0 * (1.0 + operator_norm(projected_infinite_u(model))));
}

/// Resolvent data shared by a U sweep: (H_∞ − z)⁻¹ P is U-independent.
class ResolventStudy {
 public:
  ResolventStudy(const LatticeModel& model, cplx z) : model_(model), z_(z) {
    if (z.imag() == 0.0) throw ValidationError("resolvent needs Im z != 0");
    const SparseOperator p = full_gutzwiller(model);
    check_budget(static_cast<std::size_t>(p.dimension()), "resolvent study");
    const DenseMat pd = p.dense();
    const LatticeModel m0 = model.with([](ModelSpec& s) { s.onsite_u = OnsiteU::finite(0.0); });
    const DenseMat hinf = pd * assemble_hubbard_full(m0, 0.0).dense() * pd;
    const auto n = hinf.rows();
    h_inf_norm_ = operator_norm(hinf);
    r_inf_p_ = pd * (hinf - z * DenseMat::Identity(n, n)).partialPivLu().solve(pd);
  }

  [[nodiscard]] cplx z() const { return z_; }
  [[nodiscard]] double h_inf_norm() const { return h_inf_norm_; }
  [[nodiscard]] Eigen::Index dimension() const { return r_inf_p_.rows(); }

  /// Δ(U) = ‖(H_U − z)⁻¹ − (H_∞ − z)⁻¹ P‖.
  [[nodiscard]] double gap(double u) const {
    if (!(u >= 0.0) || !std::isfinite(u)) throw ValidationError("U must be finite and >= 0");
    const LatticeModel mu = model_.with([u](ModelSpec& s) { s.onsite_u = OnsiteU::finite(u); });
    const DenseMat hu = assemble_hubbard_full(mu, u).dense();
    const auto n = hu.rows();
    const DenseMat ru = (hu - z_ * DenseMat::Identity(n, n)).partialPivLu().solve(DenseMat::Identity(n, n));
    return operator_norm(DenseMat(ru - r_inf_p_));
  }

 private:
  LatticeModel model_;
  cplx z_;
  double h_inf_norm_ = 0.0;
  DenseMat r_inf_p_;
};

inline double resolvent_gap(const LatticeModel& model, double u, cplx z) { return ResolventStudy(model, z).gap(u); }

struct EnergySplit {
  double u = 0.0;
  std::size_t dimension = 0;  // dim ran P^⊥
  bool vacuous = false;       // P^⊥ = 0
  double e_h1 = 0.0;          // min spec P^⊥ H P^⊥ on ran P^⊥
  double c = 0.0;             // same at U = 0
  bool bound_ok = true;       // E(H₁) ≥ C + U
};

/// Lowest eigenvalue of H restricted to the doubly-occupied subspace, against C + U.
inline EnergySplit energy_split_bound(const LatticeModel& model, double u) {
  const SparseOperator p = full_gutzwiller(model);
  std::vector<Eigen::Index> perp;
  for (Eigen::Index i = 0; i < p.dimension(); ++i) {
    if (p.coeff(i, i) == cplx(0.0, 0.0)) perp.push_back(i);
  }
  EnergySplit out;
  out.u = u;
  out.dimension = perp.size();
  if (perp.empty()) {
    out.vacuous = true;
    return out;
  }
  auto lowest = [&](double uu) {
    const LatticeModel m = model.with([uu](ModelSpec& s) { s.onsite_u = OnsiteU::finite(uu); });
    const DenseMat h = assemble_hubbard_full(m, uu).dense();
    DenseMat sub(static_cast<Eigen::Index>(perp.size()), static_cast<Eigen::Index>(perp.size()));
    for (std::size_t a = 0; a < perp.size(); ++a) {
      for (std::size_t b = 0; b < perp.size(); ++b) sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = h(perp[a], perp[b]);
    }
    return eig_lowest(SparseOperator::from_dense(sub, true), 1, std::numeric_limits<std::size_t>::max()).values[0];
  };
  out.c = lowest(0.0);
  out.e_h1 = lowest(u);
  out.bound_ok = out.e_h1 - u >= out.c - kResidualTol * (1.0 + std::abs(out.e_h1));
  return out;
}

}  // namespace nagaoka
