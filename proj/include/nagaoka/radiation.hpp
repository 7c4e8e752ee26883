#pragma once

// Radiation-coupled single-hole Hamiltonian: photon modes in the box
// V = [-L/2, L/2]^3, straight-line Peierls kernels, and quantized Peierls
// phases e^{iφ_xy} on a truncated photon Fock space.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nagaoka/core.hpp"
#include "nagaoka/hamiltonian.hpp"
#include "nagaoka/manybody.hpp"
#include "nagaoka/model.hpp"
#include "nagaoka/sector.hpp"
#include "nagaoka/sparse.hpp"

namespace nagaoka {

struct PhotonMode {
  Eigen::Vector3i n;  // k = 2π n / L
  int lambda = 1;     // polarization 1 or 2
  Eigen::Vector3d k;
  double omega = 0.0;
  Eigen::Vector3d eps;
};

/// ε(k,1) = (k2, −k1, 0)/√(k1²+k2²), ε(k,2) = k̂ × ε(k,1); both vanish when k1 = k2 = 0.
inline Eigen::Vector3d polarization(const Eigen::Vector3d& k, int lambda) {
  const double perp = std::hypot(k[0], k[1]);
  if (perp == 0.0) return Eigen::Vector3d::Zero();
  const Eigen::Vector3d e1(k[1] / perp, -k[0] / perp, 0.0);
  if (lambda == 1) return e1;
  return k.normalized().cross(e1);
}

/// {(k,λ): k ∈ (2π/L) Z³, 0 < |k| ≤ κ} ∪ {(0,λ)}, lexicographic in (n, λ).
inline std::vector<PhotonMode> photon_modes(const RadiationParams& r) {
  const double unit = 2.0 * std::numbers::pi / r.box_length;
  const int nmax = static_cast<int>(std::floor(r.uv_cutoff / unit)) + 1;
  std::vector<PhotonMode> out;
  for (int a = -nmax; a <= nmax; ++a) {
    for (int b = -nmax; b <= nmax; ++b) {
      for (int c = -nmax; c <= nmax; ++c) {
        const Eigen::Vector3i n(a, b, c);
        const Eigen::Vector3d k = unit * n.cast<double>();
        const bool zero = (a == 0 && b == 0 && c == 0);
        if (!zero && k.norm() > r.uv_cutoff) continue;
        for (int lambda : {1, 2}) out.push_back({n, lambda, k, zero ? r.mass : k.norm(), polarization(k, lambda)});
      }
    }
  }
  return out;
}

/// F_xy(k) = (e^{ik·y} − e^{ik·x}) / (i k·(y−x)), limit e^{ik·x} when k·(y−x) = 0.
inline cplx peierls_kernel(const Eigen::Vector3d& x, const Eigen::Vector3d& y, const Eigen::Vector3d& k) {
  const double s = k.dot(y - x);
  const cplx ex = std::exp(cplx(0.0, k.dot(x)));
  if (s == 0.0) return ex;
  // (e^{is} − 1)/(is) written to stay accurate for small s.
  const cplx ratio = std::abs(s) < 1e-4 ? cplx(1.0 - s * s / 6.0, s / 2.0 - s * s * s / 24.0)
                                        : (std::exp(cplx(0.0, s)) - 1.0) / cplx(0.0, s);
  return ex * ratio;
}

/// F^N_xy(k) = Σ_{j=1}^{N+1} (1/N) e^{ik·(x + (j−1)(y−x)/N)}.
inline cplx riemann_kernel(const Eigen::Vector3d& x, const Eigen::Vector3d& y, const Eigen::Vector3d& k, int n) {
  if (n < 1) throw ValidationError("Riemann subdivision count must be >= 1");
  cplx sum = 0.0;
  for (int j = 1; j <= n + 1; ++j) {
    sum += std::exp(cplx(0.0, k.dot(x + (static_cast<double>(j - 1) / n) * (y - x))));
  }
  return sum / static_cast<double>(n);
}

/// ℓ² distance between F^N and F over a mode set.
inline double kernel_error(const Eigen::Vector3d& x, const Eigen::Vector3d& y, const std::vector<PhotonMode>& modes,
                           int n) {
  double s = 0.0;
  for (const auto& m : modes) s += std::norm(riemann_kernel(x, y, m.k, n) - peierls_kernel(x, y, m.k));
  return std::sqrt(s);
}

/// Coefficient c of the field φ_xy = Σ (c a + c̄ a†) for one mode, given a kernel value.
inline cplx field_coefficient(const RadiationParams& r, const PhotonMode& m, const Eigen::Vector3d& x,
                              const Eigen::Vector3d& y, cplx kernel) {
  const double volume = std::pow(r.box_length, 3);
  return kernel * (m.eps.dot(y - x) / std::sqrt(volume * 2.0 * m.omega));
}

/// Modes that couple to at least one bond with t_xy ≠ 0.
inline std::vector<bool> coupled_modes(const LatticeModel& model, const std::vector<PhotonMode>& modes) {
  const auto& r = *model.radiation();
  std::vector<bool> out(modes.size(), false);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (int x = 0; x < model.sites() && !out[i]; ++x) {
      for (int y = x + 1; y < model.sites(); ++y) {
        if (model.t(x, y) != 0.0 && modes[i].eps.dot(r.positions[y] - r.positions[x]) != 0.0) {
          out[i] = true;
          break;
        }
      }
    }
  }
  return out;
}

namespace detail {

/// Single-mode Hermitian generator c a + c̄ a† on levels 0..cutoff.
inline DenseMat mode_field(cplx c, int cutoff) {
  const Eigen::MatrixXd a = single_mode_annihilator(cutoff);
  return c * a.cast<cplx>() + std::conj(c) * a.transpose().cast<cplx>();
}

inline DenseMat hermitian_exp_i(const DenseMat& h) {
  const Eigen::SelfAdjointEigenSolver<DenseMat> eig(h);
  const Eigen::VectorXcd ph = (cplx(0.0, 1.0) * eig.eigenvalues().cast<cplx>()).array().exp();
  return eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace detail

/// Hermitian field matrix Σ_modes (c a + c̄ a†) on the product photon space,
/// for either the exact kernel (subdivisions = 0) or its Riemann sum.
inline SparseOperator field_operator(const RadiationParams& r, const std::vector<PhotonMode>& modes,
                                     const Eigen::Vector3d& x, const Eigen::Vector3d& y, int cutoff,
                                     int subdivisions = 0) {
  const auto levels = static_cast<Eigen::Index>(cutoff + 1);
  SparseOperator total;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const cplx kern = subdivisions == 0 ? peierls_kernel(x, y, modes[i].k) : riemann_kernel(x, y, modes[i].k, subdivisions);
    std::vector<DenseMat> f(modes.size(), DenseMat::Identity(levels, levels));
    f[i] = detail::mode_field(field_coefficient(r, modes[i], x, y, kern), cutoff);
    const SparseOperator term = kron_modes(f);
    total = (i == 0) ? term : total + term;
  }
  if (modes.empty()) return SparseOperator::identity(1) - SparseOperator::identity(1);
  return total.as_hermitian();
}

/// e^{iφ_xy} as the Kronecker product of exact single-mode exponentials.
inline SparseOperator peierls_factor(const RadiationParams& r, const std::vector<PhotonMode>& modes,
                                     const Eigen::Vector3d& x, const Eigen::Vector3d& y, int cutoff) {
  std::vector<DenseMat> f;
  for (const auto& m : modes) {
    f.push_back(detail::hermitian_exp_i(detail::mode_field(field_coefficient(r, m, x, y, peierls_kernel(x, y, m.k)), cutoff)));
  }
  return kron_modes(f);
}

/// 𝒜_N for the bond (x, y): the Riemann-sum field on the same truncated space.
inline SparseOperator riemann_peierls(const RadiationParams& r, const std::vector<PhotonMode>& modes,
                                      const Eigen::Vector3d& x, const Eigen::Vector3d& y, int subdivisions,
                                      int cutoff) {
  if (subdivisions < 1) throw ValidationError("Riemann subdivision count must be >= 1");
  if (x == y) throw ValidationError("Riemann-sum field needs x != y");
  return field_operator(r, modes, x, y, cutoff, subdivisions);
}

struct RadiationOptions {
  std::optional<int> cutoff;
  bool keep_spectators = false;
};

/// Σ e^{iφ_xy} ⊗ T_xy(σ) + I ⊗ H_f + U_xy. Modes that couple to no bond are
/// exact tensor factors contributing only ω n; they are dropped unless kept.
inline SectorHamiltonian assemble_radiation_sector(const LatticeModel& model, Magnetization m,
                                                   const RadiationOptions& opts = {}) {
  detail::require_infinite_u(model);
  if (!model.radiation()) throw ValidationError("model has no [radiation] block");
  const auto& r = *model.radiation();
  const int cutoff = opts.cutoff.value_or(r.cutoff);
  if (cutoff < 0) throw ValidationError("cutoff must be >= 0");

  const auto all = photon_modes(r);
  const auto coupled = coupled_modes(model, all);
  std::vector<PhotonMode> kept;
  std::vector<double> spectators;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (coupled[i] || opts.keep_spectators) {
      kept.push_back(all[i]);
    } else {
      spectators.push_back(all[i].omega);
    }
  }
  SectorBasis basis = enumerate_sector(model, m);
  const BosonBasis photons(static_cast<int>(kept.size()), cutoff);
  const std::size_t db = photons.size();
  check_budget(basis.size() * db, "radiation sector");
  const int n = model.sites();

  std::vector<std::optional<SparseOperator>> phase(static_cast<std::size_t>(n * n));
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x != y && model.t(x, y) != 0.0) {
        phase[static_cast<std::size_t>(x * n + y)] = peierls_factor(r, kept, r.positions[x], r.positions[y], cutoff);
      }
    }
  }

  Eigen::VectorXd hf(static_cast<Eigen::Index>(db));
  for (std::size_t k = 0; k < db; ++k) {
    const auto occ = photons.occupations(k);
    double e = 0.0;
    for (std::size_t i = 0; i < kept.size(); ++i) e += kept[i].omega * occ[i];
    hf[static_cast<Eigen::Index>(k)] = e;
  }

  std::vector<Triplet> t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const HoleSpinConfig& c = basis[i];
    double diag = detail::offsite_energy(model.offsite_u(), c);
    for (int z = 0; z < n; ++z) {
      if (z != c.hole) diag += model.t(z, z);
    }
    for (std::size_t k = 0; k < db; ++k) {
      const double v = diag + hf[static_cast<Eigen::Index>(k)];
      if (v != 0.0) t.emplace_back(i * db + k, i * db + k, v);
    }
    for (int y = 0; y < n; ++y) {
      if (y == c.hole || model.t(c.hole, y) == 0.0) continue;
      const std::size_t j = *basis.find(*apply_move(c, c.hole, y));
      const SpMat& ph = phase[static_cast<std::size_t>(c.hole * n + y)]->matrix();
      for (int col = 0; col < ph.outerSize(); ++col) {
        for (SpMat::InnerIterator it(ph, col); it; ++it) {
          t.emplace_back(j * db + static_cast<std::size_t>(it.row()), i * db + static_cast<std::size_t>(col),
                         -model.t(c.hole, y) * it.value());
        }
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(basis.size() * db);
  SectorHamiltonian out{std::move(basis), SparseOperator::from_triplets(dim, dim, t, true)};
  out.provenance = Provenance::radiation;
  out.boson_dim = db;
  out.cutoff = cutoff;
  out.spectator_frequencies = std::move(spectators);
  return out;
}

}  // namespace nagaoka
