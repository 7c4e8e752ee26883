#pragma once

// Dimension-labelled sparse operators. Every Hamiltonian and observable in the
// library is carried as a complex column-major Eigen sparse matrix.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nagaoka/core.hpp"

namespace nagaoka {

using SpMat = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;
using DenseMat = Eigen::MatrixXcd;
using DenseVec = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;

/// Largest |A - A^dagger| entry relative to max(1, max |A|).
inline double hermiticity_defect(const SpMat& a) {
  if (a.rows() != a.cols()) return INFINITY;
  const SpMat diff = a - SpMat(a.adjoint());
  double defect = 0.0;
  double scale = 1.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SpMat::InnerIterator it(diff, k); it; ++it) defect = std::max(defect, std::abs(it.value()));
  }
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  return defect / scale;
}

class SparseOperator {
 public:
  SparseOperator() = default;

  /// Wraps `m`, dropping stored zeros. A Hermitian claim is verified.
  SparseOperator(SpMat m, bool hermitian) : matrix_(std::move(m)), hermitian_(hermitian) {
    matrix_.prune(cplx(0.0, 0.0), 0.0);
    matrix_.makeCompressed();
    if (hermitian_) {
      const double defect = hermiticity_defect(matrix_);
      if (defect > kHermitianTol) {
        throw NumericalError("operator flagged Hermitian has defect " + std::to_string(defect));
      }
    }
  }

  /// Duplicate (row, col) triplets are summed.
  static SparseOperator from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& entries,
                                      bool hermitian) {
    SpMat m(rows, cols);
    m.setFromTriplets(entries.begin(), entries.end());
    return {std::move(m), hermitian};
  }

  static SparseOperator identity(Eigen::Index n) {
    SpMat m(n, n);
    m.setIdentity();
    return {std::move(m), true};
  }

  static SparseOperator from_dense(const DenseMat& d, bool hermitian) { return {d.sparseView(), hermitian}; }

  [[nodiscard]] const SpMat& matrix() const { return matrix_; }
  [[nodiscard]] bool hermitian() const { return hermitian_; }
  [[nodiscard]] Eigen::Index rows() const { return matrix_.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return matrix_.cols(); }
  [[nodiscard]] Eigen::Index dimension() const { return matrix_.rows(); }
  [[nodiscard]] Eigen::Index nonzeros() const { return matrix_.nonZeros(); }
  [[nodiscard]] DenseMat dense() const { return DenseMat(matrix_); }

  /// True when every stored entry has zero imaginary part.
  [[nodiscard]] bool is_real(double tol = 0.0) const {
    for (int k = 0; k < matrix_.outerSize(); ++k) {
      for (SpMat::InnerIterator it(matrix_, k); it; ++it) {
        if (std::abs(it.value().imag()) > tol) return false;
      }
    }
    return true;
  }

  [[nodiscard]] cplx coeff(Eigen::Index r, Eigen::Index c) const { return matrix_.coeff(r, c); }

  [[nodiscard]] DenseVec apply(const DenseVec& v) const { return matrix_ * v; }

  [[nodiscard]] SparseOperator adjoint() const { return {SpMat(matrix_.adjoint()), hermitian_}; }

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    return {SpMat(a.matrix_ + b.matrix_), a.hermitian_ && b.hermitian_};
  }
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
    return {SpMat(a.matrix_ - b.matrix_), a.hermitian_ && b.hermitian_};
  }
  /// Products are not assumed Hermitian.
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    return {SpMat(a.matrix_ * b.matrix_), false};
  }
  friend SparseOperator operator*(double s, const SparseOperator& a) { return {SpMat(s * a.matrix_), a.hermitian_}; }

  /// Re-checks and sets the Hermitian flag (e.g. after a product known to be Hermitian).
  [[nodiscard]] SparseOperator as_hermitian() const { return {matrix_, true}; }

 private:
  SpMat matrix_;
  bool hermitian_ = false;
};

/// Max-entry distance; shapes must agree.
inline double max_abs_diff(const SparseOperator& a, const SparseOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  const SpMat d = a.matrix() - b.matrix();
  double out = 0.0;
  for (int k = 0; k < d.outerSize(); ++k) {
    for (SpMat::InnerIterator it(d, k); it; ++it) out = std::max(out, std::abs(it.value()));
  }
  return out;
}

/// Kronecker product, first factor major (electron ⊗ boson order).
inline SparseOperator tensor(const SparseOperator& a, const SparseOperator& b) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  check_budget(std::max(rows, cols), "tensor product");
  SpMat out = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return {std::move(out), a.hermitian() && b.hermitian()};
}

/// Diagonal operator from real entries.
inline SparseOperator diagonal(const Eigen::VectorXd& d) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] != 0.0) t.emplace_back(i, i, cplx(d[i], 0.0));
  }
  return SparseOperator::from_triplets(d.size(), d.size(), t, true);
}

}  // namespace nagaoka
