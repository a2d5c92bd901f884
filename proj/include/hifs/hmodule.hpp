#pragma once

/**
 * @file hmodule.hpp
 * @brief Points of A_{n+1}^k and k x k matrices over A_{n+1}.
 *
 * An HVector is stored flat: coordinate index i*(n+1) + j holds coefficient
 * j of entry i. The same order is used by realified maps, projections and
 * file output.
 */

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hifs/clifford.hpp"

namespace hifs {

class HVector {
 public:
  HVector(AlgebraKind algebra, std::size_t k)
      : algebra_(algebra), k_(k), flat_(algebra.paravector_dim() * k, 0.0) {
    if (k == 0) throw shape_mismatch("k must be positive");
  }

  HVector(AlgebraKind algebra, std::size_t k, std::vector<double> flat)
      : algebra_(algebra), k_(k), flat_(std::move(flat)) {
    if (k == 0) throw shape_mismatch("k must be positive");
    if (flat_.size() != algebra.paravector_dim() * k)
      throw shape_mismatch("flat coordinate count does not match (n+1)*k");
  }

  explicit HVector(const std::vector<Paravector>& entries)
      : HVector(entries.empty() ? AlgebraKind::real() : entries.front().algebra(),
                entries.size()) {
    for (std::size_t i = 0; i < entries.size(); ++i) set_entry(i, entries[i]);
  }

  const AlgebraKind& algebra() const { return algebra_; }
  std::size_t k() const { return k_; }
  std::size_t dim() const { return flat_.size(); }
  std::span<const double> flat() const { return flat_; }
  std::span<double> flat() { return flat_; }
  double operator[](std::size_t c) const { return flat_[c]; }
  double& operator[](std::size_t c) { return flat_[c]; }

  Paravector entry(std::size_t i) const {
    const std::size_t p = algebra_.paravector_dim();
    return Paravector(algebra_, std::vector<double>(flat_.begin() + i * p, flat_.begin() + (i + 1) * p));
  }

  void set_entry(std::size_t i, const Paravector& value) {
    require_same_algebra(algebra_, value.algebra());
    if (i >= k_) throw shape_mismatch("entry index out of range");
    const std::size_t p = algebra_.paravector_dim();
    for (std::size_t j = 0; j < p; ++j) flat_[i * p + j] = value[j];
  }

  HVector& operator+=(const HVector& o) {
    require_same_shape(o);
    for (std::size_t c = 0; c < flat_.size(); ++c) flat_[c] += o.flat_[c];
    return *this;
  }
  HVector& operator-=(const HVector& o) {
    require_same_shape(o);
    for (std::size_t c = 0; c < flat_.size(); ++c) flat_[c] -= o.flat_[c];
    return *this;
  }

  void require_same_shape(const HVector& o) const {
    require_same_algebra(algebra_, o.algebra_);
    if (k_ != o.k_) throw shape_mismatch("HVector length mismatch");
  }

  bool operator==(const HVector&) const = default;

 private:
  AlgebraKind algebra_;
  std::size_t k_;
  std::vector<double> flat_;
};

inline HVector operator+(HVector a, const HVector& b) { return a += b; }
inline HVector operator-(HVector a, const HVector& b) { return a -= b; }

/// ||xi|| = sqrt(sum |xi_i|^2), the Euclidean norm of the flat coordinates.
inline double hnorm(const HVector& xi) {
  double s = 0;
  for (double c : xi.flat()) s += c * c;
  return std::sqrt(s);
}

inline double metric(const HVector& xi, const HVector& eta) {
  xi.require_same_shape(eta);
  double s = 0;
  for (std::size_t c = 0; c < xi.dim(); ++c) {
    const double d = xi[c] - eta[c];
    s += d * d;
  }
  return std::sqrt(s);
}

/// xi^* eta = sum_i conj(xi_i) eta_i, evaluated in the full algebra.
inline CliffordNumber adjoint_product(const HVector& xi, const HVector& eta) {
  xi.require_same_shape(eta);
  CliffordNumber acc(xi.algebra());
  for (std::size_t i = 0; i < xi.k(); ++i) acc += mul(conj(xi.entry(i)), eta.entry(i));
  return acc;
}

/// k x k matrix over A_{n+1}, row-major.
class HMatrix {
 public:
  HMatrix(AlgebraKind algebra, std::size_t k)
      : HMatrix(algebra, k, k) {}

  HMatrix(AlgebraKind algebra, std::size_t rows, std::size_t cols)
      : algebra_(algebra), rows_(rows), cols_(cols),
        entries_(rows * cols, Paravector(algebra)) {}

  static HMatrix diagonal(const std::vector<Paravector>& diag) {
    if (diag.empty()) throw shape_mismatch("empty diagonal");
    HMatrix h(diag.front().algebra(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) h.set(i, i, diag[i]);
    return h;
  }

  const AlgebraKind& algebra() const { return algebra_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const Paravector& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, const Paravector& v) {
    require_same_algebra(algebra_, v.algebra());
    entries_.at(i * cols_ + j) = v;
  }

  bool operator==(const HMatrix&) const = default;

 private:
  AlgebraKind algebra_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Paravector> entries_;
};

/// (H^*)_{ij} = conj(H_{ji}).
inline HMatrix adjoint(const HMatrix& h) {
  HMatrix out(h.algebra(), h.cols(), h.rows());
  for (std::size_t i = 0; i < h.cols(); ++i)
    for (std::size_t j = 0; j < h.rows(); ++j) out.set(i, j, conj(h.at(j, i)));
  return out;
}

/// L(xi)_i = sum_j H_ij xi_j, left multiplication in the full algebra.
inline std::vector<CliffordNumber> right_linear(const HMatrix& h, const HVector& xi) {
  require_same_algebra(h.algebra(), xi.algebra());
  if (h.cols() != xi.k()) throw shape_mismatch("matrix columns do not match vector length");
  std::vector<CliffordNumber> out(h.rows(), CliffordNumber(h.algebra()));
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) out[i] += mul(h.at(i, j), xi.entry(j));
  return out;
}

/// pi o L, an endomorphism of A_{n+1}^k.
inline HVector project_linear(const HMatrix& h, const HVector& xi) {
  const auto full = right_linear(h, xi);
  HVector out(h.algebra(), h.rows());
  for (std::size_t i = 0; i < full.size(); ++i) out.set_entry(i, pi_project(full[i]));
  return out;
}

}  // namespace hifs
