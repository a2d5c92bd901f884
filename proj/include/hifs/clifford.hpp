#pragma once

/**
 * @file clifford.hpp
 * @brief Dense arithmetic in the Clifford algebra Cl(n) and its paravector
 * subspace A_{n+1} = R + R^n.
 *
 * Three algebra kinds share one value type:
 *   - clifford_pi : Cl(n), coefficients indexed by blade bitmask
 *                   (bit i-1 set <=> e_i is a factor), 2^n entries;
 *   - quaternion  : H with its own product table, coefficients (1, e1, e2, e3);
 *   - real        : R, a single coefficient (n = 0).
 *
 * Paravectors always store (x0, x1, ..., xn).
 */

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "hifs/error.hpp"

namespace hifs {

inline constexpr unsigned max_generators = 8;

struct AlgebraKind {
  enum class Tag { clifford_pi, quaternion, real };

  Tag tag = Tag::real;
  unsigned n = 0;

  static AlgebraKind clifford(unsigned generators) {
    if (generators > max_generators)
      throw precondition_violation("Cl(n) limited to n <= " + std::to_string(max_generators));
    return {Tag::clifford_pi, generators};
  }
  static constexpr AlgebraKind quaternion() { return {Tag::quaternion, 3}; }
  static constexpr AlgebraKind real() { return {Tag::real, 0}; }

  /// Number of coefficients of a full algebra element.
  constexpr std::size_t element_dim() const {
    switch (tag) {
      case Tag::quaternion: return 4;
      case Tag::real: return 1;
      default: return std::size_t{1} << n;
    }
  }
  constexpr std::size_t paravector_dim() const { return n + 1; }

  std::string name() const {
    switch (tag) {
      case Tag::quaternion: return "quaternion";
      case Tag::real: return "real";
      default: return "clifford(" + std::to_string(n) + ")";
    }
  }

  constexpr bool operator==(const AlgebraKind&) const = default;
};

inline void require_same_algebra(const AlgebraKind& a, const AlgebraKind& b) {
  if (a != b) throw algebra_mismatch("algebra mismatch: " + a.name() + " vs " + b.name());
}

/// Basis blade e_A of Cl(n), A encoded as a bitmask over generators 1..n.
struct Blade {
  std::uint32_t mask = 0;

  static Blade of(std::initializer_list<unsigned> generators) {
    Blade b;
    for (unsigned g : generators) b.mask |= std::uint32_t{1} << (g - 1);
    return b;
  }
  int grade() const { return std::popcount(mask); }
  constexpr bool operator==(const Blade&) const = default;
};

struct SignedBlade {
  int sign = 1;
  Blade blade;
  constexpr bool operator==(const SignedBlade&) const = default;
};

/// e_A * e_B: sort the concatenated factor list (one sign flip per
/// transposition) and contract each repeated generator with e_i^2 = -1.
inline SignedBlade blade_product(Blade a, Blade b) {
  int swaps = 0;
  for (std::uint32_t rest = b.mask; rest != 0; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    swaps += std::popcount(a.mask >> (j + 1));
  }
  swaps += std::popcount(a.mask & b.mask);
  return {(swaps & 1) ? -1 : 1, Blade{a.mask ^ b.mask}};
}

/// Sign picked up by conj on a blade of the given grade: reversal times
/// generator negation, (-1)^{m(m+1)/2}.
constexpr int conj_sign(int grade) { return ((grade * (grade + 1) / 2) & 1) ? -1 : 1; }

class CliffordNumber {
 public:
  explicit CliffordNumber(AlgebraKind algebra)
      : algebra_(algebra), coeffs_(algebra.element_dim(), 0.0) {}

  CliffordNumber(AlgebraKind algebra, std::vector<double> coeffs)
      : algebra_(algebra), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != algebra_.element_dim())
      throw shape_mismatch("expected " + std::to_string(algebra_.element_dim()) +
                           " coefficients for " + algebra_.name());
  }

  static CliffordNumber scalar(AlgebraKind algebra, double value) {
    CliffordNumber x(algebra);
    x.coeffs_[0] = value;
    return x;
  }

  /// value * e_A; clifford_pi and real kinds only.
  static CliffordNumber blade(AlgebraKind algebra, Blade b, double value = 1.0) {
    if (algebra.tag == AlgebraKind::Tag::quaternion)
      throw precondition_violation("blade basis is not defined for the quaternion kind");
    CliffordNumber x(algebra);
    if (b.mask >= x.coeffs_.size()) throw shape_mismatch("blade outside the algebra");
    x.coeffs_[b.mask] = value;
    return x;
  }

  /// value * e_i, i in 0..n (e_0 = 1).
  static CliffordNumber generator(AlgebraKind algebra, unsigned i, double value = 1.0) {
    if (i > algebra.n) throw shape_mismatch("generator index out of range");
    CliffordNumber x(algebra);
    x.coeffs_[index_of_generator(algebra, i)] = value;
    return x;
  }

  /// Storage slot of e_i (i = 0 is the unit).
  static std::size_t index_of_generator(AlgebraKind algebra, unsigned i) {
    if (i == 0 || algebra.tag == AlgebraKind::Tag::quaternion) return i;
    return std::size_t{1} << (i - 1);
  }

  const AlgebraKind& algebra() const { return algebra_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  /// Grade of the basis element stored at slot `index`.
  int grade_of(std::size_t index) const {
    if (algebra_.tag == AlgebraKind::Tag::quaternion) return index == 0 ? 0 : 1;
    return std::popcount(static_cast<std::uint32_t>(index));
  }

  CliffordNumber& operator+=(const CliffordNumber& o) {
    require_same_algebra(algebra_, o.algebra_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  CliffordNumber& operator-=(const CliffordNumber& o) {
    require_same_algebra(algebra_, o.algebra_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  CliffordNumber& operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
  }

  bool operator==(const CliffordNumber&) const = default;

 private:
  AlgebraKind algebra_;
  std::vector<double> coeffs_;
};

inline CliffordNumber operator+(CliffordNumber a, const CliffordNumber& b) { return a += b; }
inline CliffordNumber operator-(CliffordNumber a, const CliffordNumber& b) { return a -= b; }
inline CliffordNumber operator*(double s, CliffordNumber a) { return a *= s; }

/// Hypercomplex number x0 + x1 e1 + ... + xn en.
class Paravector {
 public:
  explicit Paravector(AlgebraKind algebra)
      : algebra_(algebra), coeffs_(algebra.paravector_dim(), 0.0) {}

  Paravector(AlgebraKind algebra, std::vector<double> coeffs)
      : algebra_(algebra), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != algebra_.paravector_dim())
      throw shape_mismatch("expected " + std::to_string(algebra_.paravector_dim()) +
                           " paravector coefficients for " + algebra_.name());
  }

  static Paravector scalar(AlgebraKind algebra, double value) {
    Paravector p(algebra);
    p.coeffs_[0] = value;
    return p;
  }
  static Paravector basis(AlgebraKind algebra, unsigned i, double value = 1.0) {
    if (i > algebra.n) throw shape_mismatch("paravector basis index out of range");
    Paravector p(algebra);
    p.coeffs_[i] = value;
    return p;
  }

  const AlgebraKind& algebra() const { return algebra_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  double scalar_part() const { return coeffs_[0]; }
  std::span<const double> vector_part() const { return std::span(coeffs_).subspan(1); }

  double norm_sq() const {
    double s = 0;
    for (double c : coeffs_) s += c * c;
    return s;
  }

  Paravector& operator+=(const Paravector& o) {
    require_same_algebra(algebra_, o.algebra_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  Paravector& operator-=(const Paravector& o) {
    require_same_algebra(algebra_, o.algebra_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  Paravector& operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
  }

  bool operator==(const Paravector&) const = default;

 private:
  AlgebraKind algebra_;
  std::vector<double> coeffs_;
};

inline Paravector operator+(Paravector a, const Paravector& b) { return a += b; }
inline Paravector operator-(Paravector a, const Paravector& b) { return a -= b; }
inline Paravector operator*(double s, Paravector a) { return a *= s; }

/// Paravector as an algebra element (grade >= 2 coefficients zero).
inline CliffordNumber embed(const Paravector& p) {
  CliffordNumber x(p.algebra());
  for (unsigned i = 0; i <= p.algebra().n; ++i)
    x[CliffordNumber::index_of_generator(p.algebra(), i)] = p[i];
  return x;
}

/// Keeps grade 0 and grade 1; the identity for quaternions.
inline Paravector pi_project(const CliffordNumber& x) {
  Paravector p(x.algebra());
  for (unsigned i = 0; i <= x.algebra().n; ++i)
    p[i] = x[CliffordNumber::index_of_generator(x.algebra(), i)];
  return p;
}

namespace detail {

// Hamilton product with coefficients (1, e1, e2, e3).
inline void quaternion_product(std::span<const double> a, std::span<const double> b,
                               std::span<double> out) {
  out[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
  out[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2];
  out[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1];
  out[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0];
}

}  // namespace detail

inline CliffordNumber mul(const CliffordNumber& x, const CliffordNumber& y) {
  require_same_algebra(x.algebra(), y.algebra());
  CliffordNumber out(x.algebra());
  if (x.algebra().tag == AlgebraKind::Tag::quaternion) {
    detail::quaternion_product(x.coeffs(), y.coeffs(), out.coeffs());
    return out;
  }
  const std::size_t dim = x.algebra().element_dim();
  for (std::size_t a = 0; a < dim; ++a) {
    if (x[a] == 0.0) continue;
    for (std::size_t b = 0; b < dim; ++b) {
      if (y[b] == 0.0) continue;
      const auto [sign, blade] = blade_product(Blade{static_cast<std::uint32_t>(a)},
                                               Blade{static_cast<std::uint32_t>(b)});
      out[blade.mask] += sign * x[a] * y[b];
    }
  }
  return out;
}

inline CliffordNumber operator*(const CliffordNumber& x, const CliffordNumber& y) {
  return mul(x, y);
}

inline CliffordNumber mul(const Paravector& x, const Paravector& y) {
  return mul(embed(x), embed(y));
}

inline CliffordNumber conj(const CliffordNumber& x) {
  CliffordNumber out = x;
  for (std::size_t i = 0; i < out.coeffs().size(); ++i) out[i] *= conj_sign(x.grade_of(i));
  return out;
}

inline Paravector conj(const Paravector& p) {
  Paravector out = p;
  for (std::size_t i = 1; i < out.coeffs().size(); ++i) out[i] = -out[i];
  return out;
}

inline double cnorm(const CliffordNumber& x) {
  double s = 0;
  for (double c : x.coeffs()) s += c * c;
  return std::sqrt(s);
}

inline double cnorm(const Paravector& p) { return std::sqrt(p.norm_sq()); }

/// pi(a * x * b), the two-sided product projected back to paravectors.
inline Paravector sandwich(const Paravector& a, const Paravector& x, const Paravector& b) {
  return pi_project(mul(mul(embed(a), embed(x)), embed(b)));
}

}  // namespace hifs
