#pragma once

/**
 * @file ifs.hpp
 * @brief Hypercomplex contraction maps, their realification, Lipschitz
 * certificates, the Hutchinson operator and stationary attractor engines.
 *
 * Every linear map variant (right-affine pi(H xi) + b and two-sided
 * sandwich maps) is real-linear plus a translation on the flat coordinates,
 * so it is funneled into a RealAffine whose top singular value is the exact
 * Lipschitz constant.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hifs/hmodule.hpp"
#include "hifs/parallel.hpp"
#include "hifs/point_set.hpp"
#include "hifs/random.hpp"

namespace hifs {

// ---------------------------------------------------------------------------
// Map descriptions

/// xi -> pi(H xi) + b.
struct RightAffineMap {
  HMatrix linear;
  HVector translation;
  bool operator==(const RightAffineMap&) const = default;
};

/// One summand left * xi_source * right of a sandwich component.
struct SandwichTerm {
  Paravector left;
  std::size_t source = 0;
  Paravector right;
  bool operator==(const SandwichTerm&) const = default;
};

struct SandwichComponent {
  std::vector<SandwichTerm> terms;
  Paravector translation;
  bool operator==(const SandwichComponent&) const = default;
};

/// xi_i -> sum_m pi(a_m xi_{j_m} b_m) + c_i for each component i.
struct SandwichMap {
  std::vector<SandwichComponent> components;
  bool operator==(const SandwichMap&) const = default;
};

struct Monomial {
  double coeff = 0;
  std::vector<unsigned> powers;  ///< one exponent per component
  bool operator==(const Monomial&) const = default;
};

/// Axis-aligned region in flat coordinates.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  bool operator==(const Box&) const = default;
};

/// Polynomial map on R^k (real kind only). Not realifiable; its
/// contractivity is asserted by the user, never certified.
struct ScalarPolyMap {
  std::vector<std::vector<Monomial>> components;
  bool assume_contractive = false;
  std::optional<double> contraction_factor;
  std::optional<Box> region;
  bool operator==(const ScalarPolyMap&) const = default;
};

using MapDesc = std::variant<RightAffineMap, SandwichMap, ScalarPolyMap>;

inline bool is_linear(const MapDesc& m) { return !std::holds_alternative<ScalarPolyMap>(m); }

inline AlgebraKind map_algebra(const MapDesc& m) {
  return std::visit(
      [](const auto& v) -> AlgebraKind {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RightAffineMap>) return v.linear.algebra();
        else if constexpr (std::is_same_v<T, SandwichMap>) {
          if (v.components.empty()) throw shape_mismatch("sandwich map without components");
          return v.components.front().translation.algebra();
        } else return AlgebraKind::real();
      },
      m);
}

inline std::size_t map_k(const MapDesc& m) {
  return std::visit(
      [](const auto& v) -> std::size_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RightAffineMap>) return v.linear.rows();
        else return v.components.size();
      },
      m);
}

/// Checks that all constituents of `m` share algebra and k.
inline void validate_map(const MapDesc& m) {
  const AlgebraKind alg = map_algebra(m);
  const std::size_t k = map_k(m);
  if (k == 0) throw shape_mismatch("map has no components");
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RightAffineMap>) {
          if (v.linear.rows() != v.linear.cols()) throw shape_mismatch("H must be square");
          require_same_algebra(alg, v.translation.algebra());
          if (v.translation.k() != k) throw shape_mismatch("translation length differs from H");
        } else if constexpr (std::is_same_v<T, SandwichMap>) {
          for (const auto& c : v.components) {
            require_same_algebra(alg, c.translation.algebra());
            for (const auto& t : c.terms) {
              require_same_algebra(alg, t.left.algebra());
              require_same_algebra(alg, t.right.algebra());
              if (t.source >= k) throw shape_mismatch("sandwich term source out of range");
            }
          }
        } else {
          for (const auto& c : v.components)
            for (const auto& t : c)
              if (t.powers.size() != k) throw shape_mismatch("monomial exponent count differs from k");
          if (v.contraction_factor && !(*v.contraction_factor >= 0))
            throw precondition_violation("contraction factor must be nonnegative");
        }
      },
      m);
}

/// Symbolic evaluation through the algebra.
inline HVector apply_map(const MapDesc& m, const HVector& xi) {
  if (xi.algebra() != map_algebra(m)) throw algebra_mismatch("map and point use different algebras");
  if (xi.k() != map_k(m)) throw shape_mismatch("map and point have different k");
  return std::visit(
      [&](const auto& v) -> HVector {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RightAffineMap>) {
          return project_linear(v.linear, xi) + v.translation;
        } else if constexpr (std::is_same_v<T, SandwichMap>) {
          HVector out(xi.algebra(), xi.k());
          for (std::size_t i = 0; i < v.components.size(); ++i) {
            Paravector acc = v.components[i].translation;
            for (const auto& t : v.components[i].terms) acc += sandwich(t.left, xi.entry(t.source), t.right);
            out.set_entry(i, acc);
          }
          return out;
        } else {
          HVector out(xi.algebra(), xi.k());
          for (std::size_t i = 0; i < v.components.size(); ++i) {
            double acc = 0;
            for (const auto& term : v.components[i]) {
              double prod = term.coeff;
              for (std::size_t c = 0; c < term.powers.size(); ++c) prod *= std::pow(xi[c], term.powers[c]);
              acc += prod;
            }
            out[i] = acc;
          }
          return out;
        }
      },
      m);
}

// ---------------------------------------------------------------------------
// Realification and Lipschitz constants

/// x -> matrix * x + translation on R^D, matrix row-major.
struct RealAffine {
  std::size_t dim = 0;
  std::vector<double> matrix;
  std::vector<double> translation;
  std::optional<double> lip;

  double at(std::size_t r, std::size_t c) const { return matrix[r * dim + c]; }

  void apply(std::span<const double> x, std::span<double> out) const {
    for (std::size_t r = 0; r < dim; ++r) {
      double acc = translation[r];
      const double* row = matrix.data() + r * dim;
      for (std::size_t c = 0; c < dim; ++c) acc += row[c] * x[c];
      out[r] = acc;
    }
  }
};

/// Column c is f(e_c) - f(0); the translation is f(0).
inline RealAffine realify(const MapDesc& m) {
  if (!is_linear(m)) throw precondition_violation("scalar-poly maps have no exact realification");
  validate_map(m);
  const AlgebraKind alg = map_algebra(m);
  const std::size_t k = map_k(m);
  const HVector zero(alg, k);
  const HVector origin = apply_map(m, zero);

  RealAffine r;
  r.dim = zero.dim();
  r.translation.assign(origin.flat().begin(), origin.flat().end());
  r.matrix.assign(r.dim * r.dim, 0.0);
  for (std::size_t c = 0; c < r.dim; ++c) {
    HVector unit(alg, k);
    unit[c] = 1.0;
    const HVector image = apply_map(m, unit);
    for (std::size_t row = 0; row < r.dim; ++row) r.matrix[row * r.dim + c] = image[row] - origin[row];
  }
  return r;
}

struct SpectralNorm {
  double value = 0;
  std::vector<double> right_vector;  ///< unit vector v with |Mv| ~ value
  std::size_t iterations = 0;
};

namespace detail {

inline SpectralNorm power_iteration(const RealAffine& r, std::vector<double> v, double tol,
                                    std::size_t cap) {
  const std::size_t d = r.dim;
  std::vector<double> mv(d), mtmv(d);
  auto normalize = [](std::vector<double>& x) {
    double s = 0;
    for (double e : x) s += e * e;
    s = std::sqrt(s);
    if (s > 0)
      for (double& e : x) e /= s;
    return s;
  };
  normalize(v);
  double previous = -1;
  for (std::size_t it = 1; it <= cap; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0;
      for (std::size_t j = 0; j < d; ++j) acc += r.at(i, j) * v[j];
      mv[i] = acc;
    }
    double rayleigh = 0;
    for (double e : mv) rayleigh += e * e;
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0;
      for (std::size_t i = 0; i < d; ++i) acc += r.at(i, j) * mv[i];
      mtmv[j] = acc;
    }
    if (rayleigh == 0 || std::abs(rayleigh - previous) <= tol * rayleigh)
      return {std::sqrt(rayleigh), v, it};
    previous = rayleigh;
    v = mtmv;
    if (normalize(v) == 0) return {0.0, v, it};
  }
  throw convergence_failure("power iteration did not converge in " + std::to_string(cap) + " steps");
}

}  // namespace detail

inline constexpr double power_iteration_tolerance = 1e-12;
inline constexpr std::size_t power_iteration_cap = 100000;

/// Largest singular value of the linear part, i.e. Lip(f) for an affine f.
/// Power iteration on M^T M from the normalized all-ones vector. If the
/// largest column norm (a lower bound on the answer) exceeds the result, the
/// start vector was deficient and the iteration is repeated from that column's
/// basis vector.
inline SpectralNorm lipschitz_exact(const RealAffine& r) {
  if (r.dim == 0) return {};
  SpectralNorm best = detail::power_iteration(r, std::vector<double>(r.dim, 1.0),
                                              power_iteration_tolerance, power_iteration_cap);
  std::size_t widest = 0;
  double widest_norm = 0;
  for (std::size_t c = 0; c < r.dim; ++c) {
    double s = 0;
    for (std::size_t row = 0; row < r.dim; ++row) s += r.at(row, c) * r.at(row, c);
    if (s > widest_norm) widest_norm = s, widest = c;
  }
  if (std::sqrt(widest_norm) > best.value * (1 + 1e-9)) {
    std::vector<double> start(r.dim, 0.0);
    start[widest] = 1.0;
    SpectralNorm retry = detail::power_iteration(r, std::move(start), power_iteration_tolerance,
                                                 power_iteration_cap);
    retry.iterations += best.iterations;
    if (retry.value > best.value) best = std::move(retry);
  }
  return best;
}

/// A sampled Lipschitz ratio; an estimate, never a certificate.
struct LipschitzEstimate {
  double value = 0;
  std::size_t samples = 0;
  bool certified = false;
};

/// max over random pairs in `box` of d(f(x), f(y)) / d(x, y).
inline LipschitzEstimate lipschitz_sampled(const MapDesc& m, const Box& box, std::size_t samples,
                                           std::uint64_t seed) {
  const AlgebraKind alg = map_algebra(m);
  const std::size_t k = map_k(m);
  const std::size_t dim = alg.paravector_dim() * k;
  if (box.lo.size() != dim || box.hi.size() != dim) throw shape_mismatch("box dimension differs from D");
  for (std::size_t c = 0; c < dim; ++c)
    if (!(box.hi[c] > box.lo[c])) throw precondition_violation("degenerate sampling box");

  LipschitzEstimate est{0.0, samples, false};
  HVector x(alg, k), y(alg, k);
  for (std::size_t s = 0; s < samples; ++s) {
    SampleStream rng(seed, s);
    for (std::size_t c = 0; c < dim; ++c) {
      x[c] = box.lo[c] + (box.hi[c] - box.lo[c]) * rng.uniform();
      y[c] = box.lo[c] + (box.hi[c] - box.lo[c]) * rng.uniform();
    }
    const double d = metric(x, y);
    if (d == 0) continue;
    est.value = std::max(est.value, metric(apply_map(m, x), apply_map(m, y)) / d);
  }
  return est;
}

// ---------------------------------------------------------------------------
// Systems

/// A map together with its fast evaluation path and Lipschitz constant.
class ContractionMap {
 public:
  explicit ContractionMap(MapDesc desc) : desc_(std::move(desc)) {
    validate_map(desc_);
    algebra_ = map_algebra(desc_);
    k_ = map_k(desc_);
    if (is_linear(desc_)) {
      affine_ = realify(desc_);
      lip_ = lipschitz_exact(*affine_).value;
      affine_->lip = lip_;
      certified_ = true;
      return;
    }
    const auto& poly = std::get<ScalarPolyMap>(desc_);
    if (algebra_ != AlgebraKind::real()) throw precondition_violation("scalar-poly maps need the real kind");
    if (!poly.assume_contractive)
      throw not_contractive("scalar-poly map needs an explicit assume_contractive flag");
    if (poly.region) estimate_ = lipschitz_sampled(desc_, *poly.region, 20000, 0x5eed);
    if (poly.contraction_factor) lip_ = *poly.contraction_factor;
    else if (estimate_) lip_ = estimate_->value;
    else throw precondition_violation("scalar-poly map needs a contraction_factor or a sampling region");
  }

  const MapDesc& desc() const { return desc_; }
  const AlgebraKind& algebra() const { return algebra_; }
  std::size_t k() const { return k_; }
  std::size_t dim() const { return algebra_.paravector_dim() * k_; }
  const std::optional<RealAffine>& affine() const { return affine_; }
  double lip() const { return lip_; }
  /// True when lip() is an exact singular value, false when user-asserted.
  bool certified() const { return certified_; }
  const std::optional<LipschitzEstimate>& sampled_estimate() const { return estimate_; }

  void apply(std::span<const double> x, std::span<double> out) const {
    if (affine_) {
      affine_->apply(x, out);
      return;
    }
    const HVector image = apply_map(desc_, HVector(algebra_, k_, std::vector<double>(x.begin(), x.end())));
    std::copy(image.flat().begin(), image.flat().end(), out.begin());
  }

  HVector operator()(const HVector& xi) const {
    HVector out(algebra_, k_);
    apply(xi.flat(), out.flat());
    return out;
  }

 private:
  MapDesc desc_;
  AlgebraKind algebra_;
  std::size_t k_ = 0;
  std::optional<RealAffine> affine_;
  double lip_ = 0;
  bool certified_ = false;
  std::optional<LipschitzEstimate> estimate_;
};

/// Power iteration approaches the norm from below, so a constant within this
/// margin of 1 is not accepted as a contraction.
inline constexpr double contraction_margin = 1e-9;

inline bool is_contraction(double lip) { return lip < 1 - contraction_margin; }

/// A finite family of maps on A_{n+1}^k; h is the largest Lipschitz constant.
class HIFS {
 public:
  HIFS(AlgebraKind algebra, std::size_t k, std::vector<ContractionMap> maps)
      : algebra_(algebra), k_(k), maps_(std::move(maps)) {
    if (maps_.empty()) throw precondition_violation("an IFS needs at least one map");
    for (const auto& m : maps_) {
      require_same_algebra(algebra_, m.algebra());
      if (m.k() != k_) throw shape_mismatch("maps of an IFS must share k");
      h_ = std::max(h_, m.lip());
      certified_ = certified_ && m.certified();
    }
  }

  static HIFS from(const std::vector<MapDesc>& descs) {
    if (descs.empty()) throw precondition_violation("an IFS needs at least one map");
    std::vector<ContractionMap> maps;
    for (const auto& d : descs) maps.emplace_back(d);
    const AlgebraKind alg = maps.front().algebra();
    const std::size_t k = maps.front().k();
    return HIFS(alg, k, std::move(maps));
  }

  const AlgebraKind& algebra() const { return algebra_; }
  std::size_t k() const { return k_; }
  std::size_t dim() const { return algebra_.paravector_dim() * k_; }
  const std::vector<ContractionMap>& maps() const { return maps_; }
  std::size_t size() const { return maps_.size(); }
  double h() const { return h_; }
  bool contractive() const { return is_contraction(h_); }
  bool certified() const { return certified_; }
  bool linear() const {
    return std::all_of(maps_.begin(), maps_.end(), [](const auto& m) { return m.affine().has_value(); });
  }

  void require_contractive() const {
    if (!contractive())
      throw not_contractive("IFS is not contractive: max Lipschitz constant " + std::to_string(h_) + " is not below 1");
  }

 private:
  AlgebraKind algebra_;
  std::size_t k_;
  std::vector<ContractionMap> maps_;
  double h_ = 0;
  bool certified_ = true;
};

// ---------------------------------------------------------------------------
// Invariant balls

/// Constants of the growth bound d(T(x), 0) <= s d(x, 0) + M and the radius
/// r = M / (1 - s): every closed ball at the origin with radius >= r is
/// mapped into itself by every map.
struct InvariantBall {
  double s = 0;
  double M = 0;
  double r = 0;
};

inline InvariantBall invariant_radius(std::span<const ContractionMap* const> maps) {
  InvariantBall ball;
  for (const ContractionMap* m : maps) {
    if (!m->affine()) throw precondition_violation("invariant radius needs linear map variants");
    ball.s = std::max(ball.s, m->lip());
    double t = 0;
    for (double c : m->affine()->translation) t += c * c;
    ball.M = std::max(ball.M, std::sqrt(t));
  }
  if (!is_contraction(ball.s)) throw not_contractive("invariant radius needs s < 1, got " + std::to_string(ball.s));
  ball.r = ball.M / (1 - ball.s);
  return ball;
}

inline InvariantBall invariant_radius(const std::vector<MapDesc>& descs) {
  std::vector<ContractionMap> maps;
  for (const auto& d : descs) maps.emplace_back(d);
  std::vector<const ContractionMap*> ptrs;
  for (const auto& m : maps) ptrs.push_back(&m);
  return invariant_radius(ptrs);
}

inline InvariantBall invariant_radius(const HIFS& ifs) {
  std::vector<const ContractionMap*> ptrs;
  for (const auto& m : ifs.maps()) ptrs.push_back(&m);
  return invariant_radius(ptrs);
}

// ---------------------------------------------------------------------------
// Hutchinson operator and attractor engines

/// Union of f(E) over all maps, without decimation. Row i*|E| + p holds the
/// image of point p under map i.
inline PointSet apply_all(const HIFS& ifs, const PointSet& e, unsigned threads = 1) {
  if (e.algebra() != ifs.algebra() || e.k() != ifs.k()) throw shape_mismatch("point set does not match the IFS");
  const std::size_t dim = e.dim(), n = e.size();
  std::vector<double> out(ifs.size() * n * dim);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = 0; i < ifs.size(); ++i)
      for (std::size_t p = begin; p < end; ++p)
        ifs.maps()[i].apply(e.point(p), std::span(out).subspan((i * n + p) * dim, dim));
  });
  return PointSet(e.algebra(), e.k(), std::move(out));
}

/// F(E) = union of f(E), decimated at `cell`.
inline PointSet hutchinson(const HIFS& ifs, const PointSet& e, double cell, unsigned threads = 1) {
  ifs.require_contractive();
  if (e.empty()) throw empty_set("Hutchinson operator needs a nonempty set");
  return decimate(apply_all(ifs, e, threads), cell);
}

struct DeterministicReport {
  std::size_t iterations = 0;
  double residual = 0;  ///< d_H(F_n, F_{n-1}) at termination
  double bound = 0;     ///< certified d_H(F_n, F)
  double h = 0;
};

struct DeterministicResult {
  PointSet set;
  DeterministicReport report;
};

/// Iterates F_n = decimate(F(F_{n-1})) until d_H(F_n, F_{n-1}) <= tol (1 - h).
/// With decimation displacement delta, the a-posteriori bound gives
/// d_H(F_n, F) <= (h residual + delta) / (1 - h) <= tol + delta / (1 - h).
inline DeterministicResult attractor_deterministic(const HIFS& ifs, const PointSet& f0, double tol,
                                                   double cell, std::size_t max_iter,
                                                   unsigned threads = 1) {
  ifs.require_contractive();
  if (!(tol > 0) || !(cell > 0)) throw precondition_violation("tolerance and cell must be positive");
  if (f0.empty()) throw empty_set("initial set is empty");
  const double h = ifs.h();
  const double slack = decimation_slack(cell, ifs.dim());
  const double threshold = tol * (1 - h);
  PointSet current = f0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    PointSet next = hutchinson(ifs, current, cell, threads);
    const bool same = next.size() == current.size() &&
                      std::ranges::equal(next.coords(), current.coords());
    // two different sets of cell centres are at least one cell apart, so
    // below that threshold only equality can terminate
    if (!same && it > 1 && threshold < cell / 2) {
      current = std::move(next);
      continue;
    }
    const double residual = same ? 0.0 : hausdorff(next, current, threads);
    if (residual <= threshold) {
      DeterministicReport rep{it, residual, tol + slack / (1 - h), h};
      return {std::move(next), rep};
    }
    current = std::move(next);
  }
  throw convergence_failure("deterministic attractor did not reach tolerance in " +
                            std::to_string(max_iter) + " iterations");
}

/// Smallest b with h^b R <= cell / 2.
inline std::size_t default_burn_in(double h, double radius, double cell) {
  if (radius <= cell / 2 || h <= 0) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(cell / (2 * radius)) / std::log(h)));
}

/// Chaos game: sample s starts at 0 and applies burn_in + 1 maps chosen
/// uniformly from the stream (seed, s). Row s of the result is sample s.
inline PointSet attractor_chaos(const HIFS& ifs, std::size_t samples, std::size_t burn_in,
                                std::uint64_t seed, unsigned threads = 1) {
  ifs.require_contractive();
  const std::size_t dim = ifs.dim();
  std::vector<double> out(samples * dim);
  parallel_for(samples, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(dim), y(dim);
    for (std::size_t s = begin; s < end; ++s) {
      SampleStream rng(seed, s);
      std::fill(x.begin(), x.end(), 0.0);
      for (std::size_t step = 0; step <= burn_in; ++step) {
        ifs.maps()[rng.below(ifs.size())].apply(x, y);
        std::swap(x, y);
      }
      std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(s * dim));
    }
  });
  return PointSet(ifs.algebra(), ifs.k(), std::move(out));
}

}  // namespace hifs
