#pragma once

/**
 * @file trajectory.hpp
 * @brief Non-stationary systems: a schedule l -> F_l of IFS families and the
 * backward trajectories Psi_l(F0) = F_1 o F_2 o ... o F_l (F0).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hifs/ifs.hpp"

namespace hifs {

struct ScheduleBlock {
  std::size_t family = 0;
  std::size_t repeat = 1;
};

/// Assignment l -> family for l >= 1: either one family for every level or
/// a list of (family, repeat) blocks cycled forever.
class Schedule {
 public:
  static Schedule stationary(std::string name, HIFS family) {
    Schedule s;
    s.names_.push_back(std::move(name));
    s.families_.push_back(std::move(family));
    s.blocks_.push_back({0, 1});
    s.stationary_ = true;
    s.check();
    return s;
  }

  static Schedule block_periodic(std::vector<std::string> names, std::vector<HIFS> families,
                                 std::vector<ScheduleBlock> blocks) {
    Schedule s;
    s.names_ = std::move(names);
    s.families_ = std::move(families);
    s.blocks_ = std::move(blocks);
    s.check();
    return s;
  }

  bool is_stationary() const { return stationary_; }
  const std::vector<HIFS>& families() const { return families_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ScheduleBlock>& blocks() const { return blocks_; }

  std::size_t period() const {
    std::size_t p = 0;
    for (const auto& b : blocks_) p += b.repeat;
    return p;
  }

  std::size_t family_index(std::size_t level) const {
    if (level == 0) throw precondition_violation("schedule levels start at 1");
    std::size_t pos = (level - 1) % period();
    for (const auto& b : blocks_) {
      if (pos < b.repeat) return b.family;
      pos -= b.repeat;
    }
    return blocks_.back().family;
  }

  const HIFS& lookup(std::size_t level) const { return families_[family_index(level)]; }

  const AlgebraKind& algebra() const { return families_.front().algebra(); }
  std::size_t k() const { return families_.front().k(); }
  std::size_t dim() const { return families_.front().dim(); }

  /// Families that appear in at least one block.
  std::vector<const HIFS*> referenced() const {
    std::vector<const HIFS*> out;
    for (std::size_t f = 0; f < families_.size(); ++f)
      if (std::any_of(blocks_.begin(), blocks_.end(), [&](const auto& b) { return b.family == f; }))
        out.push_back(&families_[f]);
    return out;
  }

 private:
  Schedule() = default;

  void check() const {
    if (families_.empty()) throw precondition_violation("schedule without families");
    if (names_.size() != families_.size()) throw precondition_violation("one name per family required");
    if (blocks_.empty()) throw precondition_violation("schedule without blocks");
    for (const auto& f : families_) {
      require_same_algebra(families_.front().algebra(), f.algebra());
      if (f.k() != families_.front().k()) throw shape_mismatch("schedule families must share k");
    }
    for (const auto& b : blocks_) {
      if (b.family >= families_.size()) throw precondition_violation("block references an unknown family");
      if (b.repeat == 0) throw precondition_violation("block repeat must be positive");
    }
  }

  std::vector<std::string> names_;
  std::vector<HIFS> families_;
  std::vector<ScheduleBlock> blocks_;
  bool stationary_ = false;
};

enum class Verdict { convergent, divergent, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::convergent: return "convergent";
    case Verdict::divergent: return "divergent";
    default: return "inconclusive";
  }
}

/// Partial products P_l = prod_{j<=l} Lip(F_j) and their sum.
struct SummabilityReport {
  std::size_t horizon = 0;
  std::vector<double> lips;              ///< Lip(F_l), l = 1..horizon
  std::vector<double> partial_products;  ///< P_l, l = 1..horizon
  double partial_sum = 0;
  double period_product = 0;             ///< product of Lip over one period
  std::optional<double> geometric_tail;  ///< sum_{l > horizon} P_l, exact
  Verdict verdict = Verdict::inconclusive;

  double total_bound() const { return partial_sum + geometric_tail.value_or(INFINITY); }
  /// P_l with P_0 = 1.
  double product(std::size_t level) const { return level == 0 ? 1.0 : partial_products.at(level - 1); }
};

inline SummabilityReport summability_report(const Schedule& s, std::size_t horizon) {
  if (horizon == 0) throw precondition_violation("horizon must be at least 1");
  SummabilityReport rep;
  rep.horizon = horizon;
  double product = 1;
  for (std::size_t l = 1; l <= horizon; ++l) {
    const double lip = s.lookup(l).h();
    product *= lip;
    rep.lips.push_back(lip);
    rep.partial_products.push_back(product);
    rep.partial_sum += product;
  }

  const std::size_t period = s.period();
  rep.period_product = 1;
  for (std::size_t l = 1; l <= period; ++l) rep.period_product *= s.lookup(l).h();

  const auto refs = s.referenced();
  const bool all_contractive =
      std::all_of(refs.begin(), refs.end(), [](const HIFS* f) { return f->contractive(); });
  if (all_contractive) {
    // sum_{t>=1} P_{H+t} = P_H * (sum_{t=1..T} prod_{j=H+1}^{H+t} Lip_j) / (1 - beta)
    double run = 1, one_period = 0;
    for (std::size_t t = 1; t <= period; ++t) {
      run *= s.lookup(horizon + t).h();
      one_period += run;
    }
    rep.geometric_tail = product * one_period / (1 - rep.period_product);
    rep.verdict = Verdict::convergent;
  } else if (rep.period_product >= 1) {
    rep.verdict = Verdict::divergent;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

/// Invariant ball common to every map of every referenced family.
inline InvariantBall schedule_invariant_ball(const Schedule& s) {
  std::vector<const ContractionMap*> maps;
  for (const HIFS* f : s.referenced())
    for (const auto& m : f->maps()) maps.push_back(&m);
  return invariant_radius(maps);
}

/// Smallest depth with P_depth * diameter <= tol, searched up to max_depth.
inline std::size_t depth_for_tolerance(const Schedule& s, double diameter, double tol,
                                       std::size_t max_depth = 100000) {
  double product = 1;
  for (std::size_t d = 0; d <= max_depth; ++d) {
    if (d > 0) product *= s.lookup(d).h();
    if (product * diameter <= tol) return d;
  }
  throw convergence_failure("no depth up to " + std::to_string(max_depth) + " reaches the tolerance");
}

struct BackwardSetsResult {
  PointSet set;
  double tail_bound = 0;  ///< d_H(set, attractor) bound: P_depth * diam + slack
  double slack = 0;       ///< accumulated decimation displacement
  InvariantBall ball;
  std::vector<double> max_norms;  ///< largest norm of each intermediate set, last applied first
};

/// Applies F_depth first and F_1 last, decimating after each level. A
/// decimation after applying F_l is later contracted by P_{l-1}, so the
/// accumulated slack is delta * sum_{l=1}^{depth} P_{l-1}.
inline BackwardSetsResult backward_attractor_sets(const Schedule& s, const PointSet& f0,
                                                  std::size_t depth, double cell,
                                                  unsigned threads = 1) {
  if (f0.empty()) throw empty_set("initial set is empty");
  if (!(cell > 0)) throw precondition_violation("cell must be positive");
  const SummabilityReport rep = summability_report(s, std::max<std::size_t>(depth, 1));
  if (rep.verdict != Verdict::convergent)
    throw precondition_violation(std::string("summability verdict is ") + to_string(rep.verdict));
  const InvariantBall ball = schedule_invariant_ball(s);
  if (f0.max_norm() > ball.r * (1 + 1e-12) + 1e-15)
    throw precondition_violation("initial set leaves the invariant ball of radius " + std::to_string(ball.r));

  const double delta = decimation_slack(cell, s.dim());
  BackwardSetsResult out{f0, 0.0, 0.0, ball, {}};
  for (std::size_t l = depth; l >= 1; --l) {
    out.set = hutchinson(s.lookup(l), out.set, cell, threads);
    out.max_norms.push_back(out.set.max_norm());
    out.slack += delta * rep.product(l - 1);
  }
  out.tail_bound = rep.product(depth) * 2 * ball.r + out.slack;
  return out;
}

/// Sample s draws one map per level from stream (seed, s), levels depth
/// down to 1, and records f_{i_1,1} o ... o f_{i_depth,depth}(0).
inline PointSet backward_attractor_points(const Schedule& s, std::size_t depth, std::size_t samples,
                                          std::uint64_t seed, unsigned threads = 1) {
  const SummabilityReport rep = summability_report(s, std::max<std::size_t>(depth, 1));
  if (rep.verdict != Verdict::convergent)
    throw precondition_violation(std::string("summability verdict is ") + to_string(rep.verdict));
  const std::size_t dim = s.dim();
  std::vector<double> out(samples * dim);
  parallel_for(samples, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(dim), y(dim);
    for (std::size_t i = begin; i < end; ++i) {
      SampleStream rng(seed, i);
      std::fill(x.begin(), x.end(), 0.0);
      for (std::size_t l = depth; l >= 1; --l) {
        const HIFS& fam = s.lookup(l);
        fam.maps()[rng.below(fam.size())].apply(x, y);
        std::swap(x, y);
      }
      std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
  });
  return PointSet(s.algebra(), s.k(), std::move(out));
}

}  // namespace hifs
