#pragma once

/**
 * @file point_set.hpp
 * @brief Finite samples of compact subsets of A_{n+1}^k, a uniform grid
 * index over them, and the Hausdorff-Pompeiu distance.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hifs/hmodule.hpp"
#include "hifs/parallel.hpp"

namespace hifs {

using CellKey = std::vector<std::int64_t>;

struct CellKeyHash {
  std::size_t operator()(const CellKey& key) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int64_t v : key) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xbf58476d1ce4e5b9ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

inline std::int64_t cell_coord(double x, double cell) {
  return static_cast<std::int64_t>(std::floor(x / cell));
}

inline void cell_of(std::span<const double> p, double cell, CellKey& key) {
  key.resize(p.size());
  for (std::size_t c = 0; c < p.size(); ++c) key[c] = cell_coord(p[c], cell);
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return s;
}

/// Uniform grid over a flat coordinate array: cell key -> member indices.
class GridIndex {
 public:
  struct Cell {
    CellKey key;
    std::vector<std::uint32_t> members;
  };

  GridIndex(std::span<const double> coords, std::size_t dim, double cell)
      : dim_(dim), cell_(cell) {
    if (!(cell > 0)) throw precondition_violation("grid cell size must be positive");
    const std::size_t count = dim == 0 ? 0 : coords.size() / dim;
    CellKey key;
    for (std::size_t i = 0; i < count; ++i) {
      cell_of(coords.subspan(i * dim, dim), cell, key);
      auto [it, inserted] = lookup_.try_emplace(key, cells_.size());
      if (inserted) cells_.push_back({key, {}});
      cells_[it->second].members.push_back(static_cast<std::uint32_t>(i));
    }
  }

  double cell_size() const { return cell_; }
  std::size_t dim() const { return dim_; }
  const std::vector<Cell>& cells() const { return cells_; }

  const Cell* find(const CellKey& key) const {
    auto it = lookup_.find(key);
    return it == lookup_.end() ? nullptr : &cells_[it->second];
  }

  std::size_t member_count() const {
    std::size_t n = 0;
    for (const auto& c : cells_) n += c.members.size();
    return n;
  }

 private:
  std::size_t dim_;
  double cell_;
  std::vector<Cell> cells_;
  std::unordered_map<CellKey, std::size_t, CellKeyHash> lookup_;
};

/// A finite set of HVectors sharing algebra and k, stored as flat rows.
/// Immutable once built; with_grid() returns a copy carrying a grid index.
class PointSet {
 public:
  PointSet(AlgebraKind algebra, std::size_t k)
      : algebra_(algebra), k_(k), dim_(algebra.paravector_dim() * k) {}

  PointSet(AlgebraKind algebra, std::size_t k, std::vector<double> coords)
      : algebra_(algebra), k_(k), dim_(algebra.paravector_dim() * k), coords_(std::move(coords)) {
    if (coords_.size() % dim_ != 0) throw shape_mismatch("coordinate count is not a multiple of D");
  }

  static PointSet from(const std::vector<HVector>& points) {
    if (points.empty()) throw empty_set("cannot infer shape from an empty point list");
    PointSet s(points.front().algebra(), points.front().k());
    s.coords_.reserve(points.size() * s.dim_);
    for (const auto& p : points) {
      points.front().require_same_shape(p);
      s.coords_.insert(s.coords_.end(), p.flat().begin(), p.flat().end());
    }
    return s;
  }

  static PointSet singleton(const HVector& p) { return from({p}); }

  const AlgebraKind& algebra() const { return algebra_; }
  std::size_t k() const { return k_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }
  std::span<const double> coords() const { return coords_; }

  std::span<const double> point(std::size_t i) const {
    return std::span(coords_).subspan(i * dim_, dim_);
  }
  HVector at(std::size_t i) const {
    auto p = point(i);
    return HVector(algebra_, k_, std::vector<double>(p.begin(), p.end()));
  }

  PointSet with_grid(double cell) const {
    PointSet out = *this;
    out.grid_ = std::make_shared<const GridIndex>(coords_, dim_, cell);
    return out;
  }
  const GridIndex* grid() const { return grid_.get(); }

  /// Rows in lexicographic order of their flat coordinates.
  PointSet sorted() const {
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      auto pa = point(a), pb = point(b);
      return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    });
    std::vector<double> out;
    out.reserve(coords_.size());
    for (std::size_t i : order) out.insert(out.end(), point(i).begin(), point(i).end());
    return PointSet(algebra_, k_, std::move(out));
  }

  /// Largest hnorm over the members.
  double max_norm() const {
    double best = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      double s = 0;
      for (double c : point(i)) s += c * c;
      best = std::max(best, s);
    }
    return std::sqrt(best);
  }

  void require_same_shape(const PointSet& o) const {
    require_same_algebra(algebra_, o.algebra_);
    if (k_ != o.k_) throw shape_mismatch("point sets live in different A^k");
  }

 private:
  AlgebraKind algebra_;
  std::size_t k_;
  std::size_t dim_;
  std::vector<double> coords_;
  std::shared_ptr<const GridIndex> grid_;
};

inline void require_nonempty(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw empty_set("Hausdorff distance needs nonempty sets");
  a.require_same_shape(b);
}

/// Exact O(|A||B|) evaluation of max{sup_a inf_b d, sup_b inf_a d}.
inline double hausdorff_bruteforce(const PointSet& a, const PointSet& b) {
  require_nonempty(a, b);
  auto directed = [](const PointSet& from, const PointSet& to) {
    double worst = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < to.size() && best > worst; ++j)
        best = std::min(best, squared_distance(from.point(i), to.point(j)));
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

namespace detail {

// Lower bound on the squared distance from q to any point of a grid cell.
inline double cell_lower_bound_sq(std::span<const double> q, const CellKey& key, double cell) {
  double s = 0;
  for (std::size_t c = 0; c < q.size(); ++c) {
    const double lo = static_cast<double>(key[c]) * cell;
    const double hi = lo + cell;
    double gap = 0;
    if (q[c] < lo) gap = lo - q[c];
    else if (q[c] > hi) gap = q[c] - hi;
    // floor() may misplace a coordinate within an ulp of a boundary
    gap = std::max(0.0, gap - 1e-12 * (std::abs(q[c]) + cell));
    s += gap * gap;
  }
  return s;
}

// Gap from q_c to the slab of cell index key_c + offset, offset in {-1, 0, 1}.
inline double slab_gap(double q, std::int64_t key, int offset, double cell) {
  const double lo = static_cast<double>(key) * cell;
  double gap = 0;
  if (offset < 0) gap = q - lo;
  else if (offset > 0) gap = lo + cell - q;
  return std::max(0.0, gap - 1e-12 * (std::abs(q) + cell));
}

}  // namespace detail

/// Squared distance from q to the nearest member of `target`, using the
/// target's grid. Visits q's own cell, then the 3^D - 1 neighbouring cells by
/// a depth-first walk over per-axis offsets that prunes any partial offset
/// whose lower bound already exceeds the best distance. Points outside that
/// block are at least cell + (distance from q to its cell boundary) away;
/// if the best distance is not within that, all occupied cells are scanned
/// with a box lower bound.
inline double nearest_sq(const PointSet& target, std::span<const double> q) {
  const GridIndex& grid = *target.grid();
  const double cell = grid.cell_size();
  const std::size_t dim = q.size();
  double best = std::numeric_limits<double>::infinity();

  auto visit = [&](const GridIndex::Cell& c) {
    for (std::uint32_t m : c.members) best = std::min(best, squared_distance(q, target.point(m)));
  };

  CellKey center;
  cell_of(q, cell, center);
  if (const auto* own = grid.find(center)) visit(*own);

  // with nothing found yet the walk cannot prune; a sparse grid is cheaper to scan
  const bool sparse = std::pow(3.0, static_cast<double>(dim)) > 4.0 * static_cast<double>(grid.cells().size());
  if (best == std::numeric_limits<double>::infinity() && sparse) {
    for (const auto& c : grid.cells())
      if (detail::cell_lower_bound_sq(q, c.key, cell) < best) visit(c);
    return best;
  }

  CellKey probe(center);
  // depth-first over offsets; `partial` is the squared gap of axes < c
  auto walk = [&](auto&& self, std::size_t c, double partial, bool moved) -> void {
    if (c == dim) {
      if (!moved) return;
      if (const auto* found = grid.find(probe)) visit(*found);
      return;
    }
    for (int o : {0, -1, 1}) {
      const double g = detail::slab_gap(q[c], center[c], o, cell);
      const double next = partial + g * g;
      if (o != 0 && next >= best) continue;
      probe[c] = center[c] + o;
      self(self, c + 1, next, moved || o != 0);
    }
    probe[c] = center[c];
  };
  walk(walk, 0, 0.0, false);

  double margin = cell;
  for (std::size_t c = 0; c < dim; ++c)
    margin = std::min({margin, detail::slab_gap(q[c], center[c], -1, cell), detail::slab_gap(q[c], center[c], 1, cell)});
  const double reach = (cell + margin) * (1 - 1e-9);
  if (best <= reach * reach) return best;

  for (const auto& c : grid.cells())
    if (detail::cell_lower_bound_sq(q, c.key, cell) < best) visit(c);
  return best;
}

/// sup_{a in from} inf_{b in to} d(a, b), with `to` carrying a grid.
inline double directed_hausdorff_grid(const PointSet& from, const PointSet& to, unsigned threads = 1) {
  if (!to.grid()) throw precondition_violation("target point set has no grid index");
  std::vector<double> partial(std::max(1u, threads), 0.0);
  const std::size_t chunks = partial.size();
  parallel_for(chunks, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t w = begin; w < end; ++w) {
      const std::size_t lo = from.size() * w / chunks, hi = from.size() * (w + 1) / chunks;
      double worst = 0;
      for (std::size_t i = lo; i < hi; ++i) worst = std::max(worst, nearest_sq(to, from.point(i)));
      partial[w] = worst;
    }
  });
  return std::sqrt(*std::max_element(partial.begin(), partial.end()));
}

/// Grid-accelerated Hausdorff distance; both sets must carry grids with a
/// common cell size. Exact, identical to hausdorff_bruteforce up to rounding.
inline double hausdorff_grid(const PointSet& a, const PointSet& b, unsigned threads = 1) {
  require_nonempty(a, b);
  if (!a.grid() || !b.grid()) throw precondition_violation("both point sets need a grid index");
  if (a.grid()->cell_size() != b.grid()->cell_size())
    throw precondition_violation("grid cell sizes differ");
  return std::max(directed_hausdorff_grid(a, b, threads), directed_hausdorff_grid(b, a, threads));
}

/// Cell size for indexing a pair of sets. Starts from N^{1/D} cells per
/// axis of the joint bounding box and halves while the larger set averages
/// more than a handful of points per occupied cell, so sets of low intrinsic
/// dimension in many coordinates still get fine cells.
inline double auto_grid_cell(const PointSet& a, const PointSet& b) {
  const std::size_t dim = a.dim();
  double extent = 0;
  for (std::size_t c = 0; c < dim; ++c) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const PointSet* s : {&a, &b})
      for (std::size_t i = 0; i < s->size(); ++i) {
        lo = std::min(lo, s->point(i)[c]);
        hi = std::max(hi, s->point(i)[c]);
      }
    extent = std::max(extent, hi - lo);
  }
  if (!(extent > 0)) return 1.0;
  const PointSet& big = a.size() >= b.size() ? a : b;
  const double n = static_cast<double>(big.size());
  const double per_axis = std::max(1.0, std::ceil(std::pow(n, 1.0 / static_cast<double>(dim))));
  double cell = extent / per_axis;

  constexpr double target_occupancy = 4;
  CellKey key;
  std::unordered_set<std::size_t> occupied;
  std::size_t previous = 0;
  for (int step = 0; step < 60; ++step) {
    occupied.clear();
    for (std::size_t i = 0; i < big.size(); ++i) {
      cell_of(big.point(i), cell, key);
      occupied.insert(CellKeyHash{}(key));
    }
    // stop once refining no longer separates points (duplicates)
    if (step > 0 && static_cast<double>(occupied.size()) < 1.2 * static_cast<double>(previous)) {
      cell *= 2;
      break;
    }
    if (n / static_cast<double>(occupied.size()) <= target_occupancy) break;
    previous = occupied.size();
    cell /= 2;
  }

  // cells narrower than the typical cross distance push queries past the
  // neighbouring block; widen to a few times the largest nearest distance
  // of a sample
  constexpr std::size_t probes = 32;
  double widest = 0;
  for (const auto& [from, to] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
    const std::size_t stride = std::max<std::size_t>(1, from->size() / probes);
    for (std::size_t i = 0; i < from->size(); i += stride) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < to->size(); ++j)
        nearest = std::min(nearest, squared_distance(from->point(i), to->point(j)));
      widest = std::max(widest, nearest);
    }
  }
  return std::max(cell, 4 * std::sqrt(widest));
}

/// Hausdorff distance with grids built on demand.
inline double hausdorff(const PointSet& a, const PointSet& b, unsigned threads = 1) {
  require_nonempty(a, b);
  const double cell = auto_grid_cell(a, b);
  return hausdorff_grid(a.with_grid(cell), b.with_grid(cell), threads);
}

/// Displacement bound of decimate: half the diagonal of a D-cube of side `cell`.
inline double decimation_slack(double cell, std::size_t dim) {
  return cell * std::sqrt(static_cast<double>(dim)) / 2.0;
}

/// One point per occupied grid cell, placed at the cell center. Output is
/// sorted by cell, so it does not depend on the input order.
inline PointSet decimate(const PointSet& a, double cell) {
  if (!(cell > 0)) throw precondition_violation("decimation cell must be positive");
  const std::size_t dim = a.dim();
  const std::size_t count = a.size();
  std::vector<std::int64_t> keys(count * dim);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t c = 0; c < dim; ++c) keys[i * dim + c] = cell_coord(a.point(i)[c], cell);

  auto key = [&](std::size_t i) { return std::span<const std::int64_t>(keys).subspan(i * dim, dim); };
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    auto kx = key(x), ky = key(y);
    return std::lexicographical_compare(kx.begin(), kx.end(), ky.begin(), ky.end());
  });

  std::vector<double> out;
  for (std::size_t r = 0; r < count; ++r) {
    if (r > 0 && std::ranges::equal(key(order[r]), key(order[r - 1]))) continue;
    for (std::int64_t v : key(order[r])) out.push_back((static_cast<double>(v) + 0.5) * cell);
  }
  return PointSet(a.algebra(), a.k(), std::move(out));
}

}  // namespace hifs
