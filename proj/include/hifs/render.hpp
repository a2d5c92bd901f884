#pragma once

/**
 * @file render.hpp
 * @brief Coordinate projections, density rasters and the PGM/CSV writers.
 *
 * Both file formats are byte-stable: identical inputs give identical bytes.
 */

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hifs/point_set.hpp"

namespace hifs {

/// Points in a low-dimensional coordinate subspace, stored row-major.
struct ProjectedCloud {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const { return std::span(coords).subspan(i * dim, dim); }
};

/// Selects the given flat coordinates of every point, order preserved.
inline ProjectedCloud project(const PointSet& p, std::span<const std::size_t> axes) {
  for (std::size_t a : axes)
    if (a >= p.dim()) throw shape_mismatch("projection axis " + std::to_string(a) + " >= D");
  ProjectedCloud out{axes.size(), {}};
  out.coords.reserve(p.size() * axes.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t a : axes) out.coords.push_back(p.point(i)[a]);
  return out;
}

struct Window {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
};

/// Per-pixel hit counts. Pixel (px, py) has py = 0 at the bottom (ymin).
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint64_t> counts;
  std::size_t dropped = 0;  ///< points outside the window

  std::uint64_t at(std::size_t px, std::size_t py) const { return counts[py * width + px]; }
  std::uint64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }
};

namespace detail {

// floor binning; the closed upper edge clamps into the last bin
inline std::size_t bin(double v, double lo, double hi, std::size_t n) {
  const double t = (v - lo) / (hi - lo) * static_cast<double>(n);
  return std::min(static_cast<std::size_t>(std::floor(t)), n - 1);
}

}  // namespace detail

inline Raster rasterize(const ProjectedCloud& points, std::size_t width, std::size_t height, const Window& w) {
  if (points.dim != 2) throw shape_mismatch("rasterize needs two-dimensional points");
  if (width == 0 || height == 0) throw precondition_violation("raster must have positive size");
  if (!(w.xmax > w.xmin) || !(w.ymax > w.ymin)) throw precondition_violation("degenerate window");
  Raster r{width, height, std::vector<std::uint64_t>(width * height, 0), 0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points.point(i)[0], y = points.point(i)[1];
    if (!(x >= w.xmin && x <= w.xmax && y >= w.ymin && y <= w.ymax)) {
      ++r.dropped;
      continue;
    }
    ++r.counts[detail::bin(y, w.ymin, w.ymax, height) * width + detail::bin(x, w.xmin, w.xmax, width)];
  }
  return r;
}

/// Binary P5 with log-scaled density: round(255 log(1+c) / log(1+cmax)),
/// rows top (ymax) to bottom.
inline std::string format_pgm(const Raster& r) {
  std::string out = "P5\n" + std::to_string(r.width) + " " + std::to_string(r.height) + "\n255\n";
  const std::uint64_t cmax = r.counts.empty() ? 0 : *std::max_element(r.counts.begin(), r.counts.end());
  const double scale = cmax == 0 ? 0.0 : 255.0 / std::log1p(static_cast<double>(cmax));
  out.reserve(out.size() + r.width * r.height);
  for (std::size_t row = 0; row < r.height; ++row) {
    const std::size_t py = r.height - 1 - row;
    for (std::size_t px = 0; px < r.width; ++px) {
      const double v = std::round(scale * std::log1p(static_cast<double>(r.at(px, py))));
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0.0, 255.0))));
    }
  }
  return out;
}

namespace detail {

inline void append_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

inline std::string format_rows(std::span<const double> coords, std::size_t dim) {
  const std::size_t n = dim == 0 ? 0 : coords.size() / dim;
  auto row = [&](std::size_t i) { return coords.subspan(i * dim, dim); };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ra = row(a), rb = row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  std::string out;
  for (std::size_t i : order) {
    for (std::size_t c = 0; c < dim; ++c) {
      if (c) out.push_back(',');
      append_number(out, row(i)[c]);
    }
    out.push_back('\n');
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw io_error("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw io_error("failed writing " + path.string());
}

}  // namespace detail

/// One row per point, comma-separated, 17 significant digits, no header,
/// rows in lexicographic order of their coordinates.
inline std::string format_csv(const PointSet& p) { return detail::format_rows(p.coords(), p.dim()); }
inline std::string format_csv(const ProjectedCloud& p) { return detail::format_rows(p.coords, p.dim); }

inline void write_pgm(const Raster& r, const std::filesystem::path& path) { detail::write_file(path, format_pgm(r)); }
inline void write_csv(const PointSet& p, const std::filesystem::path& path) { detail::write_file(path, format_csv(p)); }
inline void write_csv(const ProjectedCloud& p, const std::filesystem::path& path) {
  detail::write_file(path, format_csv(p));
}

}  // namespace hifs
