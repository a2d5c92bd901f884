#pragma once

/**
 * @file run.hpp
 * @brief Executes a scene: build the families, certify them, run the
 * selected engine and write the requested outputs.
 */

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hifs/render.hpp"
#include "hifs/scene.hpp"

namespace hifs {

/// Realifies every family and assembles the schedule.
inline Schedule build_schedule(const SceneConfig& c) {
  std::vector<std::string> names;
  std::vector<HIFS> families;
  for (const auto& f : c.families) {
    names.push_back(f.name);
    std::vector<ContractionMap> maps;
    for (std::size_t i = 0; i < f.maps.size(); ++i) {
      try {
        maps.emplace_back(f.maps[i]);
      } catch (const error& e) {
        throw scene_error("families." + f.name + "[" + std::to_string(i) + "]", e.what());
      }
    }
    families.emplace_back(c.algebra, c.k, std::move(maps));
  }
  auto index_of = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
  };
  if (!c.schedule.blocks.empty()) {
    std::vector<ScheduleBlock> blocks;
    for (const auto& [name, repeat] : c.schedule.blocks) blocks.push_back({index_of(name), repeat});
    return Schedule::block_periodic(std::move(names), std::move(families), std::move(blocks));
  }
  const std::size_t idx = c.schedule.stationary ? index_of(*c.schedule.stationary) : 0;
  return Schedule::stationary(names[idx], families[idx]);
}

inline std::optional<InvariantBall> try_invariant_ball(const Schedule& s) {
  try {
    return schedule_invariant_ball(s);
  } catch (const error&) {
    return std::nullopt;
  }
}

/// Lipschitz constants per map and family, the invariant ball and, for
/// non-stationary schedules, the summability verdict.
inline json lipschitz_summary(const Schedule& s) {
  json out;
  json per_family = json::object();
  json family_h = json::object();
  for (std::size_t f = 0; f < s.families().size(); ++f) {
    json maps = json::array();
    for (const auto& m : s.families()[f].maps()) {
      json entry{{"value", m.lip()}, {"certified", m.certified()}};
      if (m.sampled_estimate()) entry["sampled_estimate"] = m.sampled_estimate()->value;
      if (!m.certified()) entry["flag"] = "estimate";
      maps.push_back(std::move(entry));
    }
    per_family[s.names()[f]] = std::move(maps);
    family_h[s.names()[f]] = s.families()[f].h();
  }
  out["lipschitz"] = std::move(per_family);
  out["family_lipschitz"] = std::move(family_h);
  const auto ball = try_invariant_ball(s);
  out["s"] = ball ? json(ball->s) : json(nullptr);
  out["M"] = ball ? json(ball->M) : json(nullptr);
  out["r"] = ball ? json(ball->r) : json(nullptr);
  if (!s.is_stationary()) {
    const auto rep = summability_report(s, std::max<std::size_t>(s.period(), 1));
    out["summability"] = {{"verdict", to_string(rep.verdict)},
                          {"period_product", rep.period_product},
                          {"total_bound", rep.geometric_tail ? json(rep.total_bound()) : json(nullptr)}};
  }
  return out;
}

namespace detail {

inline Window default_window(const std::optional<InvariantBall>& ball, const ProjectedCloud& pts) {
  if (ball && ball->r > 0) return {-ball->r, ball->r, -ball->r, ball->r};
  Window w{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    w.xmin = std::min(w.xmin, pts.point(i)[0]);
    w.xmax = std::max(w.xmax, pts.point(i)[0]);
    w.ymin = std::min(w.ymin, pts.point(i)[1]);
    w.ymax = std::max(w.ymax, pts.point(i)[1]);
  }
  if (!(w.xmax > w.xmin)) w.xmin -= 0.5, w.xmax += 0.5;
  if (!(w.ymax > w.ymin)) w.ymin -= 0.5, w.ymax += 0.5;
  return w;
}

}  // namespace detail

/// Runs the scene and writes outputs under out_dir. Returns the report with
/// keys lipschitz, s, M, r, residual, tail_bound, iterations, dropped_points
/// (null where the engine does not produce the quantity).
inline json run_scene(const SceneConfig& c, const std::filesystem::path& out_dir) {
  validate_scene(c);
  const Schedule s = build_schedule(c);
  json report = lipschitz_summary(s);
  report["mode"] = to_string(c.engine.mode);
  report["residual"] = nullptr;
  report["tail_bound"] = nullptr;
  report["iterations"] = nullptr;
  report["dropped_points"] = 0;

  for (const HIFS* f : s.referenced()) f->require_contractive();
  const auto ball = try_invariant_ball(s);
  const auto& e = c.engine;
  const std::size_t dim = c.dim();
  const PointSet origin = PointSet::singleton(HVector(c.algebra, c.k));

  // engine output keyed by depth (0 for stationary modes)
  std::map<std::size_t, PointSet> results;

  switch (e.mode) {
    case EngineMode::deterministic: {
      const auto res = attractor_deterministic(s.families()[0], origin, e.tol, e.cell, e.max_iter, e.threads);
      report["residual"] = res.report.residual;
      report["iterations"] = res.report.iterations;
      report["bound"] = res.report.bound;
      report["points"] = res.set.size();
      results.emplace(0, res.set);
      break;
    }
    case EngineMode::chaos: {
      const HIFS& fam = s.families()[0];
      std::size_t burn_in = 0;
      if (e.burn_in) burn_in = *e.burn_in;
      else if (ball) burn_in = default_burn_in(fam.h(), ball->r, e.cell);
      else throw precondition_violation("engine.burn_in is required when no invariant radius is available");
      report["burn_in"] = burn_in;
      report["samples"] = e.samples;
      if (ball) report["bound"] = std::pow(fam.h(), static_cast<double>(burn_in)) * ball->r;
      results.emplace(0, attractor_chaos(fam, e.samples, burn_in, *e.seed, e.threads));
      break;
    }
    case EngineMode::backward_sets:
    case EngineMode::backward_points: {
      if (!ball) throw precondition_violation("backward engines need linear contractive families");
      const double diameter = 2 * ball->r;
      const std::size_t default_depth = e.depth ? *e.depth : depth_for_tolerance(s, diameter, e.tol);
      std::set<std::size_t> depths{default_depth};
      for (const auto& o : c.outputs)
        if (o.depth) depths.insert(*o.depth);
      json levels = json::array();
      double worst = 0;
      for (std::size_t depth : depths) {
        json level{{"depth", depth}};
        if (e.mode == EngineMode::backward_sets) {
          auto res = backward_attractor_sets(s, origin, depth, e.cell, e.threads);
          level["tail_bound"] = res.tail_bound;
          level["points"] = res.set.size();
          worst = std::max(worst, res.tail_bound);
          results.emplace(depth, std::move(res.set));
        } else {
          const auto rep = summability_report(s, std::max<std::size_t>(depth, 1));
          const double bound = rep.product(depth) * diameter;
          level["tail_bound"] = bound;
          worst = std::max(worst, bound);
          results.emplace(depth, backward_attractor_points(s, depth, e.samples, *e.seed, e.threads));
        }
        levels.push_back(std::move(level));
      }
      report["depth"] = default_depth;
      report["levels"] = std::move(levels);
      report["tail_bound"] = worst;
      // outputs without an explicit depth use the default depth
      if (default_depth != 0) results.insert_or_assign(0, PointSet(results.at(default_depth)));
      break;
    }
  }

  std::size_t dropped = 0;
  json written = json::array();
  for (const auto& o : c.outputs) {
    const PointSet& set = results.at(o.depth.value_or(0));
    std::vector<std::size_t> axes = o.axes;
    if (axes.empty())
      for (std::size_t a = 0; a < dim; ++a) axes.push_back(a);
    const ProjectedCloud cloud = project(set, axes);
    const auto path = out_dir / o.path;
    if (o.type == OutputType::csv) {
      write_csv(cloud, path);
    } else {
      const Window w = o.window ? Window{(*o.window)[0], (*o.window)[1], (*o.window)[2], (*o.window)[3]}
                                : detail::default_window(ball, cloud);
      const Raster r = rasterize(cloud, o.width, o.height, w);
      dropped += r.dropped;
      write_pgm(r, path);
    }
    written.push_back(path.string());
  }
  report["dropped_points"] = dropped;
  report["outputs"] = std::move(written);
  return report;
}

}  // namespace hifs
