#pragma once

/**
 * @file scene.hpp
 * @brief JSON scene files: an algebra, named map families, a schedule, an
 * engine configuration and a list of outputs.
 *
 * Paravectors are arrays of n+1 numbers [x0, ..., xn]. A minimal scene:
 *
 *   { "algebra": {"kind": "real"}, "k": 1,
 *     "families": {"F": [{"type": "right-affine", "H": [[[0.5]]], "b": [[0]]}]},
 *     "outputs": [{"type": "csv", "path": "points.csv"}] }
 */

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hifs/ifs.hpp"
#include "hifs/trajectory.hpp"

namespace hifs {

using json = nlohmann::ordered_json;

enum class EngineMode { deterministic, chaos, backward_sets, backward_points };

inline const char* to_string(EngineMode m) {
  switch (m) {
    case EngineMode::deterministic: return "deterministic";
    case EngineMode::chaos: return "chaos";
    case EngineMode::backward_sets: return "backward-sets";
    default: return "backward-points";
  }
}

inline bool is_stochastic(EngineMode m) {
  return m == EngineMode::chaos || m == EngineMode::backward_points;
}
inline bool is_backward(EngineMode m) {
  return m == EngineMode::backward_sets || m == EngineMode::backward_points;
}

struct FamilySpec {
  std::string name;
  std::vector<MapDesc> maps;
  bool operator==(const FamilySpec&) const = default;
};

struct ScheduleSpec {
  std::optional<std::string> stationary;
  std::vector<std::pair<std::string, std::size_t>> blocks;
  bool operator==(const ScheduleSpec&) const = default;
};

struct EngineSpec {
  EngineMode mode = EngineMode::deterministic;
  double tol = 1e-3;
  double cell = 0.01;
  std::size_t samples = 100000;
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> depth;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::size_t max_iter = 1000;
  bool operator==(const EngineSpec&) const = default;
};

enum class OutputType { pgm, csv };

struct OutputSpec {
  OutputType type = OutputType::csv;
  std::vector<std::size_t> axes;             ///< empty for csv means all D coordinates
  std::size_t width = 512;
  std::size_t height = 512;
  std::optional<std::array<double, 4>> window;  ///< xmin, xmax, ymin, ymax
  std::string path;
  std::optional<std::size_t> depth;          ///< backward modes only
  bool operator==(const OutputSpec&) const = default;
};

struct SceneConfig {
  AlgebraKind algebra;
  std::size_t k = 1;
  std::vector<FamilySpec> families;
  ScheduleSpec schedule;
  EngineSpec engine;
  std::vector<OutputSpec> outputs;

  std::size_t dim() const { return algebra.paravector_dim() * k; }
  const FamilySpec* family(std::string_view name) const {
    for (const auto& f : families)
      if (f.name == name) return &f;
    return nullptr;
  }
  bool operator==(const SceneConfig&) const = default;
};

namespace detail {

// A JSON node paired with its field path for diagnostics.
struct Field {
  const json& node;
  std::string path;

  [[noreturn]] void fail(const std::string& what) const { throw scene_error(path, what); }

  Field operator[](std::string_view key) const {
    if (!node.is_object()) fail("expected an object");
    auto it = node.find(std::string(key));
    if (it == node.end()) throw scene_error(join(key), "missing required field");
    return {*it, join(key)};
  }
  Field operator[](std::size_t i) const { return {node.at(i), path + "[" + std::to_string(i) + "]"}; }

  bool has(std::string_view key) const { return node.is_object() && node.contains(std::string(key)); }
  std::string join(std::string_view key) const {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

  const json& array(std::optional<std::size_t> expected = std::nullopt) const {
    if (!node.is_array()) fail("expected an array");
    if (expected && node.size() != *expected)
      fail("expected " + std::to_string(*expected) + " elements, got " + std::to_string(node.size()));
    return node;
  }
  double number() const {
    if (!node.is_number()) fail("expected a number");
    return node.get<double>();
  }
  std::size_t count() const {
    if (!node.is_number_unsigned() && !(node.is_number_integer() && node.get<std::int64_t>() >= 0))
      fail("expected a nonnegative integer");
    return node.get<std::size_t>();
  }
  std::string text() const {
    if (!node.is_string()) fail("expected a string");
    return node.get<std::string>();
  }
  bool boolean() const {
    if (!node.is_boolean()) fail("expected true or false");
    return node.get<bool>();
  }
};

inline Paravector read_paravector(const Field& f, const AlgebraKind& alg) {
  const json& arr = f.array(alg.paravector_dim());
  std::vector<double> coeffs;
  for (std::size_t i = 0; i < arr.size(); ++i) coeffs.push_back(f[i].number());
  return Paravector(alg, std::move(coeffs));
}

inline Paravector read_paravector_or_zero(const Field& parent, std::string_view key, const AlgebraKind& alg) {
  return parent.has(key) ? read_paravector(parent[key], alg) : Paravector(alg);
}

inline MapDesc read_map(const Field& f, const AlgebraKind& alg, std::size_t k) {
  const std::string type = f["type"].text();
  if (type == "right-affine") {
    Field h = f["H"];
    h.array(k);
    HMatrix linear(alg, k);
    for (std::size_t i = 0; i < k; ++i) {
      h[i].array(k);
      for (std::size_t j = 0; j < k; ++j) linear.set(i, j, read_paravector(h[i][j], alg));
    }
    HVector b(alg, k);
    if (f.has("b")) {
      Field bf = f["b"];
      bf.array(k);
      for (std::size_t i = 0; i < k; ++i) b.set_entry(i, read_paravector(bf[i], alg));
    }
    return RightAffineMap{std::move(linear), std::move(b)};
  }
  if (type == "sandwich") {
    Field comps = f["components"];
    comps.array(k);
    SandwichMap m;
    for (std::size_t i = 0; i < k; ++i) {
      Field c = comps[i];
      SandwichComponent comp{{}, read_paravector_or_zero(c, "translation", alg)};
      Field terms = c["terms"];
      terms.array();
      for (std::size_t t = 0; t < terms.node.size(); ++t) {
        Field term = terms[t];
        SandwichTerm st{read_paravector(term["left"], alg), term.has("source") ? term["source"].count() : 0,
                        read_paravector(term["right"], alg)};
        if (st.source >= k) term["source"].fail("source component must be < k");
        comp.terms.push_back(std::move(st));
      }
      m.components.push_back(std::move(comp));
    }
    return m;
  }
  if (type == "scalar-poly") {
    if (alg != AlgebraKind::real()) f["type"].fail("scalar-poly maps need the real algebra kind");
    Field comps = f["components"];
    comps.array(k);
    ScalarPolyMap m;
    for (std::size_t i = 0; i < k; ++i) {
      Field c = comps[i];
      c.array();
      std::vector<Monomial> poly;
      for (std::size_t t = 0; t < c.node.size(); ++t) {
        Field term = c[t];
        Monomial mono{term["coeff"].number(), {}};
        Field powers = term["powers"];
        powers.array(k);
        for (std::size_t p = 0; p < k; ++p) mono.powers.push_back(static_cast<unsigned>(powers[p].count()));
        poly.push_back(std::move(mono));
      }
      m.components.push_back(std::move(poly));
    }
    m.assume_contractive = f.has("assume_contractive") && f["assume_contractive"].boolean();
    if (!m.assume_contractive)
      f.fail("scalar-poly map is not certifiable; set \"assume_contractive\": true to accept it");
    if (f.has("contraction_factor")) {
      const double c = f["contraction_factor"].number();
      if (!(c >= 0 && c < 1)) f["contraction_factor"].fail("must lie in [0, 1)");
      m.contraction_factor = c;
    }
    if (f.has("region")) {
      Field r = f["region"];
      Box box;
      for (const char* side : {"lo", "hi"}) {
        Field s = r[side];
        s.array(k);
        for (std::size_t c = 0; c < k; ++c) (side[0] == 'l' ? box.lo : box.hi).push_back(s[c].number());
      }
      for (std::size_t c = 0; c < k; ++c)
        if (!(box.hi[c] > box.lo[c])) r.fail("degenerate region");
      m.region = std::move(box);
    }
    if (!m.contraction_factor && !m.region) f.fail("scalar-poly map needs contraction_factor or region");
    return m;
  }
  f["type"].fail("unknown map type '" + type + "'");
}

inline AlgebraKind read_algebra(const Field& f) {
  const std::string kind = f["kind"].text();
  if (kind == "quaternion") return AlgebraKind::quaternion();
  if (kind == "real") return AlgebraKind::real();
  if (kind == "clifford") {
    const std::size_t n = f["n"].count();
    if (n > max_generators) f["n"].fail("at most " + std::to_string(max_generators) + " generators supported");
    return AlgebraKind::clifford(static_cast<unsigned>(n));
  }
  f["kind"].fail("unknown algebra kind '" + kind + "'");
}

inline EngineMode read_mode(const Field& f) {
  const std::string m = f.text();
  if (m == "deterministic") return EngineMode::deterministic;
  if (m == "chaos") return EngineMode::chaos;
  if (m == "backward-sets") return EngineMode::backward_sets;
  if (m == "backward-points") return EngineMode::backward_points;
  f.fail("unknown engine mode '" + m + "'");
}

inline std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line, column = 1;
    else ++column;
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace detail

/// Cross-field checks shared by parsing and programmatic construction.
inline void validate_scene(const SceneConfig& c) {
  if (c.k == 0) throw scene_error("k", "must be positive");
  if (c.families.empty()) throw scene_error("families", "at least one family required");
  for (const auto& f : c.families)
    if (f.maps.empty()) throw scene_error("families." + f.name, "family has no maps");

  const auto& s = c.schedule;
  if (s.stationary && !s.blocks.empty())
    throw scene_error("schedule", "give either 'stationary' or 'blocks', not both");
  if (s.stationary && !c.family(*s.stationary))
    throw scene_error("schedule.stationary", "unknown family '" + *s.stationary + "'");
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    const std::string where = "schedule.blocks[" + std::to_string(i) + "]";
    if (!c.family(s.blocks[i].first)) throw scene_error(where + ".family", "unknown family '" + s.blocks[i].first + "'");
    if (s.blocks[i].second == 0) throw scene_error(where + ".repeat", "must be positive");
  }
  if (!s.stationary && s.blocks.empty() && c.families.size() > 1)
    throw scene_error("schedule", "required when more than one family is defined");
  if (!is_backward(c.engine.mode) && !s.blocks.empty())
    throw scene_error("engine.mode", std::string(to_string(c.engine.mode)) + " needs a stationary schedule");

  if (!(c.engine.tol > 0)) throw scene_error("engine.tol", "must be positive");
  if (!(c.engine.cell > 0)) throw scene_error("engine.cell", "must be positive");
  if (c.engine.threads == 0) throw scene_error("engine.threads", "must be positive");
  if (is_stochastic(c.engine.mode) && !c.engine.seed)
    throw scene_error("engine.seed", "required for stochastic engine modes");

  const std::size_t dim = c.dim();
  for (std::size_t i = 0; i < c.outputs.size(); ++i) {
    const auto& o = c.outputs[i];
    const std::string where = "outputs[" + std::to_string(i) + "]";
    if (o.path.empty()) throw scene_error(where + ".path", "must not be empty");
    if (o.type == OutputType::pgm && o.axes.size() != 2)
      throw scene_error(where + ".axes", "pgm output needs exactly two axes");
    for (std::size_t a = 0; a < o.axes.size(); ++a)
      if (o.axes[a] >= dim)
        throw scene_error(where + ".axes[" + std::to_string(a) + "]",
                          "axis " + std::to_string(o.axes[a]) + " out of range for D = " + std::to_string(dim));
    if (o.type == OutputType::pgm && (o.width == 0 || o.height == 0))
      throw scene_error(where, "width and height must be positive");
    if (o.window && !((*o.window)[1] > (*o.window)[0] && (*o.window)[3] > (*o.window)[2]))
      throw scene_error(where + ".window", "window is degenerate");
    if (o.depth && !is_backward(c.engine.mode))
      throw scene_error(where + ".depth", "only meaningful for backward engine modes");
  }
}

/// Parses and validates a scene. Every failure is a scene_error naming the
/// field path or text position.
inline SceneConfig parse_scene(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw scene_error(detail::position_of(text, e.byte == 0 ? 0 : e.byte - 1), "malformed JSON");
  }
  const detail::Field top{root, ""};
  if (!root.is_object()) top.fail("scene must be a JSON object");

  SceneConfig c;
  c.algebra = detail::read_algebra(top["algebra"]);
  c.k = top["k"].count();
  if (c.k == 0) top["k"].fail("must be positive");

  const detail::Field fams = top["families"];
  if (!fams.node.is_object() || fams.node.empty()) fams.fail("expected a nonempty object of named map lists");
  for (auto it = fams.node.begin(); it != fams.node.end(); ++it) {
    const detail::Field list{it.value(), fams.join(it.key())};
    list.array();
    FamilySpec fam{it.key(), {}};
    if (list.node.empty()) list.fail("family has no maps");
    for (std::size_t i = 0; i < list.node.size(); ++i) {
      try {
        fam.maps.push_back(detail::read_map(list[i], c.algebra, c.k));
      } catch (const scene_error&) {
        throw;
      } catch (const error& e) {
        list[i].fail(e.what());
      }
    }
    c.families.push_back(std::move(fam));
  }

  if (top.has("schedule")) {
    const detail::Field s = top["schedule"];
    if (s.has("stationary")) c.schedule.stationary = s["stationary"].text();
    if (s.has("blocks")) {
      const detail::Field blocks = s["blocks"];
      blocks.array();
      for (std::size_t i = 0; i < blocks.node.size(); ++i)
        c.schedule.blocks.emplace_back(blocks[i]["family"].text(), blocks[i]["repeat"].count());
    }
    if (!c.schedule.stationary && c.schedule.blocks.empty()) s.fail("expected 'stationary' or 'blocks'");
  }

  if (top.has("engine")) {
    const detail::Field e = top["engine"];
    if (e.has("mode")) c.engine.mode = detail::read_mode(e["mode"]);
    if (e.has("tol")) c.engine.tol = e["tol"].number();
    if (e.has("cell")) c.engine.cell = e["cell"].number();
    if (e.has("samples")) c.engine.samples = e["samples"].count();
    if (e.has("burn_in")) c.engine.burn_in = e["burn_in"].count();
    if (e.has("depth")) c.engine.depth = e["depth"].count();
    if (e.has("seed")) c.engine.seed = e["seed"].count();
    if (e.has("threads")) c.engine.threads = static_cast<unsigned>(e["threads"].count());
    if (e.has("max_iter")) c.engine.max_iter = e["max_iter"].count();
  }

  if (top.has("outputs")) {
    const detail::Field outs = top["outputs"];
    outs.array();
    for (std::size_t i = 0; i < outs.node.size(); ++i) {
      const detail::Field o = outs[i];
      OutputSpec spec;
      const std::string type = o["type"].text();
      if (type == "pgm") spec.type = OutputType::pgm;
      else if (type == "csv") spec.type = OutputType::csv;
      else o["type"].fail("unknown output type '" + type + "'");
      if (o.has("axes")) {
        const detail::Field axes = o["axes"];
        axes.array();
        for (std::size_t a = 0; a < axes.node.size(); ++a) spec.axes.push_back(axes[a].count());
      }
      if (o.has("width")) spec.width = o["width"].count();
      if (o.has("height")) spec.height = o["height"].count();
      if (o.has("window")) {
        const detail::Field w = o["window"];
        w.array(4);
        spec.window = std::array<double, 4>{w[0].number(), w[1].number(), w[2].number(), w[3].number()};
      }
      spec.path = o["path"].text();
      if (o.has("depth")) spec.depth = o["depth"].count();
      c.outputs.push_back(std::move(spec));
    }
  }

  validate_scene(c);
  return c;
}

namespace detail {

inline json to_json(const Paravector& p) {
  json arr = json::array();
  for (double v : p.coeffs()) arr.push_back(v);
  return arr;
}

inline json to_json(const MapDesc& m) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        json out;
        if constexpr (std::is_same_v<T, RightAffineMap>) {
          out["type"] = "right-affine";
          json h = json::array();
          for (std::size_t i = 0; i < v.linear.rows(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < v.linear.cols(); ++j) row.push_back(to_json(v.linear.at(i, j)));
            h.push_back(std::move(row));
          }
          out["H"] = std::move(h);
          json b = json::array();
          for (std::size_t i = 0; i < v.translation.k(); ++i) b.push_back(to_json(v.translation.entry(i)));
          out["b"] = std::move(b);
        } else if constexpr (std::is_same_v<T, SandwichMap>) {
          out["type"] = "sandwich";
          json comps = json::array();
          for (const auto& c : v.components) {
            json terms = json::array();
            for (const auto& t : c.terms)
              terms.push_back({{"left", to_json(t.left)}, {"source", t.source}, {"right", to_json(t.right)}});
            comps.push_back({{"terms", std::move(terms)}, {"translation", to_json(c.translation)}});
          }
          out["components"] = std::move(comps);
        } else {
          out["type"] = "scalar-poly";
          json comps = json::array();
          for (const auto& c : v.components) {
            json terms = json::array();
            for (const auto& t : c) terms.push_back({{"coeff", t.coeff}, {"powers", t.powers}});
            comps.push_back(std::move(terms));
          }
          out["components"] = std::move(comps);
          out["assume_contractive"] = v.assume_contractive;
          if (v.contraction_factor) out["contraction_factor"] = *v.contraction_factor;
          if (v.region) out["region"] = {{"lo", v.region->lo}, {"hi", v.region->hi}};
        }
        return out;
      },
      m);
}

}  // namespace detail

inline std::string serialize_scene(const SceneConfig& c) {
  json root;
  json alg;
  switch (c.algebra.tag) {
    case AlgebraKind::Tag::quaternion: alg["kind"] = "quaternion"; break;
    case AlgebraKind::Tag::real: alg["kind"] = "real"; break;
    default: alg["kind"] = "clifford"; alg["n"] = c.algebra.n; break;
  }
  root["algebra"] = std::move(alg);
  root["k"] = c.k;
  json fams = json::object();
  for (const auto& f : c.families) {
    json list = json::array();
    for (const auto& m : f.maps) list.push_back(detail::to_json(m));
    fams[f.name] = std::move(list);
  }
  root["families"] = std::move(fams);
  if (c.schedule.stationary) {
    root["schedule"] = {{"stationary", *c.schedule.stationary}};
  } else if (!c.schedule.blocks.empty()) {
    json blocks = json::array();
    for (const auto& [name, repeat] : c.schedule.blocks) blocks.push_back({{"family", name}, {"repeat", repeat}});
    root["schedule"] = {{"blocks", std::move(blocks)}};
  }
  json e;
  e["mode"] = to_string(c.engine.mode);
  e["tol"] = c.engine.tol;
  e["cell"] = c.engine.cell;
  e["samples"] = c.engine.samples;
  if (c.engine.burn_in) e["burn_in"] = *c.engine.burn_in;
  if (c.engine.depth) e["depth"] = *c.engine.depth;
  if (c.engine.seed) e["seed"] = *c.engine.seed;
  e["threads"] = c.engine.threads;
  e["max_iter"] = c.engine.max_iter;
  root["engine"] = std::move(e);
  json outs = json::array();
  for (const auto& o : c.outputs) {
    json out;
    out["type"] = o.type == OutputType::pgm ? "pgm" : "csv";
    if (!o.axes.empty()) out["axes"] = o.axes;
    if (o.type == OutputType::pgm) {
      out["width"] = o.width;
      out["height"] = o.height;
    }
    if (o.window) out["window"] = *o.window;
    out["path"] = o.path;
    if (o.depth) out["depth"] = *o.depth;
    outs.push_back(std::move(out));
  }
  root["outputs"] = std::move(outs);
  return root.dump(2) + "\n";
}

}  // namespace hifs
