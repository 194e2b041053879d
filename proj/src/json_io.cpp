#include "nnverify/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "nnverify/bench_data.hpp"
#include "nnverify/error.hpp"

namespace nnverify {

namespace {

json opt_class(const std::optional<std::size_t> &c) {
  return c ? json(*c) : json(nullptr);
}

json exact_matrix(const std::vector<std::vector<std::int64_t>> &raw, int frac) {
  json out = json::array();
  for (const auto &row : raw) {
    json r = json::array();
    for (auto v : row)
      r.push_back(static_cast<double>(std::ldexp(static_cast<long double>(v), -frac)));
    out.push_back(std::move(r));
  }
  return out;
}

json intervals(const std::vector<std::vector<Interval>> &rows) {
  json out = json::array();
  for (const auto &row : rows) {
    json r = json::array();
    for (const auto &iv : row)
      r.push_back({iv.lo, iv.hi});
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace

json to_json(const FxpFormat &fmt) {
  return {{"text", fmt.to_string()},
          {"int_bits", fmt.int_bits()},
          {"frac_bits", fmt.frac_bits()},
          {"sign_in_int_bits", true}};
}

json to_json(const ActivationTrace &t) {
  return {{"input", t.input}, {"potentials", t.potentials}, {"outputs", t.outputs}};
}

json to_json(const FxpTrace &t) {
  const int f = t.format.frac_bits();
  return {{"format", t.format.to_string()},
          {"input_raw", t.input_raw},
          {"potentials_raw", t.potentials},
          {"outputs_raw", t.outputs},
          {"potentials", exact_matrix(t.potentials, f)},
          {"outputs", exact_matrix(t.outputs, f)},
          {"saturation_events", t.saturation_events}};
}

json to_json(const LayerBounds &b) {
  return {{"potentials", intervals(b.potentials)}, {"outputs", intervals(b.outputs)}};
}

json to_json(const ConformanceReport &r) {
  json per = json::array();
  for (const auto &e : r.per_input)
    per.push_back({{"input", e.input},
                   {"max_abs_dev", e.max_abs_dev},
                   {"mean_abs_dev", e.mean_abs_dev},
                   {"class_float", opt_class(e.class_float)},
                   {"class_fxp", opt_class(e.class_fxp)},
                   {"saturation_events", e.saturation_events}});
  return {{"format", r.format.to_string()},
          {"conversion", to_string(r.conversion)},
          {"threshold_V", r.threshold},
          {"per_input", per},
          {"summary",
           {{"inputs", r.summary.inputs},
            {"max_abs_dev", r.summary.max_abs_dev},
            {"mean_abs_dev", r.summary.mean_abs_dev},
            {"classification_flips", r.summary.classification_flips},
            {"saturation_events", r.summary.saturation_events}}}};
}

json to_json(const CoverageReport &r) {
  json pairs = json::array();
  for (const auto &p : r.covered_pairs)
    pairs.push_back({p.cond.name(), p.dec.name()});
  json neurons = json::array();
  for (const auto &n : r.covered_neurons)
    neurons.push_back(n.name());
  return {{"method", to_string(r.method)},
          {"d", r.config.d},
          {"v", r.config.v},
          {"p", r.config.p},
          {"distance", r.config.h == DistanceKind::absolute ? "absolute" : "euclidean"},
          {"input_pairs", r.input_pairs},
          {"covered_pairs", pairs},
          {"covered_neurons", neurons},
          {"total_neurons", r.total_neurons},
          {"ratio", r.ratio},
          {"literal", r.literal}};
}

json to_json(const Statistics &s) {
  return {{"nodes_explored", s.nodes_explored},
          {"nodes_pruned", s.nodes_pruned},
          {"nodes_distance_pruned", s.nodes_distance_pruned},
          {"evaluations", s.evaluations},
          {"depth_reached", s.depth_reached},
          {"full_depth", s.full_depth},
          {"iterations", s.iterations},
          {"wall_seconds", s.wall_seconds}};
}

json to_json(const Counterexample &cx) {
  json j = {{"input", cx.input},
            {"property", cx.property},
            {"float_trace", to_json(cx.float_trace)}};
  if (!cx.input_raw.empty())
    j["input_raw"] = cx.input_raw;
  if (cx.fxp_trace)
    j["fxp_trace"] = to_json(*cx.fxp_trace);
  if (cx.distance)
    j["distance"] = *cx.distance;
  if (cx.coverage)
    j["coverage"] = *cx.coverage;
  return j;
}

json to_json(const Verdict &v) {
  json j = {{"verdict", to_string(v.kind)}, {"statistics", to_json(v.stats)}};
  j["witness"] = v.witness ? to_json(*v.witness) : json(nullptr);
  if (!v.reason.empty())
    j["reason"] = v.reason;
  return j;
}

// ---------------------------------------------------------------------------

namespace {

template <class T> T get_or(const json &j, const char *key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<double> read_input(const json &j, const std::string &base_dir) {
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative())
      p = std::filesystem::path(base_dir) / p;
    return load_pgm(p.string());
  }
  return j.get<std::vector<double>>();
}

Box read_box(const json &j) {
  Box b;
  for (const auto &iv : j) {
    if (!iv.is_array() || iv.size() != 2)
      throw Error(ErrorCode::invalid_argument, "box entries must be [lo, hi]");
    b.emplace_back(iv[0].get<double>(), iv[1].get<double>());
  }
  return b;
}

} // namespace

PropertySpec parse_property(const json &j, const std::string &base_dir) {
  try {
    PropertySpec spec;
    const auto type = j.at("type").get<std::string>();
    std::optional<std::vector<double>> base;
    if (j.contains("base_input"))
      base = read_input(j.at("base_input"), base_dir);

    if (j.contains("box"))
      spec.region.box = read_box(j.at("box"));
    if (j.contains("grid_step")) {
      const auto &g = j.at("grid_step");
      if (g.is_number()) {
        const std::size_t n = spec.region.box.empty() && base
                                  ? base->size()
                                  : spec.region.box.size();
        spec.region.grid_step.assign(n, g.get<double>());
      } else {
        spec.region.grid_step = g.get<std::vector<double>>();
      }
    }

    if (type == "adversarial") {
      if (!base)
        throw Error(ErrorCode::invalid_argument, "adversarial property needs base_input");
      AdversarialRobustness p;
      p.base = *base;
      p.gamma = j.at("gamma").get<double>();
      p.expected_class = j.at("expected_class").get<std::size_t>();
      p.threshold = get_or(j, "threshold_V", 0.5);
      if (spec.region.box.empty())
        spec.region.box.assign(p.base.size(), Interval(0.0, 1.0));
      spec.region.base = p.base;
      spec.region.gamma = p.gamma;
      spec.description = "adversarial robustness of class " +
                         std::to_string(p.expected_class);
      spec.property = std::move(p);
    } else if (type == "output_threshold") {
      OutputThreshold p;
      if (j.contains("layer"))
        p.layer = j.at("layer").get<std::size_t>();
      p.neuron = j.at("neuron").get<std::size_t>();
      p.bound = j.at("bound").get<double>();
      p.relation = parse_relation(get_or<std::string>(j, "relation", "ge"));
      if (spec.region.box.empty()) {
        if (!base)
          throw Error(ErrorCode::invalid_argument,
                      "output_threshold property needs box or base_input");
        spec.region.box = point_box(*base);
      }
      if (base && j.contains("gamma")) {
        spec.region.base = base;
        spec.region.gamma = j.at("gamma").get<double>();
      }
      spec.description = "output neuron " + std::to_string(p.neuron) + " " +
                         (p.relation == Relation::ge ? ">= " : "<= ") +
                         std::to_string(p.bound);
      spec.property = std::move(p);
    } else if (type == "coverage_goal") {
      if (!base)
        throw Error(ErrorCode::invalid_argument, "coverage_goal needs base_input");
      CoverageGoal g;
      g.base = *base;
      g.method = parse_cover_method(get_or<std::string>(j, "method", "sv"));
      g.config.p = get_or(j, "p", g.config.p);
      g.config.d = get_or(j, "d", g.config.d);
      g.config.v = get_or(j, "v", g.config.v);
      if (get_or<std::string>(j, "distance", "absolute") == "euclidean")
        g.config.h = DistanceKind::euclidean;
      g.config.validate();
      if (spec.region.box.empty())
        throw Error(ErrorCode::invalid_argument, "coverage_goal needs a box");
      if (j.contains("gamma")) {
        spec.region.base = g.base;
        spec.region.gamma = j.at("gamma").get<double>();
      }
      spec.description = to_string(g.method) + " coverage below " +
                         std::to_string(g.config.p);
      spec.property = std::move(g);
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown property type '" + type + "'");
    }
    return spec;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::parse_error, std::string("property file: ") + e.what());
  }
}

PropertySpec load_property(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::io_error, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
  return parse_property(j, std::filesystem::path(path).parent_path().string());
}

} // namespace nnverify
