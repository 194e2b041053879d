#pragma once

// JSON reports and property files.

#include <string>

#include <json.hpp>

#include "nnverify/coverage.hpp"
#include "nnverify/interval.hpp"
#include "nnverify/opmodel.hpp"
#include "nnverify/verifier.hpp"

namespace nnverify {

using json = nlohmann::json;

json to_json(const FxpFormat &fmt);
json to_json(const ActivationTrace &t);
json to_json(const FxpTrace &t);
json to_json(const LayerBounds &b);
json to_json(const ConformanceReport &r);
json to_json(const CoverageReport &r);
json to_json(const Statistics &s);
json to_json(const Counterexample &cx);
json to_json(const Verdict &v);

/// A property together with the region it quantifies over.
struct PropertySpec {
  Property property;
  Region region;
  std::string description;
};

/// Reads a property file. Keys:
///   type: "adversarial" | "output_threshold" | "coverage_goal"
///   base_input: array or path of a PGM image (relative to the file)
///   gamma, expected_class, threshold_V          (adversarial)
///   layer and neuron (0-based; layer defaults to the last), bound,
///   relation "ge"/"le"                          (output_threshold)
///   method, p, d, v, distance                   (coverage_goal)
///   box: [[lo,hi], ...] (default: the point base_input, or [0,1] for
///   adversarial), grid_step: number or array.
PropertySpec parse_property(const json &j, const std::string &base_dir = ".");
PropertySpec load_property(const std::string &path);

} // namespace nnverify
