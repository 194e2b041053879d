#pragma once

// Incremental branch-and-bound over a quantized input region. Depth k bounds
// the bisection tree; a run at depth k is the base case, and the region is
// resolved once every branch reached a single grid point or was pruned.

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nnverify/ann.hpp"
#include "nnverify/coverage.hpp"
#include "nnverify/fxp.hpp"
#include "nnverify/interval.hpp"
#include "nnverify/opmodel.hpp"

namespace nnverify {

/// Misclassification: output[D] < V and some other output >= V.
struct AdversarialRobustness {
  std::vector<double> base;
  double gamma = 0;
  std::size_t expected_class = 0;
  double threshold = 0.5;
};

enum class Relation { le, ge };

std::string to_string(Relation r);
Relation parse_relation(std::string_view text);

/// output(layer, neuron) <= bound (or >= bound). layer is 0-based over
/// computing layers; the default targets the output layer.
struct OutputThreshold {
  std::optional<std::size_t> layer;
  std::size_t neuron = 0;
  double bound = 0;
  Relation relation = Relation::ge;
};

/// Violated when coverage(method, base, w2) >= P for some w2 in the region.
struct CoverageGoal {
  CoverMethod method = CoverMethod::sv;
  CoverConfig config;
  std::vector<double> base;
};

using Property = std::variant<AdversarialRobustness, OutputThreshold, CoverageGoal>;

std::string property_kind(const Property &p);

struct Region {
  Box box;
  /// Optional coarser grid per input (0 = every representable value).
  std::vector<double> grid_step;
  std::optional<std::vector<double>> base;
  double gamma = 0;
};

double euclidean_distance(std::span<const double> p, std::span<const double> q);
bool in_region(std::span<const double> x, const Region &r);

bool check_adversarial(std::span<const double> outputs, std::size_t expected,
                       double threshold);
bool check_adversarial(const FxpTrace &trace, const AdversarialRobustness &p);

struct VerifyConfig {
  FxpFormat format{32, 32};
  Rounding conversion = Rounding::toward_zero;
  /// Evaluate with the double-precision network instead of fixed point.
  bool float_oracle = false;
  bool use_invariants = true;
  bool parallel = false;
  std::size_t granularity = 1;
  std::optional<std::size_t> max_depth;
  std::uint64_t node_budget = 10'000'000;
};

struct Statistics {
  std::uint64_t nodes_explored = 0;
  std::uint64_t nodes_pruned = 0;
  std::uint64_t nodes_distance_pruned = 0;
  std::uint64_t evaluations = 0;
  std::size_t depth_reached = 0;
  std::size_t full_depth = 0;
  std::size_t iterations = 0;
  double wall_seconds = 0;
};

struct Counterexample {
  std::vector<double> input;
  /// Empty in float-oracle mode.
  std::vector<std::int64_t> input_raw;
  std::optional<FxpTrace> fxp_trace;
  ActivationTrace float_trace;
  std::string property;
  std::optional<double> distance;
  /// Coverage ratio reached, for coverage goals.
  std::optional<double> coverage;
};

enum class VerdictKind { safe, unsafe, unknown };

std::string to_string(VerdictKind v);
int exit_code(VerdictKind v);

struct Verdict {
  VerdictKind kind = VerdictKind::unknown;
  std::optional<Counterexample> witness;
  Statistics stats;
  std::string reason;
};

/// Grid points of one input dimension: value(i) = lo + i * step.
struct GridAxis {
  double lo = 0;
  double step = 0;
  std::uint64_t count = 1;
  /// Fixed-point axes also hold raw values with `frac` fractional bits.
  bool fixed = false;
  int frac = 0;
  std::int64_t lo_raw = 0;
  std::int64_t step_raw = 0;

  double value(std::uint64_t i) const;
  std::int64_t raw(std::uint64_t i) const {
    return lo_raw + static_cast<std::int64_t>(i) * step_raw;
  }
};

/// Axes of the region after intersecting the box with the distance ball.
/// Throws Error(infeasible_region) when some dimension holds no grid point.
std::vector<GridAxis> build_grid(const Region &region, const VerifyConfig &cfg);

/// Sum over dimensions of ceil(log2(points)).
std::size_t full_depth(const std::vector<GridAxis> &axes);

/// Depth-k search; the first violation in left-first order, if any.
std::optional<Counterexample> base_case(const Network &net, const Property &p,
                                        const Region &region, std::size_t k,
                                        const VerifyConfig &cfg);

/// True iff at depth k every branch not cut by the distance bound is a single
/// grid point.
bool forward_condition(const Network &net, const Region &region, std::size_t k,
                       const VerifyConfig &cfg);

Verdict incremental_verify(const Network &net, const Property &p,
                           const Region &region, const VerifyConfig &cfg);

/// Throws Error(invalid_argument) for a neuron or layer outside the network.
Verdict check_output_property(const Network &net, const Region &region,
                              const OutputThreshold &p, const VerifyConfig &cfg);

Verdict coverage_goal_search(const Network &net, const CoverageGoal &goal,
                             const Region &region, const VerifyConfig &cfg);

/// Region over `box` with the base input and gamma of the property.
Region adversarial_region(const AdversarialRobustness &p, Box box,
                          std::vector<double> grid_step = {});

/// Re-evaluates a witness from scratch; true iff it violates the property.
bool replay(const Network &net, const Property &p, const Counterexample &cx,
            const VerifyConfig &cfg);

} // namespace nnverify
