#include "nnverify/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>

#include "nnverify/error.hpp"
#include "nnverify/parallel.hpp"

namespace nnverify {

std::string to_string(Relation r) { return r == Relation::le ? "le" : "ge"; }

Relation parse_relation(std::string_view text) {
  if (text == "le" || text == "<=")
    return Relation::le;
  if (text == "ge" || text == ">=")
    return Relation::ge;
  throw Error(ErrorCode::invalid_argument,
              "unknown relation '" + std::string(text) + "'");
}

std::string property_kind(const Property &p) {
  switch (p.index()) {
  case 0:
    return "adversarial";
  case 1:
    return "output_threshold";
  default:
    return "coverage_goal";
  }
}

std::string to_string(VerdictKind v) {
  switch (v) {
  case VerdictKind::safe:
    return "SAFE";
  case VerdictKind::unsafe:
    return "UNSAFE";
  case VerdictKind::unknown:
    return "UNKNOWN";
  }
  return "UNKNOWN";
}

int exit_code(VerdictKind v) {
  switch (v) {
  case VerdictKind::safe:
    return 0;
  case VerdictKind::unsafe:
    return 1;
  case VerdictKind::unknown:
    return 2;
  }
  return 2;
}

double euclidean_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw Error(ErrorCode::shape_mismatch,
                "distance between vectors of length " + std::to_string(p.size()) +
                    " and " + std::to_string(q.size()));
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

bool in_region(std::span<const double> x, const Region &r) {
  if (x.size() != r.box.size())
    return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!r.box[i].contains(x[i]))
      return false;
  return !r.base || euclidean_distance(*r.base, x) <= r.gamma;
}

bool check_adversarial(std::span<const double> outputs, std::size_t expected,
                       double threshold) {
  if (expected >= outputs.size() || !(outputs[expected] < threshold))
    return false;
  for (std::size_t i = 0; i < outputs.size(); ++i)
    if (i != expected && outputs[i] >= threshold)
      return true;
  return false;
}

bool check_adversarial(const FxpTrace &trace, const AdversarialRobustness &p) {
  const std::size_t last = trace.outputs.size() - 1;
  const std::size_t n = trace.outputs[last].size();
  if (p.expected_class >= n)
    return false;
  const long double v = p.threshold;
  if (!(trace.output(last, p.expected_class) < v))
    return false;
  for (std::size_t i = 0; i < n; ++i)
    if (i != p.expected_class && trace.output(last, i) >= v)
      return true;
  return false;
}

Region adversarial_region(const AdversarialRobustness &p, Box box,
                          std::vector<double> grid_step) {
  Region r;
  r.box = std::move(box);
  r.grid_step = std::move(grid_step);
  r.base = p.base;
  r.gamma = p.gamma;
  return r;
}

// ---------------------------------------------------------------------------
// Grid

double GridAxis::value(std::uint64_t i) const {
  if (fixed)
    return static_cast<double>(
        std::ldexp(static_cast<long double>(raw(i)), -frac));
  return lo + static_cast<double>(i) * step;
}

std::vector<GridAxis> build_grid(const Region &region, const VerifyConfig &cfg) {
  const auto &box = region.box;
  if (box.empty())
    throw Error(ErrorCode::infeasible_region, "empty input box");
  if (!region.grid_step.empty() && region.grid_step.size() != box.size())
    throw Error(ErrorCode::shape_mismatch, "grid step count differs from box");
  if (region.base) {
    if (region.base->size() != box.size())
      throw Error(ErrorCode::shape_mismatch, "base input differs from box");
    if (!(region.gamma >= 0) || !std::isfinite(region.gamma))
      throw Error(ErrorCode::invalid_argument, "gamma must be finite and >= 0");
  }
  const FxpFormat fmt = cfg.format;
  const FxpArith ar(fmt);
  const int f = fmt.frac_bits();
  std::vector<GridAxis> axes;
  for (std::size_t i = 0; i < box.size(); ++i) {
    double lo = box[i].lo;
    double hi = box[i].hi;
    if (region.base) {
      lo = std::max(lo, (*region.base)[i] - region.gamma);
      hi = std::min(hi, (*region.base)[i] + region.gamma);
    }
    const double step = region.grid_step.empty() ? 0.0 : region.grid_step[i];
    if (step < 0 || !std::isfinite(step))
      throw Error(ErrorCode::invalid_argument, "grid step must be >= 0");
    GridAxis a;
    if (lo > hi)
      throw Error(ErrorCode::infeasible_region,
                  "input " + std::to_string(i) + " has no grid point in region");
    if (cfg.float_oracle) {
      a.lo = lo;
      a.step = step > 0 ? step : fmt.resolution();
      a.count = lo == hi ? 1
                         : static_cast<std::uint64_t>(
                               std::floor((hi - lo) / a.step * (1 + 1e-12))) +
                               1;
    } else {
      // Real inputs reach the model through the input conversion, which is
      // monotone, so the box maps onto the raw range between its converted
      // endpoints.
      const long double slo = ar.from_real(lo, cfg.conversion);
      const long double shi = ar.from_real(hi, cfg.conversion);
      if (slo > shi)
        throw Error(ErrorCode::infeasible_region,
                    "input " + std::to_string(i) +
                        " has no representable grid point in " +
                        fmt.to_string());
      a.fixed = true;
      a.frac = f;
      a.lo_raw = static_cast<std::int64_t>(slo);
      const std::int64_t hi_raw = static_cast<std::int64_t>(shi);
      a.step_raw = step > 0 ? std::max<std::int64_t>(
                                  1, ar.from_real(step, Rounding::nearest_even))
                            : 1;
      a.count = static_cast<std::uint64_t>((static_cast<wide_int>(hi_raw) -
                                            a.lo_raw) /
                                           a.step_raw) +
                1;
      a.lo = std::ldexp(static_cast<double>(a.lo_raw), -f);
      a.step = std::ldexp(static_cast<double>(a.step_raw), -f);
    }
    axes.push_back(a);
  }
  return axes;
}

std::size_t full_depth(const std::vector<GridAxis> &axes) {
  std::size_t d = 0;
  for (const auto &a : axes)
    d += a.count <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(a.count - 1));
  return d;
}

namespace {

struct Range {
  std::uint64_t lo;
  std::uint64_t hi;
  std::uint64_t size() const { return hi - lo + 1; }
};

using GridBox = std::vector<Range>;

bool is_point(const GridBox &b) {
  return std::all_of(b.begin(), b.end(), [](const Range &r) { return r.lo == r.hi; });
}

std::pair<GridBox, GridBox> split_grid(const GridBox &b) {
  std::size_t dim = 0;
  for (std::size_t i = 1; i < b.size(); ++i)
    if (b[i].size() > b[dim].size())
      dim = i;
  const std::uint64_t mid = b[dim].lo + (b[dim].hi - b[dim].lo) / 2;
  GridBox left = b, right = b;
  left[dim].hi = mid;
  right[dim].lo = mid + 1;
  return {std::move(left), std::move(right)};
}

enum class Outcome { resolved, unresolved, witness, budget, cancelled };

struct Evaluation {
  bool violated = false;
  std::optional<FxpTrace> fxp;
  ActivationTrace flt;
  std::optional<double> coverage;
};

// Evaluation, bounding and distance logic for one verification problem.
class Engine {
public:
  Engine(const Network &net, const Property &prop, const Region &region,
         const VerifyConfig &cfg)
      : net_(net), prop_(prop), cfg_(cfg), axes_(build_grid(region, cfg)),
        base_(region.base), gamma_(region.gamma) {
    if (!cfg.float_oracle)
      qnet_.emplace(net, cfg.format, cfg.conversion);
    if (region.box.size() != net.input_size())
      throw Error(ErrorCode::shape_mismatch,
                  "region dimension " + std::to_string(region.box.size()) +
                      " != network input size " +
                      std::to_string(net.input_size()));
    validate();
    if (const auto *goal = std::get_if<CoverageGoal>(&prop_)) {
      base_potentials_ = potentials(evaluate_traces(goal->base));
      total_neurons_ = net.num_neurons();
    }
  }

  const std::vector<GridAxis> &axes() const { return axes_; }
  const VerifyConfig &config() const { return cfg_; }

  GridBox root() const {
    GridBox b;
    for (const auto &a : axes_)
      b.push_back({0, a.count - 1});
    return b;
  }

  std::vector<double> point(const std::vector<std::uint64_t> &idx) const {
    std::vector<double> x(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      x[i] = axes_[i].value(idx[i]);
    return x;
  }

  // Grid point of the box nearest to the base, or its centre without one.
  std::vector<std::uint64_t> representative(const GridBox &b) const {
    std::vector<std::uint64_t> idx(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!base_) {
        idx[i] = b[i].lo + (b[i].hi - b[i].lo) / 2;
        continue;
      }
      const auto &a = axes_[i];
      const double t = ((*base_)[i] - a.value(0)) / a.step;
      double r = std::nearbyint(t);
      r = std::clamp(r, static_cast<double>(b[i].lo), static_cast<double>(b[i].hi));
      std::uint64_t j = static_cast<std::uint64_t>(r);
      // Check the neighbours; the division may be off by one step.
      auto dist = [&](std::uint64_t k) {
        return std::fabs(a.value(k) - (*base_)[i]);
      };
      if (j > b[i].lo && dist(j - 1) < dist(j))
        --j;
      if (j < b[i].hi && dist(j + 1) < dist(j))
        ++j;
      idx[i] = j;
    }
    return idx;
  }

  bool too_far(const std::vector<double> &x) const {
    if (!base_)
      return false;
    double sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - (*base_)[i];
      sum += d * d;
    }
    return std::sqrt(sum) > gamma_;
  }

  Evaluation evaluate(const std::vector<double> &x) const {
    Evaluation e;
    if (qnet_) {
      e.fxp = forward_fxp(*qnet_, x);
    } else {
      e.flt = forward_float(net_, x);
    }
    e.violated = violates(e);
    return e;
  }

  /// True when interval bounds over the box prove the property.
  bool proven(const GridBox &b) const {
    Box box;
    for (std::size_t i = 0; i < b.size(); ++i)
      box.emplace_back(axes_[i].value(b[i].lo), axes_[i].value(b[i].hi));
    if (qnet_) {
      const auto bounds = propagate_network_fxp(*qnet_, quantize_box(*qnet_, box));
      return proven_fxp(bounds);
    }
    return proven_real(propagate_network(net_, box));
  }

  Counterexample witness(const std::vector<double> &x, Evaluation e) const {
    Counterexample cx;
    cx.input = x;
    cx.property = property_kind(prop_);
    if (e.fxp) {
      cx.input_raw = e.fxp->input_raw;
      cx.fxp_trace = std::move(e.fxp);
    }
    cx.float_trace = forward_float(net_, x);
    if (base_)
      cx.distance = euclidean_distance(*base_, x);
    cx.coverage = e.coverage;
    return cx;
  }

private:
  void validate() const {
    if (const auto *a = std::get_if<AdversarialRobustness>(&prop_)) {
      if (a->expected_class >= net_.output_size())
        throw Error(ErrorCode::invalid_argument,
                    "expected class " + std::to_string(a->expected_class) +
                        " outside the output layer");
      if (a->base.size() != net_.input_size())
        throw Error(ErrorCode::shape_mismatch, "base input has wrong length");
    } else if (const auto *t = std::get_if<OutputThreshold>(&prop_)) {
      const std::size_t layer = t->layer.value_or(net_.num_layers() - 1);
      if (layer >= net_.num_layers() || t->neuron >= net_.layer(layer).width)
        throw Error(ErrorCode::invalid_argument,
                    "neuron " + std::to_string(t->neuron) + " of layer " +
                        std::to_string(layer) + " does not exist");
      if (!std::isfinite(t->bound))
        throw Error(ErrorCode::invalid_argument, "bound must be finite");
    } else {
      const auto &g = std::get<CoverageGoal>(prop_);
      g.config.validate();
      if (g.base.size() != net_.input_size())
        throw Error(ErrorCode::shape_mismatch, "base input has wrong length");
    }
  }

  Evaluation evaluate_traces(const std::vector<double> &x) const {
    Evaluation e;
    if (qnet_)
      e.fxp = forward_fxp(*qnet_, x);
    else
      e.flt = forward_float(net_, x);
    return e;
  }

  static Potentials potentials(const Evaluation &e) {
    if (e.fxp)
      return e.fxp->to_activation_trace().potentials;
    return e.flt.potentials;
  }

  bool violates(Evaluation &e) const {
    if (const auto *a = std::get_if<AdversarialRobustness>(&prop_)) {
      if (e.fxp)
        return check_adversarial(*e.fxp, *a);
      return check_adversarial(e.flt.final_outputs(), a->expected_class,
                               a->threshold);
    }
    if (const auto *t = std::get_if<OutputThreshold>(&prop_)) {
      const std::size_t layer = t->layer.value_or(net_.num_layers() - 1);
      const long double y = e.fxp ? e.fxp->output(layer, t->neuron)
                                  : static_cast<long double>(
                                        e.flt.outputs[layer][t->neuron]);
      const long double c = t->bound;
      return t->relation == Relation::ge ? !(y >= c) : !(y <= c);
    }
    const auto &g = std::get<CoverageGoal>(prop_);
    const auto r = coverage_report(g.method, g.config, base_potentials_,
                                   potentials(e));
    e.coverage = static_cast<double>(r.covered_neurons.size()) /
                 static_cast<double>(total_neurons_);
    return *e.coverage >= g.config.p;
  }

  bool proven_fxp(const FxpLayerBounds &b) const {
    const int f = b.format.frac_bits();
    auto real = [f](std::int64_t raw) {
      return std::ldexp(static_cast<long double>(raw), -f);
    };
    if (const auto *a = std::get_if<AdversarialRobustness>(&prop_)) {
      const auto &out = b.outputs.back();
      const long double v = a->threshold;
      if (real(out[a->expected_class].lo) >= v)
        return true;
      for (std::size_t i = 0; i < out.size(); ++i)
        if (i != a->expected_class && real(out[i].hi) >= v)
          return false;
      return true;
    }
    if (const auto *t = std::get_if<OutputThreshold>(&prop_)) {
      const std::size_t layer = t->layer.value_or(net_.num_layers() - 1);
      const auto &iv = b.outputs[layer][t->neuron];
      const long double c = t->bound;
      return t->relation == Relation::ge ? real(iv.lo) >= c : real(iv.hi) <= c;
    }
    return proven_real(b.to_real());
  }

  bool proven_real(const LayerBounds &b) const {
    if (const auto *a = std::get_if<AdversarialRobustness>(&prop_)) {
      const auto &out = b.outputs.back();
      if (out[a->expected_class].lo >= a->threshold)
        return true;
      for (std::size_t i = 0; i < out.size(); ++i)
        if (i != a->expected_class && out[i].hi >= a->threshold)
          return false;
      return true;
    }
    if (const auto *t = std::get_if<OutputThreshold>(&prop_)) {
      const std::size_t layer = t->layer.value_or(net_.num_layers() - 1);
      const auto &iv = b.outputs[layer][t->neuron];
      return t->relation == Relation::ge ? iv.lo >= t->bound : iv.hi <= t->bound;
    }
    const auto &g = std::get<CoverageGoal>(prop_);
    const std::size_t ub =
        coverage_upper_bound(g.method, g.config, base_potentials_, b.potentials);
    return static_cast<double>(ub) / static_cast<double>(total_neurons_) <
           g.config.p;
  }

  const Network &net_;
  const Property &prop_;
  VerifyConfig cfg_;
  std::optional<QuantizedNetwork> qnet_;
  std::vector<GridAxis> axes_;
  std::optional<std::vector<double>> base_;
  double gamma_;
  Potentials base_potentials_;
  std::size_t total_neurons_ = 0;
};

struct SearchState {
  Statistics stats;
  std::optional<Counterexample> witness;
  bool unresolved = false;
};

struct Shared {
  std::uint64_t budget;
  std::atomic<std::uint64_t> used{0};
  std::atomic<bool> exhausted{false};
  // Frontier index of the leftmost witness so far; subtrees to its right stop.
  std::atomic<std::size_t> best{std::numeric_limits<std::size_t>::max()};
};

class Search {
public:
  Search(const Engine &engine, Shared &shared, bool invariants, bool distance_only)
      : engine_(engine), shared_(shared), invariants_(invariants),
        distance_only_(distance_only) {}

  Outcome run(const GridBox &b, std::size_t depth, std::size_t k,
              SearchState &st, std::size_t frontier = 0) {
    if (frontier > shared_.best.load(std::memory_order_relaxed))
      return Outcome::cancelled;
    ++st.stats.nodes_explored;
    if (shared_.used.fetch_add(1, std::memory_order_relaxed) >= shared_.budget) {
      shared_.exhausted = true;
      return Outcome::budget;
    }
    st.stats.depth_reached = std::max(st.stats.depth_reached, depth);

    const auto idx = engine_.representative(b);
    const auto x = engine_.point(idx);
    if (engine_.too_far(x)) {
      ++st.stats.nodes_distance_pruned;
      return Outcome::resolved;
    }
    if (!distance_only_) {
      if (invariants_ && engine_.proven(b)) {
        ++st.stats.nodes_pruned;
        return Outcome::resolved;
      }
      ++st.stats.evaluations;
      auto e = engine_.evaluate(x);
      if (e.violated) {
        st.witness = engine_.witness(x, std::move(e));
        return Outcome::witness;
      }
    }
    if (is_point(b))
      return Outcome::resolved;
    if (depth >= k) {
      st.unresolved = true;
      return Outcome::unresolved;
    }
    const auto [left, right] = split_grid(b);
    Outcome o = run(left, depth + 1, k, st, frontier);
    if (o == Outcome::witness || o == Outcome::budget || o == Outcome::cancelled)
      return o;
    const Outcome r = run(right, depth + 1, k, st, frontier);
    if (r != Outcome::resolved)
      return r;
    return o;
  }

  // Processes nodes above `cut` serially and collects the subtrees at `cut`.
  Outcome expand(const GridBox &b, std::size_t depth, std::size_t cut,
                 std::size_t k, SearchState &st, std::vector<GridBox> &frontier) {
    if (depth == cut) {
      frontier.push_back(b);
      return Outcome::resolved;
    }
    ++st.stats.nodes_explored;
    if (shared_.used.fetch_add(1, std::memory_order_relaxed) >= shared_.budget) {
      shared_.exhausted = true;
      return Outcome::budget;
    }
    st.stats.depth_reached = std::max(st.stats.depth_reached, depth);
    const auto x = engine_.point(engine_.representative(b));
    if (engine_.too_far(x)) {
      ++st.stats.nodes_distance_pruned;
      return Outcome::resolved;
    }
    if (invariants_ && engine_.proven(b)) {
      ++st.stats.nodes_pruned;
      return Outcome::resolved;
    }
    ++st.stats.evaluations;
    auto e = engine_.evaluate(x);
    if (e.violated) {
      st.witness = engine_.witness(x, std::move(e));
      return Outcome::witness;
    }
    if (is_point(b))
      return Outcome::resolved;
    if (depth >= k) {
      st.unresolved = true;
      return Outcome::unresolved;
    }
    const auto [left, right] = split_grid(b);
    const Outcome o = expand(left, depth + 1, cut, k, st, frontier);
    if (o == Outcome::witness || o == Outcome::budget)
      return o;
    return expand(right, depth + 1, cut, k, st, frontier);
  }

private:
  const Engine &engine_;
  Shared &shared_;
  bool invariants_;
  bool distance_only_;
};

void merge(Statistics &into, const Statistics &s) {
  into.nodes_explored += s.nodes_explored;
  into.nodes_pruned += s.nodes_pruned;
  into.nodes_distance_pruned += s.nodes_distance_pruned;
  into.evaluations += s.evaluations;
  into.depth_reached = std::max(into.depth_reached, s.depth_reached);
}

// One depth-k pass over the whole tree.
Outcome depth_pass(const Engine &engine, Shared &shared, std::size_t k,
                   bool parallel, bool distance_only, SearchState &st) {
  const bool invariants = engine.config().use_invariants;
  Search search(engine, shared, invariants, distance_only);
  const int threads = omp_get_max_threads();
  std::size_t cut = 0;
  while ((std::size_t{1} << cut) < static_cast<std::size_t>(8 * threads))
    ++cut;
  if (!parallel || distance_only || k <= cut)
    return search.run(engine.root(), 0, k, st);

  std::vector<GridBox> frontier;
  const Outcome top = search.expand(engine.root(), 0, cut, k, st, frontier);
  if (top == Outcome::witness || top == Outcome::budget)
    return top;

  const auto n = static_cast<long long>(frontier.size());
  std::vector<SearchState> results(frontier.size());
  std::vector<Outcome> outcomes(frontier.size(), Outcome::resolved);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    Search local(engine, shared, invariants, false);
    const auto fi = static_cast<std::size_t>(i);
    outcomes[fi] = local.run(frontier[fi], cut, k, results[fi], fi);
    if (outcomes[fi] == Outcome::witness) {
      std::size_t cur = shared.best.load();
      while (fi < cur && !shared.best.compare_exchange_weak(cur, fi)) {
      }
    }
  }
  Outcome result = top;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    merge(st.stats, results[i].stats);
    st.unresolved = st.unresolved || results[i].unresolved;
  }
  const std::size_t best = shared.best.load();
  if (best < frontier.size()) {
    st.witness = std::move(results[best].witness);
    return Outcome::witness;
  }
  if (shared.exhausted)
    return Outcome::budget;
  return st.unresolved ? Outcome::unresolved : result;
}

} // namespace

std::optional<Counterexample> base_case(const Network &net, const Property &p,
                                        const Region &region, std::size_t k,
                                        const VerifyConfig &cfg) {
  const Engine engine(net, p, region, cfg);
  Shared shared{cfg.node_budget};
  SearchState st;
  depth_pass(engine, shared, k, cfg.parallel, false, st);
  return std::move(st.witness);
}

bool forward_condition(const Network &net, const Region &region, std::size_t k,
                       const VerifyConfig &cfg) {
  // The property plays no part in a distance-only pass.
  const Property dummy = OutputThreshold{std::nullopt, 0, 0.0, Relation::ge};
  const Engine engine(net, dummy, region, cfg);
  Shared shared{std::numeric_limits<std::uint64_t>::max()};
  SearchState st;
  return depth_pass(engine, shared, k, false, true, st) == Outcome::resolved;
}

Verdict incremental_verify(const Network &net, const Property &p,
                           const Region &region, const VerifyConfig &cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.granularity == 0)
    throw Error(ErrorCode::invalid_argument, "granularity must be >= 1");
  const Engine engine(net, p, region, cfg);
  Shared shared{cfg.node_budget};
  Verdict v;
  v.stats.full_depth = full_depth(engine.axes());
  const std::size_t limit =
      std::min(v.stats.full_depth, cfg.max_depth.value_or(v.stats.full_depth));

  for (std::size_t k = 0;; k += cfg.granularity) {
    const std::size_t depth = std::min(k, limit);
    SearchState st;
    const Outcome o = depth_pass(engine, shared, depth, cfg.parallel, false, st);
    merge(v.stats, st.stats);
    ++v.stats.iterations;
    if (o == Outcome::witness) {
      v.kind = VerdictKind::unsafe;
      v.witness = std::move(st.witness);
      break;
    }
    if (o == Outcome::budget) {
      v.kind = VerdictKind::unknown;
      v.reason = "node budget of " + std::to_string(cfg.node_budget) +
                 " exhausted at depth " + std::to_string(depth);
      break;
    }
    if (!st.unresolved) {
      v.kind = VerdictKind::safe;
      break;
    }
    if (depth >= limit) {
      v.kind = VerdictKind::unknown;
      v.reason = "depth limit " + std::to_string(limit) + " reached";
      break;
    }
  }
  v.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return v;
}

Verdict check_output_property(const Network &net, const Region &region,
                              const OutputThreshold &p, const VerifyConfig &cfg) {
  return incremental_verify(net, Property{p}, region, cfg);
}

Verdict coverage_goal_search(const Network &net, const CoverageGoal &goal,
                             const Region &region, const VerifyConfig &cfg) {
  if (goal.config.p > 1) {
    // No ratio exceeds 1.
    goal.config.validate();
    Verdict v;
    v.kind = VerdictKind::safe;
    v.reason = "coverage goal above 100% is unreachable";
    return v;
  }
  return incremental_verify(net, Property{goal}, region, cfg);
}

bool replay(const Network &net, const Property &p, const Counterexample &cx,
            const VerifyConfig &cfg) {
  Region point;
  point.box = point_box(cx.input);
  const Engine engine(net, p, point, cfg);
  auto e = engine.evaluate(cx.input);
  if (!cfg.float_oracle) {
    if (!cx.fxp_trace || e.fxp->input_raw != cx.input_raw)
      return false;
    if (e.fxp->potentials != cx.fxp_trace->potentials ||
        e.fxp->outputs != cx.fxp_trace->outputs)
      return false;
  }
  return e.violated;
}

} // namespace nnverify
