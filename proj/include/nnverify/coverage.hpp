#pragma once

// MC/DC-style neuron covering methods over pairs of inputs. All predicates
// read activation potentials u, never outputs.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nnverify/ann.hpp"
#include "nnverify/interval.hpp"

namespace nnverify {

enum class CoverMethod { ss, sv, ds, dv };

std::string to_string(CoverMethod m);
CoverMethod parse_cover_method(std::string_view text);

/// h: per-neuron |du| > v, or the Euclidean distance of the whole layer > v.
enum class DistanceKind { absolute, euclidean };

struct CoverConfig {
  double d = 1.0;
  double v = 0.1;
  double p = 0.8;
  DistanceKind h = DistanceKind::absolute;

  /// Throws Error(invalid_argument) unless d > 0, v >= 0, 0 <= p.
  void validate() const;
};

/// Potentials per computing layer, as in ActivationTrace::potentials.
using Potentials = std::vector<std::vector<double>>;

/// Layer and neuron are 0-based; layer 0 is the first computing layer.
struct NeuronId {
  std::size_t layer = 0;
  std::size_t index = 0;

  auto operator<=>(const NeuronId &) const = default;
  /// "n_{k,l}" with 1-based k and l.
  std::string name() const;
};

int sign(double x) noexcept;

bool sc(NeuronId n, const Potentials &w1, const Potentials &w2);
/// Symmetric ratio test: max(|a|,|b|) / min(|a|,|b|) >= d; a zero minimum
/// passes iff the maximum is nonzero.
bool value_ratio(double a, double b, double d) noexcept;
bool vc(const CoverConfig &cfg, NeuronId n, const Potentials &w1,
        const Potentials &w2);
bool dc(const CoverConfig &cfg, std::size_t layer, const Potentials &w1,
        const Potentials &w2);

/// Pair covers; `cond` lies in layer l, `dec` in layer l+1.
bool ss_cover(NeuronId cond, NeuronId dec, const Potentials &w1,
              const Potentials &w2);
bool sv_cover(const CoverConfig &cfg, NeuronId cond, NeuronId dec,
              const Potentials &w1, const Potentials &w2);
/// Layer-condition covers; `dec` lies in layer cond_layer+1.
bool ds_cover(const CoverConfig &cfg, NeuronId dec, std::size_t cond_layer,
              const Potentials &w1, const Potentials &w2);
bool dv_cover(const CoverConfig &cfg, NeuronId dec, std::size_t cond_layer,
              const Potentials &w1, const Potentials &w2);

struct CoveredPair {
  NeuronId cond;
  NeuronId dec;
  auto operator<=>(const CoveredPair &) const = default;
};

struct CoverageReport {
  CoverMethod method = CoverMethod::ss;
  CoverConfig config;
  std::size_t input_pairs = 0;
  std::vector<CoveredPair> covered_pairs;
  std::set<NeuronId> covered_neurons;
  std::size_t total_neurons = 0;
  double ratio = 0;
  /// ratio >= P
  bool literal = false;
};

/// Covered pairs of one input pair. SS/SV mark both neurons of each pair;
/// DS/DV mark only the decision neuron, whose layer-wide condition is
/// reported as one pair per neuron of layer l.
CoverageReport coverage_report(CoverMethod method, const CoverConfig &cfg,
                               const Potentials &w1, const Potentials &w2);

/// Union over several input pairs; an empty list yields ratio 0.
CoverageReport
coverage_report(CoverMethod method, const CoverConfig &cfg,
                const std::vector<std::pair<Potentials, Potentials>> &pairs,
                std::size_t total_neurons);

/// Upper bound on the covered-neuron count over every w2 whose potentials
/// lie in `bounds` (three-valued evaluation of the predicates).
std::size_t coverage_upper_bound(CoverMethod method, const CoverConfig &cfg,
                                 const Potentials &w1,
                                 const std::vector<std::vector<Interval>> &bounds);

} // namespace nnverify
