#include "nnverify/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "nnverify/error.hpp"

namespace nnverify {

std::string to_string(CoverMethod m) {
  switch (m) {
  case CoverMethod::ss:
    return "ss";
  case CoverMethod::sv:
    return "sv";
  case CoverMethod::ds:
    return "ds";
  case CoverMethod::dv:
    return "dv";
  }
  return "?";
}

CoverMethod parse_cover_method(std::string_view text) {
  if (text == "ss")
    return CoverMethod::ss;
  if (text == "sv")
    return CoverMethod::sv;
  if (text == "ds")
    return CoverMethod::ds;
  if (text == "dv")
    return CoverMethod::dv;
  throw Error(ErrorCode::invalid_argument,
              "unknown covering method '" + std::string(text) + "'");
}

void CoverConfig::validate() const {
  if (!(d > 0) || !(v >= 0) || !(p >= 0))
    throw Error(ErrorCode::invalid_argument,
                "cover config needs d > 0, v >= 0, p >= 0");
}

std::string NeuronId::name() const {
  return "n_{" + std::to_string(index + 1) + "," + std::to_string(layer + 1) +
         "}";
}

int sign(double x) noexcept { return x >= 0 ? 1 : 0; }

namespace {

double at(const Potentials &w, NeuronId n) {
  if (n.layer >= w.size() || n.index >= w[n.layer].size())
    throw Error(ErrorCode::shape_mismatch, "neuron " + n.name() + " not in trace");
  return w[n.layer][n.index];
}

void check_shapes(const Potentials &a, const Potentials &b) {
  bool ok = a.size() == b.size();
  for (std::size_t l = 0; ok && l < a.size(); ++l)
    ok = a[l].size() == b[l].size();
  if (!ok)
    throw Error(ErrorCode::shape_mismatch,
                "coverage traces come from different networks");
}

bool only_change_in_layer(NeuronId cond, const Potentials &w1,
                          const Potentials &w2) {
  for (std::size_t j = 0; j < w1[cond.layer].size(); ++j)
    if (j != cond.index && sc({cond.layer, j}, w1, w2))
      return false;
  return sc(cond, w1, w2);
}

} // namespace

bool sc(NeuronId n, const Potentials &w1, const Potentials &w2) {
  return sign(at(w1, n)) != sign(at(w2, n));
}

bool value_ratio(double a, double b, double d) noexcept {
  const double hi = std::max(std::fabs(a), std::fabs(b));
  const double lo = std::min(std::fabs(a), std::fabs(b));
  if (lo == 0)
    return hi > 0;
  return hi / lo >= d;
}

bool vc(const CoverConfig &cfg, NeuronId n, const Potentials &w1,
        const Potentials &w2) {
  return !sc(n, w1, w2) && value_ratio(at(w1, n), at(w2, n), cfg.d);
}

bool dc(const CoverConfig &cfg, std::size_t layer, const Potentials &w1,
        const Potentials &w2) {
  if (layer >= w1.size() || layer >= w2.size())
    throw Error(ErrorCode::shape_mismatch, "layer not in trace");
  double sq = 0;
  for (std::size_t j = 0; j < w1[layer].size(); ++j) {
    const NeuronId n{layer, j};
    if (sc(n, w1, w2))
      return false;
    const double delta = std::fabs(at(w1, n) - at(w2, n));
    if (cfg.h == DistanceKind::absolute && !(delta > cfg.v))
      return false;
    sq += delta * delta;
  }
  return cfg.h == DistanceKind::absolute || std::sqrt(sq) > cfg.v;
}

bool ss_cover(NeuronId cond, NeuronId dec, const Potentials &w1,
              const Potentials &w2) {
  return dec.layer == cond.layer + 1 && only_change_in_layer(cond, w1, w2) &&
         sc(dec, w1, w2);
}

bool sv_cover(const CoverConfig &cfg, NeuronId cond, NeuronId dec,
              const Potentials &w1, const Potentials &w2) {
  return dec.layer == cond.layer + 1 && only_change_in_layer(cond, w1, w2) &&
         vc(cfg, dec, w1, w2);
}

bool ds_cover(const CoverConfig &cfg, NeuronId dec, std::size_t cond_layer,
              const Potentials &w1, const Potentials &w2) {
  return dec.layer == cond_layer + 1 && dc(cfg, cond_layer, w1, w2) &&
         sc(dec, w1, w2);
}

bool dv_cover(const CoverConfig &cfg, NeuronId dec, std::size_t cond_layer,
              const Potentials &w1, const Potentials &w2) {
  return dec.layer == cond_layer + 1 && dc(cfg, cond_layer, w1, w2) &&
         vc(cfg, dec, w1, w2);
}

namespace {

std::size_t count_neurons(const Potentials &w) {
  std::size_t n = 0;
  for (const auto &l : w)
    n += l.size();
  return n;
}

void collect(CoverMethod method, const CoverConfig &cfg, const Potentials &w1,
             const Potentials &w2, std::set<CoveredPair> &pairs,
             std::set<NeuronId> &neurons) {
  check_shapes(w1, w2);
  for (std::size_t l = 0; l + 1 < w1.size(); ++l) {
    const bool layer_cond = (method == CoverMethod::ds ||
                             method == CoverMethod::dv) &&
                            dc(cfg, l, w1, w2);
    for (std::size_t k = 0; k < w1[l + 1].size(); ++k) {
      const NeuronId dec{l + 1, k};
      switch (method) {
      case CoverMethod::ss:
      case CoverMethod::sv:
        for (std::size_t i = 0; i < w1[l].size(); ++i) {
          const NeuronId cond{l, i};
          const bool hit = method == CoverMethod::ss
                               ? ss_cover(cond, dec, w1, w2)
                               : sv_cover(cfg, cond, dec, w1, w2);
          if (hit) {
            pairs.insert({cond, dec});
            neurons.insert(cond);
            neurons.insert(dec);
          }
        }
        break;
      case CoverMethod::ds:
      case CoverMethod::dv: {
        const bool hit = layer_cond && (method == CoverMethod::ds
                                            ? sc(dec, w1, w2)
                                            : vc(cfg, dec, w1, w2));
        if (hit) {
          for (std::size_t j = 0; j < w1[l].size(); ++j)
            pairs.insert({{l, j}, dec});
          neurons.insert(dec);
        }
        break;
      }
      }
    }
  }
}

void finish(CoverageReport &r) {
  r.ratio = r.total_neurons
                ? static_cast<double>(r.covered_neurons.size()) /
                      static_cast<double>(r.total_neurons)
                : 0.0;
  r.literal = r.ratio >= r.config.p;
}

} // namespace

CoverageReport coverage_report(CoverMethod method, const CoverConfig &cfg,
                               const Potentials &w1, const Potentials &w2) {
  return coverage_report(method, cfg, {{w1, w2}}, count_neurons(w1));
}

CoverageReport
coverage_report(CoverMethod method, const CoverConfig &cfg,
                const std::vector<std::pair<Potentials, Potentials>> &pairs,
                std::size_t total_neurons) {
  cfg.validate();
  CoverageReport r;
  r.method = method;
  r.config = cfg;
  r.input_pairs = pairs.size();
  r.total_neurons = total_neurons;
  std::set<CoveredPair> covered;
  for (const auto &[w1, w2] : pairs)
    collect(method, cfg, w1, w2, covered, r.covered_neurons);
  r.covered_pairs.assign(covered.begin(), covered.end());
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Three-valued evaluation over potential intervals of w2 against a fixed w1.

namespace {

struct Maybe {
  bool possible;
  bool certain;
};

Maybe sc3(double a, const Interval &x) {
  if (sign(a) == 1)
    return {x.lo < 0, x.hi < 0};
  return {x.hi >= 0, x.lo >= 0};
}

bool ratio_possible(double a, const Interval &x, double d) {
  const double mlo = (x.lo <= 0 && x.hi >= 0)
                         ? 0.0
                         : std::min(std::fabs(x.lo), std::fabs(x.hi));
  const double mhi = std::max(std::fabs(x.lo), std::fabs(x.hi));
  const double fa = std::fabs(a);
  if (fa == 0)
    return mhi > 0;
  if (mlo == 0)
    return true;
  return fa / mlo >= d || mhi / fa >= d;
}

double max_delta(double a, const Interval &x) {
  return std::max(std::fabs(x.lo - a), std::fabs(x.hi - a));
}

} // namespace

std::size_t coverage_upper_bound(CoverMethod method, const CoverConfig &cfg,
                                 const Potentials &w1,
                                 const std::vector<std::vector<Interval>> &bounds) {
  if (w1.size() != bounds.size())
    throw Error(ErrorCode::shape_mismatch, "bounds and trace differ in depth");
  std::set<NeuronId> marked;
  for (std::size_t l = 0; l + 1 < w1.size(); ++l) {
    const auto &a = w1[l];
    const auto &b = bounds[l];
    std::size_t certain_changes = 0;
    for (std::size_t j = 0; j < a.size(); ++j)
      certain_changes += sc3(a[j], b[j]).certain ? 1 : 0;

    // Layer condition of DS/DV: no neuron may change sign, all must move.
    bool dc_possible = certain_changes == 0;
    double sq = 0;
    for (std::size_t j = 0; dc_possible && j < a.size(); ++j) {
      const double md = max_delta(a[j], b[j]);
      if (cfg.h == DistanceKind::absolute && !(md > cfg.v))
        dc_possible = false;
      sq += md * md;
    }
    if (cfg.h == DistanceKind::euclidean && !(std::sqrt(sq) > cfg.v))
      dc_possible = false;

    for (std::size_t k = 0; k < w1[l + 1].size(); ++k) {
      const NeuronId dec{l + 1, k};
      const double ad = w1[l + 1][k];
      const Interval &bd = bounds[l + 1][k];
      const Maybe s = sc3(ad, bd);
      const bool sc_dec = s.possible;
      const bool vc_dec = !s.certain && ratio_possible(ad, bd, cfg.d);
      switch (method) {
      case CoverMethod::ss:
      case CoverMethod::sv: {
        const bool dec_ok = method == CoverMethod::ss ? sc_dec : vc_dec;
        if (!dec_ok)
          break;
        for (std::size_t i = 0; i < a.size(); ++i) {
          const bool others_clear =
              certain_changes == 0 ||
              (certain_changes == 1 && sc3(a[i], b[i]).certain);
          if (sc3(a[i], b[i]).possible && others_clear) {
            marked.insert({l, i});
            marked.insert(dec);
          }
        }
        break;
      }
      case CoverMethod::ds:
        if (dc_possible && sc_dec)
          marked.insert(dec);
        break;
      case CoverMethod::dv:
        if (dc_possible && vc_dec)
          marked.insert(dec);
        break;
      }
    }
  }
  return marked.size();
}

} // namespace nnverify
