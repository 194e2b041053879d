#include <doctest.h>

#include <cmath>
#include <random>

#include "nnverify/coverage.hpp"

using namespace nnverify;

namespace {

const std::string data_dir = NNVERIFY_DATA_DIR;

// Potentials of the three-layer example for each of the four inputs.
Potentials example(int i) {
  const auto net = load_nnet(data_dir + "/three_layer.nnet");
  static const double inputs[4][2] = {{1, -3}, {1, -1}, {1, -1.2}, {1, -7}};
  return forward_float(net, std::vector<double>(inputs[i], inputs[i] + 2)).potentials;
}

// Direct transcription of the definitions, one neuron pair at a time.
struct Naive {
  CoverConfig cfg;
  const Potentials &a, &b;

  static int sgn(double x) { return x >= 0 ? 1 : 0; }
  bool sc(std::size_t l, std::size_t k) const { return sgn(a[l][k]) != sgn(b[l][k]); }
  bool g(double x, double y) const {
    const double lo = std::min(std::fabs(x), std::fabs(y));
    const double hi = std::max(std::fabs(x), std::fabs(y));
    return lo == 0 ? hi != 0 : hi / lo >= cfg.d;
  }
  bool vc(std::size_t l, std::size_t k) const { return g(a[l][k], b[l][k]) && !sc(l, k); }
  bool dc(std::size_t l) const {
    double sq = 0;
    for (std::size_t k = 0; k < a[l].size(); ++k) {
      if (sc(l, k))
        return false;
      const double d = std::fabs(a[l][k] - b[l][k]);
      if (cfg.h == DistanceKind::absolute && !(d > cfg.v))
        return false;
      sq += d * d;
    }
    return cfg.h == DistanceKind::absolute || std::sqrt(sq) > cfg.v;
  }
  bool only(std::size_t l, std::size_t i) const {
    for (std::size_t j = 0; j < a[l].size(); ++j)
      if (j != i && sc(l, j))
        return false;
    return sc(l, i);
  }
  std::set<NeuronId> covered(CoverMethod m) const {
    std::set<NeuronId> out;
    for (std::size_t l = 0; l + 1 < a.size(); ++l)
      for (std::size_t k = 0; k < a[l + 1].size(); ++k) {
        if (m == CoverMethod::ds || m == CoverMethod::dv) {
          if (dc(l) && (m == CoverMethod::ds ? sc(l + 1, k) : vc(l + 1, k)))
            out.insert({l + 1, k});
          continue;
        }
        for (std::size_t i = 0; i < a[l].size(); ++i)
          if (only(l, i) && (m == CoverMethod::ss ? sc(l + 1, k) : vc(l + 1, k))) {
            out.insert({l, i});
            out.insert({l + 1, k});
          }
      }
    return out;
  }
};

const CoverMethod all_methods[] = {CoverMethod::ss, CoverMethod::sv, CoverMethod::ds,
                                   CoverMethod::dv};

} // namespace

TEST_CASE("example potentials") {
  const double expected[4][6] = {{-1.3, -1.80, -0.50, -0.79, -1.370, -1.417},
                                 {-0.3, -0.40, 0.10, 0.51, 0.090, 0.353},
                                 {-0.4, -0.54, 0.04, 0.38, -0.056, 0.176},
                                 {-3.3, -4.60, -1.70, -3.39, -4.290, -4.957}};
  for (int e = 0; e < 4; ++e) {
    const auto w = example(e);
    const double got[6] = {w[0][0], w[0][1], w[0][2], w[1][0], w[1][1], w[2][0]};
    for (int n = 0; n < 6; ++n)
      CHECK(got[n] == doctest::Approx(expected[e][n]).epsilon(1e-9));
  }
}

TEST_CASE("sign and predicates") {
  CHECK(sign(0.0) == 1);
  CHECK(sign(-0.0) == 1);
  CHECK(sign(-1e-300) == 0);
  CHECK(value_ratio(2, 1, 2));
  CHECK(value_ratio(1, 2, 2));
  CHECK_FALSE(value_ratio(1.5, 1, 2));
  CHECK(value_ratio(0, 3, 5));
  CHECK_FALSE(value_ratio(0, 0, 1));
  CHECK(NeuronId{2, 0}.name() == "n_{1,3}");
}

TEST_CASE("SS on the first two examples") {
  const auto w1 = example(0), w2 = example(1);
  CHECK(sc({0, 2}, w1, w2));
  CHECK_FALSE(sc({0, 0}, w1, w2));
  CHECK(ss_cover({0, 2}, {1, 0}, w1, w2));
  CHECK(ss_cover({0, 2}, {1, 1}, w1, w2));
  CHECK_FALSE(ss_cover({0, 0}, {1, 0}, w1, w2));
  // Both second-layer neurons flipped, so nothing reaches the output.
  CHECK_FALSE(ss_cover({1, 0}, {2, 0}, w1, w2));
  const auto r = coverage_report(CoverMethod::ss, {}, w1, w2);
  CHECK(r.covered_pairs.size() == 2);
  CHECK(r.covered_neurons.size() == 3);
  CHECK(r.total_neurons == 6);
  CHECK(r.ratio == doctest::Approx(0.5));
  CHECK_FALSE(r.literal);
}

TEST_CASE("DS on the second and third examples") {
  const auto w1 = example(1), w2 = example(2);
  CoverConfig cfg;
  cfg.v = 0.05;
  CHECK(dc(cfg, 0, w1, w2));
  CHECK(ds_cover(cfg, {1, 1}, 0, w1, w2));
  CHECK_FALSE(ds_cover(cfg, {1, 0}, 0, w1, w2));
  const auto r = coverage_report(CoverMethod::ds, cfg, w1, w2);
  CHECK(r.covered_pairs.size() == 3);
  CHECK(r.covered_neurons == std::set<NeuronId>{{1, 1}});
  CHECK(sv_cover(cfg, {1, 1}, {2, 0}, w1, w2));
  CHECK_FALSE(sv_cover(cfg, {1, 0}, {2, 0}, w1, w2));
  cfg.v = 0.07; // |du| of n_{3,1} is 0.06
  CHECK_FALSE(dc(cfg, 0, w1, w2));
  cfg.h = DistanceKind::euclidean;
  CHECK(dc(cfg, 0, w1, w2));
}

TEST_CASE("every method agrees with the naive transcription on all example pairs") {
  for (double v : {0.05, 0.1, 0.5})
    for (double d : {1.0, 1.5, 3.0})
      for (auto h : {DistanceKind::absolute, DistanceKind::euclidean}) {
        CoverConfig cfg;
        cfg.v = v;
        cfg.d = d;
        cfg.h = h;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            const auto a = example(i), b = example(j);
            const Naive naive{cfg, a, b};
            for (auto m : all_methods)
              REQUIRE(coverage_report(m, cfg, a, b).covered_neurons == naive.covered(m));
          }
      }
}

TEST_CASE("covering predicates are symmetric in the input pair") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 2);
  for (int t = 0; t < 500; ++t) {
    Potentials a{{0, 0, 0}, {0, 0}, {0}}, b = a;
    for (auto *w : {&a, &b})
      for (auto &l : *w)
        for (auto &x : l)
          x = n(rng);
    CoverConfig cfg;
    cfg.d = 1.2;
    for (auto m : all_methods)
      REQUIRE(coverage_report(m, cfg, a, b).covered_pairs ==
              coverage_report(m, cfg, b, a).covered_pairs);
  }
}

TEST_CASE("vocalic U against noisy U") {
  const Potentials u{{-1.885322, 8.775419, 2.959348, 10.424796, 8.172012},
                     {-3.863095, 5.328067, -3.770385, 0.574238},
                     {-6.707186, -15.815082, -10.060704, -9.688183, -0.555885}};
  const Potentials noisy{{4.619613, 9.796190, 5.743809, 4.046428, 14.466885},
                         {-9.308636, 5.263461, -5.705760, -2.029373},
                         {-7.149290, -17.246468, -13.074245, -4.868999, 3.355738}};
  const auto r = coverage_report(CoverMethod::ss, {}, u, noisy);
  const std::vector<CoveredPair> pairs{{{0, 0}, {1, 3}}, {{1, 3}, {2, 4}}};
  CHECK(r.covered_pairs == pairs);
  CHECK(r.covered_neurons.size() == 3);
  CHECK(r.total_neurons == 14);
  CHECK(r.ratio == doctest::Approx(3.0 / 14));
  CHECK_FALSE(r.literal);
}

TEST_CASE("multi-pair union") {
  const auto r = coverage_report(CoverMethod::ss, {},
                                 {{example(0), example(1)}, {example(1), example(0)}}, 6);
  CHECK(r.input_pairs == 2);
  CHECK(r.covered_neurons.size() == 3);
  const auto none = coverage_report(CoverMethod::ss, {}, {}, 6);
  CHECK(none.ratio == 0);
  CHECK(none.covered_neurons.empty());
}

TEST_CASE("config validation and method names") {
  CoverConfig cfg;
  cfg.d = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.d = 1;
  cfg.v = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_cover_method("ss") == CoverMethod::ss);
  CHECK(parse_cover_method("dv") == CoverMethod::dv);
  CHECK_THROWS_AS(parse_cover_method("xx"), Error);
  CHECK(to_string(CoverMethod::sv) == "sv");
}

TEST_CASE("upper bound dominates every w2 inside the bounds") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1.5);
  std::uniform_real_distribution<double> w(0, 1.0);
  for (int t = 0; t < 300; ++t) {
    Potentials a{{0, 0, 0}, {0, 0}, {0}};
    std::vector<std::vector<Interval>> bounds(3);
    for (std::size_t l = 0; l < a.size(); ++l)
      for (auto &x : a[l]) {
        x = n(rng);
        const double c = n(rng), r = w(rng);
        bounds[l].emplace_back(c - r, c + r);
      }
    CoverConfig cfg;
    cfg.d = 1.3;
    cfg.v = 0.2;
    for (auto m : all_methods) {
      const auto ub = coverage_upper_bound(m, cfg, a, bounds);
      for (int s = 0; s < 30; ++s) {
        Potentials b = a;
        for (std::size_t l = 0; l < b.size(); ++l)
          for (std::size_t k = 0; k < b[l].size(); ++k)
            b[l][k] = std::uniform_real_distribution<double>(bounds[l][k].lo,
                                                             bounds[l][k].hi)(rng);
        REQUIRE(coverage_report(m, cfg, a, b).covered_neurons.size() <= ub);
      }
    }
  }
}
