#include <doctest.h>

#include "nnverify/bench_data.hpp"
#include "nnverify/json_io.hpp"

using namespace nnverify;

namespace {

const std::string data_dir = NNVERIFY_DATA_DIR;

} // namespace

TEST_CASE("format and trace json") {
  const auto f = to_json(FxpFormat(4, 6));
  CHECK(f["text"] == "<4,6>");
  CHECK(f["int_bits"] == 4);
  const auto net = load_nnet(data_dir + "/motivating.nnet");
  const auto t = to_json(forward_fxp(net, std::vector<double>{0.749, 0.498}, FxpFormat(4, 6)));
  CHECK(t["input_raw"] == json({47, 31}));
  CHECK(t["outputs"][1][0] == 2.6875);
  CHECK(t["outputs_raw"][1][0] == 172);
}

TEST_CASE("verdict json") {
  const auto net = load_nnet(data_dir + "/motivating.nnet");
  Region r;
  r.box = point_box(std::vector<double>{0.749, 0.498});
  VerifyConfig cfg;
  cfg.format = FxpFormat(4, 6);
  const auto v = to_json(check_output_property(net, r, {std::nullopt, 0, 2.7, Relation::ge}, cfg));
  CHECK(v["verdict"] == "UNSAFE");
  CHECK(v["witness"]["input_raw"] == json({47, 31}));
  CHECK(v["statistics"]["nodes_explored"].get<int>() >= 1);
  cfg.format = FxpFormat(32, 32);
  const auto s = to_json(check_output_property(net, r, {std::nullopt, 0, 2.7, Relation::ge}, cfg));
  CHECK(s["verdict"] == "SAFE");
  CHECK(s["witness"].is_null());
}

TEST_CASE("property files") {
  const auto phi = load_property(data_dir + "/phi.json");
  const auto &p = std::get<OutputThreshold>(phi.property);
  CHECK(p.bound == 2.7);
  CHECK(p.relation == Relation::ge);
  CHECK(phi.region.box == point_box(std::vector<double>{0.749, 0.498}));

  const auto adv = parse_property(json::parse(R"({
    "type": "adversarial", "base_input": [1, 0, 1], "gamma": 1.5,
    "expected_class": 2, "grid_step": 1.0})"));
  const auto &a = std::get<AdversarialRobustness>(adv.property);
  CHECK(a.expected_class == 2);
  CHECK(a.threshold == 0.5);
  CHECK(adv.region.box.size() == 3);
  CHECK(adv.region.grid_step == std::vector<double>{1, 1, 1});
  CHECK(adv.region.gamma == 1.5);

  const auto cov = parse_property(json::parse(R"({
    "type": "coverage_goal", "base_input": [2, 2], "method": "dv", "p": 0.5,
    "box": [[0, 4], [0, 4]]})"));
  CHECK(std::get<CoverageGoal>(cov.property).method == CoverMethod::dv);

  CHECK_THROWS_AS(parse_property(json::parse(R"({"type": "nope"})")), Error);
  CHECK_THROWS_AS(parse_property(json::parse(R"({"type": "adversarial"})")), Error);
  CHECK_THROWS_AS(parse_property(json::parse(R"({"type": "output_threshold",
    "base_input": [1], "bound": 1})")), Error);
  CHECK_THROWS_AS(load_property(data_dir + "/missing.json"), Error);
}

TEST_CASE("coverage and conformance json") {
  const Potentials a{{-1, 1}, {1}}, b{{1, 1}, {-1}};
  const auto c = to_json(coverage_report(CoverMethod::ss, {}, a, b));
  CHECK(c["covered_pairs"] == json::parse(R"([["n_{1,1}", "n_{1,2}"]])"));
  CHECK(c["total_neurons"] == 3);

  const auto net = load_nnet(data_dir + "/three_layer.nnet");
  const std::vector<std::vector<double>> inputs{{1, -3}};
  const auto r = to_json(conformance_diff(net, inputs, FxpFormat(8, 8)));
  CHECK(r["format"] == "<8,8>");
  CHECK(r["per_input"].size() == 1);
  CHECK(r["summary"]["inputs"] == 1);
}
