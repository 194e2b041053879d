// nnverify: command-line front end.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "nnverify/ann.hpp"
#include "nnverify/bench_data.hpp"
#include "nnverify/coverage.hpp"
#include "nnverify/error.hpp"
#include "nnverify/fxp.hpp"
#include "nnverify/interval.hpp"
#include "nnverify/json_io.hpp"
#include "nnverify/opmodel.hpp"
#include "nnverify/verifier.hpp"

namespace fs = std::filesystem;
using namespace nnverify;

namespace {

constexpr int exit_error = 3;

struct Globals {
  std::string fixedbv = "<32,32>";
  bool float_oracle = false;
  std::string json_path;
  std::uint64_t seed = 0;
  std::string rounding; // empty: per-command default
  int lut_resolution = 100;
  bool parallel = false;
};

Rounding model_rounding(const Globals &g) {
  return g.rounding.empty() ? Rounding::toward_zero : parse_rounding(g.rounding);
}

Network load_network(const std::string &path, const Globals &g) {
  ParseOptions opts;
  if (g.lut_resolution != 100)
    opts.table = std::make_shared<const SigmoidTable>(g.lut_resolution);
  spdlog::debug("loading network {}", path);
  return load_nnet(path, opts);
}

void emit(const json &j, const Globals &g) {
  std::cout << j.dump(2) << '\n';
  if (!g.json_path.empty()) {
    std::ofstream out(g.json_path);
    if (!out)
      throw Error(ErrorCode::io_error, "cannot write " + g.json_path);
    out << j.dump(2) << '\n';
  }
}

// An input vector from a PGM image, a JSON array or a comma-separated line.
std::vector<double> read_vector(const std::string &path) {
  if (fs::path(path).extension() == ".pgm")
    return load_pgm(path);
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::io_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (fs::path(path).extension() == ".json") {
    try {
      return json::parse(text).get<std::vector<double>>();
    } catch (const json::exception &e) {
      throw Error(ErrorCode::parse_error, path + ": " + e.what());
    }
  }
  std::vector<double> v;
  std::string token;
  std::stringstream fields(text);
  while (std::getline(fields, token, ',')) {
    const auto a = token.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
      continue;
    try {
      v.push_back(std::stod(token.substr(a)));
    } catch (const std::exception &) {
      throw Error(ErrorCode::parse_error, path + ": non-numeric value '" + token + "'");
    }
  }
  return v;
}

// "lo:hi,lo:hi,..."
Box parse_box(const std::string &text) {
  Box b;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      const double x = std::stod(token);
      b.emplace_back(x, x);
    } else {
      b.emplace_back(std::stod(token.substr(0, colon)),
                     std::stod(token.substr(colon + 1)));
    }
  }
  return b;
}

std::vector<std::string> input_files(const std::string &dir) {
  std::vector<std::string> files;
  for (const auto &e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && e.path().filename() != "index.json" &&
        (ext == ".pgm" || ext == ".json" || ext == ".csv"))
      files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Potentials trace_potentials(const Network &net, const std::vector<double> &x,
                            const Globals &g) {
  if (g.float_oracle)
    return forward_float(net, x).potentials;
  return forward_fxp(net, x, FxpFormat::parse(g.fixedbv), model_rounding(g))
      .to_activation_trace()
      .potentials;
}

VerifyConfig verify_config(const Globals &g) {
  VerifyConfig cfg;
  cfg.format = FxpFormat::parse(g.fixedbv);
  cfg.conversion = model_rounding(g);
  cfg.float_oracle = g.float_oracle;
  cfg.parallel = g.parallel;
  return cfg;
}

json mode_json(const VerifyConfig &cfg) {
  json j;
  j["arithmetic"] = cfg.float_oracle ? "float" : "fixed-point";
  j["format"] = to_json(cfg.format);
  j["conversion"] = to_string(cfg.conversion);
  return j;
}

void write_witness_pgm(const Counterexample &cx, const std::string &path) {
  const auto n = cx.input.size();
  auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
  const bool square = side * side == n;
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::io_error, "cannot write " + path);
  out << to_pgm(cx.input, square ? side : n, square ? side : 1);
}

} // namespace

int main(int argc, char **argv) {
  auto logger = spdlog::stderr_color_mt("nnverify");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char *lvl = std::getenv("NNVERIFY_LOG"))
    spdlog::set_level(spdlog::level::from_str(lvl));

  CLI::App app{"Bit-precise verification of fixed-point multilayer perceptrons"};
  app.require_subcommand(1);
  // Global flags may also follow the subcommand.
  app.fallthrough();
  Globals g;
  app.add_option("--fixedbv", g.fixedbv, "fixed-point format <I,F>")
      ->capture_default_str();
  app.add_flag("--float-oracle", g.float_oracle,
               "evaluate in double precision instead of fixed point");
  app.add_option("--json", g.json_path, "also write the JSON report here");
  app.add_option("--seed", g.seed, "seed for generated data")->capture_default_str();
  app.add_option("--rounding", g.rounding,
                 "float-to-fixed conversion: truncate (model default) or nearest");
  app.add_option("--lut-resolution", g.lut_resolution,
                 "sigmoid table entries per unit (100 = step 0.01)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_flag("--parallel", g.parallel, "search subtrees with OpenMP threads");

  // verify
  auto *verify = app.add_subcommand("verify", "check a property over an input region");
  std::string net_path, prop_path, witness_pgm;
  bool no_intervals = false;
  std::size_t granularity = 1;
  std::optional<std::size_t> max_depth;
  std::uint64_t budget = 10'000'000;
  verify->add_option("network", net_path, ".nnet file")->required();
  verify->add_option("property", prop_path, "property JSON file")->required();
  verify->add_flag("--no-interval-analysis", no_intervals,
                   "do not prune with interval invariants");
  verify->add_option("--granularity", granularity, "depth increment per iteration")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify->add_option("--max-depth", max_depth, "deepest bisection level");
  verify->add_option("--budget", budget, "node budget")->capture_default_str();
  verify->add_option("--witness-pgm", witness_pgm, "write the witness input as PGM");

  // coverage
  auto *coverage = app.add_subcommand("coverage", "neuron coverage of input pairs");
  std::string cov_net, method = "ss", distance = "absolute", dataset, goal_path;
  double cov_d = 1.0, cov_v = 0.1, cov_p = 0.8;
  std::vector<std::string> pair_files, potential_files;
  coverage->add_option("--net", cov_net, ".nnet file");
  coverage->add_option("--method", method, "ss, sv, ds or dv")
      ->capture_default_str()
      ->check(CLI::IsMember({"ss", "sv", "ds", "dv"}));
  coverage->add_option("--d", cov_d, "value-change ratio threshold")->capture_default_str();
  coverage->add_option("--v", cov_v, "distance-change threshold")->capture_default_str();
  coverage->add_option("--p", cov_p, "required covered fraction")->capture_default_str();
  coverage->add_option("--distance", distance, "absolute or euclidean")
      ->capture_default_str()
      ->check(CLI::IsMember({"absolute", "euclidean"}));
  coverage->add_option("--inputs", pair_files, "two input files")->expected(2);
  coverage->add_option("--dataset", dataset, "directory of inputs (all pairs)");
  coverage->add_option("--potentials", potential_files,
                       "two JSON files of per-layer potentials")
      ->expected(2);
  coverage->add_option("--goal", goal_path,
                       "coverage_goal property file: search the region");

  // intervals
  auto *intervals = app.add_subcommand("intervals", "layer-wise interval bounds");
  std::string iv_net, box_text, widen_text;
  bool fixed_point = false;
  intervals->add_option("network", iv_net, ".nnet file")->required();
  intervals->add_option("--box", box_text, "lo:hi per input, comma separated")
      ->required();
  intervals->add_option("--widen", widen_text, "clamp reported bounds to lo:hi");
  intervals->add_flag("--fixed-point", fixed_point,
                      "bounds of the fixed-point model at --fixedbv");

  // conformance
  auto *conformance =
      app.add_subcommand("conformance", "fixed-point model against the float oracle");
  std::string conf_net, formats_text, conf_dir;
  double threshold_v = 0.5;
  std::vector<std::string> conf_inputs;
  conformance->add_option("network", conf_net, ".nnet file")->required();
  conformance->add_option("--formats", formats_text,
                          "space-separated list such as \"<8,8> <16,16>\"");
  conformance->add_option("--inputs", conf_inputs, "input files");
  conformance->add_option("--dataset", conf_dir, "directory of inputs");
  conformance->add_option("--threshold", threshold_v, "class threshold V")
      ->capture_default_str();

  // convert
  auto *convert = app.add_subcommand("convert", "convert a real to fixed point");
  double value = 0;
  convert->add_option("value", value, "real value")->required();

  // gen-bench
  auto *gen = app.add_subcommand("gen-bench", "write vocalic bitmaps as PGM files");
  std::string out_dir = "bench_images";
  BenchOptions bench;
  gen->add_option("--out", out_dir, "output directory")->capture_default_str();
  gen->add_option("--noise", bench.noise_rate, "pixel flip probability")
      ->capture_default_str();
  gen->add_option("--noisy-per-vowel", bench.noisy_per_vowel)->capture_default_str();
  gen->add_option("--non-vocalic", bench.non_vocalic)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return exit_error;
  }

  try {
    if (*verify) {
      const auto net = load_network(net_path, g);
      auto spec = load_property(prop_path);
      auto cfg = verify_config(g);
      cfg.use_invariants = !no_intervals;
      cfg.granularity = granularity;
      cfg.max_depth = max_depth;
      cfg.node_budget = budget;
      spdlog::info("verifying {} ({}) at {}", prop_path, spec.description,
                   cfg.float_oracle ? "float" : cfg.format.to_string());
      const Verdict v = incremental_verify(net, spec.property, spec.region, cfg);
      json j = to_json(v);
      j["property"] = spec.description;
      j["mode"] = mode_json(cfg);
      if (v.witness) {
        j["witness"]["replayed"] = replay(net, spec.property, *v.witness, cfg);
        if (!witness_pgm.empty())
          write_witness_pgm(*v.witness, witness_pgm);
      }
      emit(j, g);
      return exit_code(v.kind);
    }

    if (*coverage) {
      CoverConfig cfg;
      cfg.d = cov_d;
      cfg.v = cov_v;
      cfg.p = cov_p;
      cfg.h = distance == "euclidean" ? DistanceKind::euclidean : DistanceKind::absolute;
      cfg.validate();
      const CoverMethod m = parse_cover_method(method);

      if (!goal_path.empty()) {
        if (cov_net.empty())
          throw Error(ErrorCode::invalid_argument, "--goal needs --net");
        const auto net = load_network(cov_net, g);
        auto spec = load_property(goal_path);
        auto *goal = std::get_if<CoverageGoal>(&spec.property);
        if (!goal)
          throw Error(ErrorCode::invalid_argument, "--goal expects a coverage_goal property");
        const auto vcfg = verify_config(g);
        const Verdict v = coverage_goal_search(net, *goal, spec.region, vcfg);
        json j = to_json(v);
        j["property"] = spec.description;
        j["mode"] = mode_json(vcfg);
        if (v.witness)
          j["witness"]["replayed"] = replay(net, *goal, *v.witness, vcfg);
        emit(j, g);
        return exit_code(v.kind);
      }

      std::vector<std::pair<Potentials, Potentials>> pairs;
      std::size_t total = 0;
      if (!potential_files.empty()) {
        auto load = [](const std::string &p) {
          std::ifstream in(p);
          if (!in)
            throw Error(ErrorCode::io_error, "cannot open " + p);
          try {
            return json::parse(in).get<Potentials>();
          } catch (const json::exception &e) {
            throw Error(ErrorCode::parse_error, p + ": " + e.what());
          }
        };
        pairs.emplace_back(load(potential_files[0]), load(potential_files[1]));
        for (const auto &l : pairs.front().first)
          total += l.size();
      } else {
        if (cov_net.empty())
          throw Error(ErrorCode::invalid_argument, "coverage needs --net or --potentials");
        const auto net = load_network(cov_net, g);
        total = net.num_neurons();
        std::vector<std::string> files = pair_files;
        if (!dataset.empty())
          files = input_files(dataset);
        if (files.size() < 2)
          throw Error(ErrorCode::invalid_argument,
                      "coverage needs at least two inputs to form a pair");
        std::vector<Potentials> traces;
        for (const auto &f : files)
          traces.push_back(trace_potentials(net, read_vector(f), g));
        for (std::size_t i = 0; i < traces.size(); ++i)
          for (std::size_t k = i + 1; k < traces.size(); ++k)
            pairs.emplace_back(traces[i], traces[k]);
      }
      const auto report = coverage_report(m, cfg, pairs, total);
      emit(to_json(report), g);
      return 0;
    }

    if (*intervals) {
      const auto net = load_network(iv_net, g);
      const Box box = parse_box(box_text);
      LayerBounds bounds;
      json j;
      if (fixed_point) {
        const QuantizedNetwork q(net, FxpFormat::parse(g.fixedbv), model_rounding(g));
        bounds = propagate_network_fxp(q, quantize_box(q, box)).to_real();
        j["mode"] = {{"arithmetic", "fixed-point"},
                     {"format", to_json(q.format())},
                     {"conversion", to_string(q.conversion())}};
      } else {
        bounds = propagate_network(net, box);
        j["mode"] = {{"arithmetic", "float"}};
      }
      if (!widen_text.empty()) {
        const Box lim = parse_box(widen_text);
        if (lim.size() != 1)
          throw Error(ErrorCode::invalid_argument, "--widen takes one lo:hi interval");
        for (auto &layer : bounds.potentials)
          layer = widen(layer, lim[0]);
        for (auto &layer : bounds.outputs)
          layer = widen(layer, lim[0]);
        j["widening"] = {lim[0].lo, lim[0].hi};
      }
      json b = json::array();
      for (const auto &iv : box)
        b.push_back({iv.lo, iv.hi});
      j["input_box"] = b;
      j["bounds"] = to_json(bounds);
      emit(j, g);
      return 0;
    }

    if (*conformance) {
      const auto net = load_network(conf_net, g);
      std::vector<std::vector<double>> inputs;
      for (const auto &f : conf_inputs)
        inputs.push_back(read_vector(f));
      if (!conf_dir.empty())
        for (const auto &f : input_files(conf_dir))
          inputs.push_back(read_vector(f));
      if (conf_inputs.empty() && conf_dir.empty()) {
        if (net.input_size() != image_side * image_side)
          throw Error(ErrorCode::invalid_argument,
                      "conformance needs --inputs or --dataset for this network");
        BenchOptions opts;
        opts.seed = g.seed;
        for (const auto &f : generate_bench(opts))
          inputs.push_back(f.image);
      }
      std::vector<FxpFormat> formats;
      if (formats_text.empty()) {
        formats.push_back(FxpFormat::parse(g.fixedbv));
      } else {
        std::stringstream ss(formats_text);
        std::string token;
        while (ss >> token)
          formats.push_back(FxpFormat::parse(token));
      }
      ConformanceOptions opts;
      opts.threshold = threshold_v;
      opts.conversion = model_rounding(g);
      opts.exec = g.parallel ? Exec::parallel : Exec::serial;
      json reports = json::array();
      for (const auto &fmt : formats) {
        spdlog::info("conformance at {}", fmt.to_string());
        reports.push_back(to_json(conformance_diff(net, inputs, fmt, opts)));
      }
      emit({{"network", conf_net}, {"inputs", inputs.size()}, {"reports", reports}}, g);
      return 0;
    }

    if (*convert) {
      const FxpFormat fmt = FxpFormat::parse(g.fixedbv);
      const Rounding r =
          g.rounding.empty() ? Rounding::nearest_even : parse_rounding(g.rounding);
      const FxpValue q = from_real(value, fmt, r);
      emit({{"input", value},
            {"format", to_json(fmt)},
            {"rounding", to_string(r)},
            {"raw", q.raw()},
            {"value", q.to_double()},
            {"error", static_cast<double>(q.to_long_double() - value)}},
           g);
      return 0;
    }

    if (*gen) {
      bench.seed = g.seed;
      const auto files = generate_bench(bench);
      write_bench(files, out_dir);
      emit({{"directory", out_dir}, {"files", files.size()}, {"seed", g.seed}}, g);
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_error;
  }
  return exit_error;
}
