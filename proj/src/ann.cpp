#include "nnverify/ann.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nnverify/error.hpp"

namespace nnverify {

std::string to_string(ActivationKind kind) {
  switch (kind) {
  case ActivationKind::relu:
    return "relu";
  case ActivationKind::sigmoid_lut:
    return "sigmoid";
  case ActivationKind::identity:
    return "identity";
  }
  return "?";
}

ActivationKind parse_activation(std::string_view text) {
  if (text == "relu")
    return ActivationKind::relu;
  if (text == "sigmoid" || text == "sigmoid_lut")
    return ActivationKind::sigmoid_lut;
  if (text == "identity" || text == "linear")
    return ActivationKind::identity;
  throw Error(ErrorCode::invalid_argument,
              "unknown activation '" + std::string(text) + "'");
}

SigmoidTable::SigmoidTable(int steps_per_unit, int bound)
    : steps_per_unit_(steps_per_unit), bound_(bound) {
  if (steps_per_unit < 1 || bound < 1)
    throw Error(ErrorCode::invalid_argument, "invalid sigmoid table shape");
  const auto n = static_cast<std::size_t>(2) * bound * steps_per_unit;
  entries_.resize(n);
  const long long half = static_cast<long long>(n / 2);
  for (std::size_t i = 0; i < n; ++i)
    entries_[i] = sigmoid_exact(static_cast<double>(static_cast<long long>(i) -
                                                    half) /
                                steps_per_unit);
}

std::shared_ptr<const SigmoidTable> SigmoidTable::shared_default() {
  static const auto table = std::make_shared<const SigmoidTable>();
  return table;
}

long long SigmoidTable::index_of(double u) const noexcept {
  const double idx = std::floor(u * steps_per_unit_) +
                     static_cast<double>(entries_.size() / 2);
  if (idx < -1.0)
    return -1;
  if (idx > static_cast<double>(entries_.size()))
    return static_cast<long long>(entries_.size());
  return static_cast<long long>(idx);
}

double SigmoidTable::lookup(double u) const noexcept {
  const long long idx = index_of(u);
  if (idx < 0)
    return 0.0;
  if (idx >= static_cast<long long>(entries_.size()))
    return 1.0;
  return entries_[static_cast<std::size_t>(idx)];
}

Network::Network(std::vector<Layer> layers, NetworkMetadata meta,
                 std::shared_ptr<const SigmoidTable> table)
    : layers_(std::move(layers)), meta_(std::move(meta)) {
  if (table)
    table_ = std::move(table);
  if (layers_.empty())
    throw Error(ErrorCode::shape_mismatch, "network has no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer &layer = layers_[l];
    if (layer.fan_in == 0 || layer.width == 0 ||
        layer.weights.size() != layer.fan_in * layer.width ||
        layer.biases.size() != layer.width)
      throw Error(ErrorCode::shape_mismatch,
                  "layer " + std::to_string(l + 1) + " has inconsistent shape");
    if (l > 0 && layer.fan_in != layers_[l - 1].width)
      throw Error(ErrorCode::shape_mismatch,
                  "layer " + std::to_string(l + 1) + " fan-in " +
                      std::to_string(layer.fan_in) + " != width of layer " +
                      std::to_string(l));
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.biases.begin(), layer.biases.end(), finite))
      throw Error(ErrorCode::invalid_argument,
                  "layer " + std::to_string(l + 1) + " has non-finite entries");
  }
}

std::size_t Network::input_size() const { return layers_.front().fan_in; }
std::size_t Network::output_size() const { return layers_.back().width; }

std::size_t Network::num_neurons() const noexcept {
  std::size_t n = 0;
  for (const auto &layer : layers_)
    n += layer.width;
  return n;
}

std::vector<std::size_t> Network::widths() const {
  std::vector<std::size_t> w;
  for (const auto &layer : layers_)
    w.push_back(layer.width);
  return w;
}

Network Network::with_table(std::shared_ptr<const SigmoidTable> table) const {
  Network copy = *this;
  copy.table_ = std::move(table);
  return copy;
}

Network Network::with_activations(ActivationKind hidden,
                                  ActivationKind output) const {
  Network copy = *this;
  for (std::size_t l = 0; l < copy.layers_.size(); ++l)
    copy.layers_[l].activation = (l + 1 == copy.layers_.size()) ? output : hidden;
  return copy;
}

std::vector<double> Network::prepare_input(std::span<const double> input) const {
  std::vector<double> x(input.begin(), input.end());
  if (!meta_.normalize)
    return x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i < meta_.input_mins.size() && i < meta_.input_maxes.size())
      x[i] = std::clamp(x[i], meta_.input_mins[i], meta_.input_maxes[i]);
    const double mean = i < meta_.means.size() ? meta_.means[i] : 0.0;
    const double range = i < meta_.ranges.size() ? meta_.ranges[i] : 1.0;
    x[i] = (x[i] - mean) / (range == 0.0 ? 1.0 : range);
  }
  return x;
}

// ---------------------------------------------------------------------------
// .nnet parsing

namespace {

struct LineReader {
  std::istream &in;
  int line_no = 0;
  std::vector<std::string> directives;

  // Next non-empty, non-comment line; false at end of input.
  bool next(std::string &line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos)
        continue;
      if (line.compare(first, 2, "//") == 0) {
        directives.push_back(line.substr(first + 2));
        continue;
      }
      return true;
    }
    return false;
  }

  std::vector<double> values(const char *what) {
    std::string line;
    if (!next(line))
      throw ParseError(line_no + 1,
                       std::string("unexpected end of file reading ") + what);
    std::vector<double> out;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) {
      const auto a = token.find_first_not_of(" \t");
      if (a == std::string::npos)
        continue;
      const auto b = token.find_last_not_of(" \t");
      const std::string t = token.substr(a, b - a + 1);
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(t, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (used != t.size())
        throw ParseError(line_no, "non-numeric token '" + t + "'");
      out.push_back(v);
    }
    return out;
  }
};

std::size_t as_count(double v, int line, const char *what) {
  if (v < 1 || v != std::floor(v))
    throw ParseError(line, std::string("invalid ") + what);
  return static_cast<std::size_t>(v);
}

std::optional<std::vector<ActivationKind>>
activation_directive(const std::vector<std::string> &comments) {
  for (const auto &c : comments) {
    const auto pos = c.find("activations:");
    if (pos == std::string::npos)
      continue;
    std::vector<ActivationKind> kinds;
    std::stringstream ss(c.substr(pos + 12));
    std::string token;
    while (std::getline(ss, token, ',')) {
      const auto a = token.find_first_not_of(" \t");
      if (a == std::string::npos)
        continue;
      const auto b = token.find_last_not_of(" \t");
      kinds.push_back(parse_activation(token.substr(a, b - a + 1)));
    }
    return kinds;
  }
  return std::nullopt;
}

} // namespace

Network parse_nnet(std::istream &in, const ParseOptions &options) {
  LineReader reader{in, 0, {}};
  const auto header = reader.values("header");
  const int header_line = reader.line_no;
  if (header.size() < 4)
    throw ParseError(header_line, "header needs 4 integers");
  const std::size_t num_layers = as_count(header[0], header_line, "layer count");
  const std::size_t input_size = as_count(header[1], header_line, "input size");
  const std::size_t output_size =
      as_count(header[2], header_line, "output size");

  const auto sizes_raw = reader.values("layer sizes");
  const int sizes_line = reader.line_no;
  if (sizes_raw.size() != num_layers + 1)
    throw ParseError(sizes_line, "expected " + std::to_string(num_layers + 1) +
                                     " layer sizes, found " +
                                     std::to_string(sizes_raw.size()));
  std::vector<std::size_t> sizes;
  for (double v : sizes_raw)
    sizes.push_back(as_count(v, sizes_line, "layer size"));
  if (sizes.front() != input_size || sizes.back() != output_size)
    throw ParseError(sizes_line, "layer sizes disagree with header");

  NetworkMetadata meta;
  meta.normalize = options.normalize;
  reader.values("legacy flag");
  meta.input_mins = reader.values("input minimums");
  meta.input_maxes = reader.values("input maximums");
  meta.means = reader.values("means");
  meta.ranges = reader.values("ranges");

  std::vector<Layer> layers;
  for (std::size_t l = 0; l < num_layers; ++l) {
    Layer layer;
    layer.fan_in = sizes[l];
    layer.width = sizes[l + 1];
    layer.weights.reserve(layer.fan_in * layer.width);
    for (std::size_t k = 0; k < layer.width; ++k) {
      const auto row = reader.values("weights");
      if (row.size() != layer.fan_in)
        throw ParseError(reader.line_no,
                         "layer " + std::to_string(l + 1) + " weight row has " +
                             std::to_string(row.size()) + " values, expected " +
                             std::to_string(layer.fan_in));
      layer.weights.insert(layer.weights.end(), row.begin(), row.end());
    }
    for (std::size_t k = 0; k < layer.width; ++k) {
      const auto b = reader.values("biases");
      if (b.size() != 1)
        throw ParseError(reader.line_no, "bias line must hold one value");
      layer.biases.push_back(b[0]);
    }
    layers.push_back(std::move(layer));
  }
  std::string rest;
  if (reader.next(rest))
    throw ParseError(reader.line_no, "trailing data after last layer");

  const auto directive = activation_directive(reader.directives);
  if (directive && directive->size() != num_layers)
    throw ParseError(1, "activations directive lists " +
                            std::to_string(directive->size()) +
                            " kinds for " + std::to_string(num_layers) +
                            " layers");
  for (std::size_t l = 0; l < num_layers; ++l) {
    const bool last = l + 1 == num_layers;
    ActivationKind kind = last ? ActivationKind::identity : ActivationKind::relu;
    if (directive)
      kind = (*directive)[l];
    if (last && options.output)
      kind = *options.output;
    if (!last && options.hidden)
      kind = *options.hidden;
    layers[l].activation = kind;
  }
  if (!reader.directives.empty()) {
    const auto &first = reader.directives.front();
    const auto a = first.find_first_not_of(" \t");
    if (a != std::string::npos)
      meta.name = first.substr(a);
  }
  return Network(std::move(layers), std::move(meta), options.table);
}

Network parse_nnet(std::string_view text, const ParseOptions &options) {
  std::istringstream in{std::string(text)};
  return parse_nnet(in, options);
}

Network load_nnet(const std::string &path, const ParseOptions &options) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::io_error, "cannot open network file '" + path + "'");
  return parse_nnet(in, options);
}

std::string serialize_nnet(const Network &net) {
  std::ostringstream out;
  out << std::setprecision(17);
  const auto &meta = net.metadata();
  out << "// " << (meta.name.empty() ? "network" : meta.name) << "\n";
  out << "// activations: ";
  for (std::size_t l = 0; l < net.num_layers(); ++l)
    out << (l ? "," : "") << to_string(net.layer(l).activation);
  out << "\n";
  std::size_t max_width = net.input_size();
  for (const auto &layer : net.layers())
    max_width = std::max(max_width, layer.width);
  out << net.num_layers() << "," << net.input_size() << ","
      << net.output_size() << "," << max_width << ",\n";
  out << net.input_size() << ",";
  for (const auto &layer : net.layers())
    out << layer.width << ",";
  out << "\n0,\n";
  auto row = [&](const std::vector<double> &v, std::size_t n, double fill) {
    for (std::size_t i = 0; i < n; ++i)
      out << (i < v.size() ? v[i] : fill) << ",";
    out << "\n";
  };
  row(meta.input_mins, net.input_size(), 0.0);
  row(meta.input_maxes, net.input_size(), 1.0);
  row(meta.means, net.input_size() + 1, 0.0);
  row(meta.ranges, net.input_size() + 1, 1.0);
  for (const auto &layer : net.layers()) {
    for (std::size_t k = 0; k < layer.width; ++k) {
      for (std::size_t j = 0; j < layer.fan_in; ++j)
        out << layer.weight(k, j) << ",";
      out << "\n";
    }
    for (double b : layer.biases)
      out << b << ",\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Float reference semantics

double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

double sigmoid_exact(double u) noexcept { return 1.0 / (1.0 + std::exp(-u)); }

double sigmoid_lut(double u, const SigmoidTable &table) noexcept {
  return table.lookup(u);
}

double activate(ActivationKind kind, double u, const SigmoidTable &table) {
  switch (kind) {
  case ActivationKind::relu:
    return relu(u);
  case ActivationKind::sigmoid_lut:
    return sigmoid_lut(u, table);
  case ActivationKind::identity:
    return u;
  }
  throw Error(ErrorCode::invalid_argument, "unsupported activation");
}

std::vector<double> activation_potential(const Layer &layer,
                                         std::span<const double> input) {
  if (input.size() != layer.fan_in)
    throw Error(ErrorCode::shape_mismatch,
                "input length " + std::to_string(input.size()) +
                    " != layer fan-in " + std::to_string(layer.fan_in));
  std::vector<double> u(layer.width);
  for (std::size_t k = 0; k < layer.width; ++k) {
    const double *w = layer.weights.data() + k * layer.fan_in;
    double sum = 0.0;
    for (std::size_t j = 0; j < layer.fan_in; ++j)
      sum += w[j] * input[j];
    u[k] = sum + layer.biases[k];
  }
  return u;
}

ActivationTrace forward_float(const Network &net, std::span<const double> input) {
  if (input.size() != net.input_size())
    throw Error(ErrorCode::shape_mismatch,
                "input length " + std::to_string(input.size()) +
                    " != network input size " +
                    std::to_string(net.input_size()));
  ActivationTrace trace;
  trace.input = net.prepare_input(input);
  const std::vector<double> *prev = &trace.input;
  for (const auto &layer : net.layers()) {
    auto u = activation_potential(layer, *prev);
    std::vector<double> y(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
      y[k] = activate(layer.activation, u[k], net.sigmoid_table());
    trace.potentials.push_back(std::move(u));
    trace.outputs.push_back(std::move(y));
    prev = &trace.outputs.back();
  }
  return trace;
}

std::vector<ActivationTrace>
forward_float_batch(const Network &net,
                    std::span<const std::vector<double>> inputs, Exec exec) {
  std::vector<ActivationTrace> traces(inputs.size());
  const auto n = static_cast<long long>(inputs.size());
  if (exec == Exec::serial) {
    for (long long i = 0; i < n; ++i)
      traces[i] = forward_float(net, inputs[i]);
    return traces;
  }
  // Exceptions must not escape an OpenMP region; validate shapes up front.
  for (const auto &x : inputs)
    if (x.size() != net.input_size())
      throw Error(ErrorCode::shape_mismatch, "batch input has wrong length");
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i)
    traces[i] = forward_float(net, inputs[i]);
  return traces;
}

std::optional<std::size_t> classify(std::span<const double> outputs,
                                    double threshold) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i] < threshold)
      continue;
    if (!best || outputs[i] > outputs[*best])
      best = i;
  }
  return best;
}

std::optional<std::size_t> classify(const ActivationTrace &trace,
                                    double threshold) {
  return classify(trace.final_outputs(), threshold);
}

} // namespace nnverify
