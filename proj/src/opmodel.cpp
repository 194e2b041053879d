#include "nnverify/opmodel.hpp"

#include <algorithm>
#include <cmath>

#include "nnverify/error.hpp"

namespace nnverify {

namespace {

void require_format(std::span<const FxpValue> values, FxpFormat fmt,
                    const char *what) {
  for (const auto &v : values)
    if (v.format() != fmt)
      throw Error(ErrorCode::format_mismatch,
                  std::string(what) + ": operand in " + v.format().to_string() +
                      ", expected " + fmt.to_string());
}

// Table index of a raw potential: floor(u * steps_per_unit) + size / 2,
// computed exactly on the raw integer.
long long sigmoid_index(std::int64_t raw, int frac_bits, int steps_per_unit,
                        std::size_t size) {
  const wide_int scaled = static_cast<wide_int>(raw) * steps_per_unit;
  const wide_int idx = (scaled >> frac_bits) + static_cast<wide_int>(size / 2);
  if (idx < 0)
    return -1;
  if (idx >= static_cast<wide_int>(size))
    return static_cast<long long>(size);
  return static_cast<long long>(idx);
}

std::int64_t raw_activation(ActivationKind kind, std::int64_t u,
                            const FxpArith &ar, int steps_per_unit,
                            std::span<const std::int64_t> entries,
                            std::int64_t one) {
  switch (kind) {
  case ActivationKind::relu:
    return u > 0 ? u : 0;
  case ActivationKind::identity:
    return u;
  case ActivationKind::sigmoid_lut: {
    const long long idx =
        sigmoid_index(u, ar.format().frac_bits(), steps_per_unit, entries.size());
    if (idx < 0)
      return 0;
    if (idx >= static_cast<long long>(entries.size()))
      return one;
    return entries[static_cast<std::size_t>(idx)];
  }
  }
  return u;
}

} // namespace

Matrix<FxpValue> gemm_fxp(const Matrix<FxpValue> &a, const Matrix<FxpValue> &b,
                          FxpFormat fmt, Exec exec) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::shape_mismatch,
                "gemm_fxp: inner dimensions " + std::to_string(a.cols()) +
                    " and " + std::to_string(b.rows()) + " differ");
  const FxpArith ar(fmt);
  const FxpValue zero = FxpValue::from_raw(0, fmt);
  Matrix<FxpValue> c(a.rows(), b.cols(), zero);
  for (std::size_t x = 0; x < a.rows(); ++x)
    for (std::size_t z = 0; z < a.cols(); ++z)
      if (a(x, z).format() != fmt)
        throw Error(ErrorCode::format_mismatch, "gemm_fxp: A not in " +
                                                    fmt.to_string());
  for (std::size_t z = 0; z < b.rows(); ++z)
    for (std::size_t y = 0; y < b.cols(); ++y)
      if (b(z, y).format() != fmt)
        throw Error(ErrorCode::format_mismatch, "gemm_fxp: B not in " +
                                                    fmt.to_string());

  const auto rows = static_cast<long long>(a.rows());
  const auto cols = static_cast<long long>(b.cols());
  const auto inner = a.cols();
  auto cell = [&](long long x, long long y) {
    std::int64_t sum = 0;
    for (std::size_t z = 0; z < inner; ++z)
      sum = ar.add(ar.mul(a(x, z).raw(), b(z, y).raw()), sum);
    c(x, y) = FxpValue::from_raw(sum, fmt);
  };
  if (exec == Exec::serial) {
    for (long long x = 0; x < rows; ++x)
      for (long long y = 0; y < cols; ++y)
        cell(x, y);
  } else {
#pragma omp parallel for collapse(2) schedule(static)
    for (long long x = 0; x < rows; ++x)
      for (long long y = 0; y < cols; ++y)
        cell(x, y);
  }
  return c;
}

std::vector<FxpValue> activation_forward_fxp(ActivationKind kind, FxpValue alpha,
                                             FxpValue beta,
                                             std::span<const FxpValue> input,
                                             const SigmoidTable &table,
                                             Rounding conversion) {
  const FxpFormat fmt = alpha.format();
  if (beta.format() != fmt)
    throw Error(ErrorCode::format_mismatch,
                "activation_forward_fxp: alpha and beta formats differ");
  require_format(input, fmt, "activation_forward_fxp");
  const FxpArith ar(fmt);
  const std::int64_t one = ar.from_real(1.0, conversion);

  std::vector<FxpValue> out;
  out.reserve(input.size());
  for (const auto &v : input) {
    const std::int64_t scaled = ar.mul(v.raw(), alpha.raw());
    std::int64_t t = 0;
    switch (kind) {
    case ActivationKind::relu:
      t = scaled > 0 ? scaled : 0;
      break;
    case ActivationKind::identity:
      t = scaled;
      break;
    case ActivationKind::sigmoid_lut: {
      const long long idx = sigmoid_index(scaled, fmt.frac_bits(),
                                          table.steps_per_unit(), table.size());
      if (idx < 0)
        t = 0;
      else if (idx >= static_cast<long long>(table.size()))
        t = one;
      else
        t = ar.from_real(table.entry(static_cast<std::size_t>(idx)), conversion);
      break;
    }
    default:
      throw Error(ErrorCode::invalid_argument, "unsupported activation kind");
    }
    out.push_back(FxpValue::from_raw(ar.mul(t, beta.raw()), fmt));
  }
  return out;
}

// ---------------------------------------------------------------------------

QuantizedNetwork::QuantizedNetwork(const Network &net, FxpFormat fmt,
                                   Rounding conversion)
    : source_(std::make_shared<const Network>(net)), arith_(fmt),
      conversion_(conversion),
      steps_per_unit_(net.sigmoid_table().steps_per_unit()) {
  for (const auto &layer : net.layers()) {
    QuantizedLayer q;
    q.fan_in = layer.fan_in;
    q.width = layer.width;
    q.activation = layer.activation;
    q.weights.reserve(layer.weights.size());
    for (double w : layer.weights)
      q.weights.push_back(quantize(w));
    for (double b : layer.biases)
      q.biases.push_back(quantize(b));
    layers_.push_back(std::move(q));
  }
  const auto &entries = net.sigmoid_table().entries();
  sigmoid_entries_.reserve(entries.size());
  for (double e : entries)
    sigmoid_entries_.push_back(quantize(e));
  alpha_ = quantize(1.0);
  beta_ = quantize(1.0);
}

std::vector<std::int64_t>
QuantizedNetwork::quantize_input(std::span<const double> input) const {
  const auto x = source_->prepare_input(input);
  std::vector<std::int64_t> raw;
  raw.reserve(x.size());
  for (double v : x)
    raw.push_back(quantize(v));
  return raw;
}

std::int64_t QuantizedNetwork::activation_raw(ActivationKind kind,
                                              std::int64_t u) const noexcept {
  return raw_activation(kind, u, arith_, steps_per_unit_, sigmoid_entries_,
                        quantize(1.0));
}

std::int64_t QuantizedNetwork::activate(ActivationKind kind,
                                        std::int64_t u) const noexcept {
  const std::int64_t t = activation_raw(kind, arith_.mul(u, alpha_));
  return arith_.mul(t, beta_);
}

long double FxpTrace::potential(std::size_t layer, std::size_t k) const {
  return std::ldexp(static_cast<long double>(potentials.at(layer).at(k)),
                    -format.frac_bits());
}

long double FxpTrace::output(std::size_t layer, std::size_t k) const {
  return std::ldexp(static_cast<long double>(outputs.at(layer).at(k)),
                    -format.frac_bits());
}

std::vector<double> FxpTrace::final_outputs() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < outputs.back().size(); ++k)
    out.push_back(static_cast<double>(output(outputs.size() - 1, k)));
  return out;
}

ActivationTrace FxpTrace::to_activation_trace() const {
  ActivationTrace t;
  const int f = format.frac_bits();
  for (auto r : input_raw)
    t.input.push_back(std::ldexp(static_cast<double>(r), -f));
  auto convert = [f](const std::vector<std::vector<std::int64_t>> &src) {
    std::vector<std::vector<double>> dst;
    for (const auto &row : src) {
      std::vector<double> v;
      for (auto r : row)
        v.push_back(static_cast<double>(std::ldexp(static_cast<long double>(r), -f)));
      dst.push_back(std::move(v));
    }
    return dst;
  };
  t.potentials = convert(potentials);
  t.outputs = convert(outputs);
  return t;
}

FxpTrace forward_fxp_raw(const QuantizedNetwork &qnet,
                         std::span<const std::int64_t> input_raw) {
  const auto &layers = qnet.layers();
  if (input_raw.size() != layers.front().fan_in)
    throw Error(ErrorCode::shape_mismatch,
                "input length " + std::to_string(input_raw.size()) +
                    " != network input size " +
                    std::to_string(layers.front().fan_in));
  const FxpArith &ar = qnet.arith();
  const std::int64_t lo = ar.raw_min();
  const std::int64_t hi = ar.raw_max();
  FxpTrace trace;
  trace.format = qnet.format();
  trace.input_raw.assign(input_raw.begin(), input_raw.end());
  std::size_t events = 0;
  auto clamp = [&](wide_int v) {
    if (v < lo) {
      ++events;
      return lo;
    }
    if (v > hi) {
      ++events;
      return hi;
    }
    return static_cast<std::int64_t>(v);
  };

  const std::vector<std::int64_t> *prev = &trace.input_raw;
  for (const auto &layer : layers) {
    std::vector<std::int64_t> u(layer.width);
    std::vector<std::int64_t> y(layer.width);
    for (std::size_t k = 0; k < layer.width; ++k) {
      const std::int64_t *w = layer.weights.data() + k * layer.fan_in;
      std::int64_t sum = 0;
      for (std::size_t z = 0; z < layer.fan_in; ++z) {
        const std::int64_t prod = clamp(ar.mul_wide(w[z], (*prev)[z]));
        sum = clamp(static_cast<wide_int>(prod) + sum);
      }
      u[k] = clamp(static_cast<wide_int>(sum) + layer.biases[k]);
      y[k] = qnet.activate(layer.activation, u[k]);
    }
    trace.potentials.push_back(std::move(u));
    trace.outputs.push_back(std::move(y));
    prev = &trace.outputs.back();
  }
  trace.saturation_events = events;
  return trace;
}

FxpTrace forward_fxp(const QuantizedNetwork &qnet, std::span<const double> input) {
  if (input.size() != qnet.layers().front().fan_in)
    throw Error(ErrorCode::shape_mismatch,
                "input length " + std::to_string(input.size()) +
                    " != network input size " +
                    std::to_string(qnet.layers().front().fan_in));
  auto trace = forward_fxp_raw(qnet, qnet.quantize_input(input));
  trace.input.assign(input.begin(), input.end());
  return trace;
}

FxpTrace forward_fxp(const Network &net, std::span<const double> input,
                     FxpFormat fmt, Rounding conversion) {
  return forward_fxp(QuantizedNetwork(net, fmt, conversion), input);
}

std::vector<FxpTrace> forward_fxp_batch(const QuantizedNetwork &qnet,
                                        std::span<const std::vector<double>> inputs,
                                        Exec exec) {
  for (const auto &x : inputs)
    if (x.size() != qnet.layers().front().fan_in)
      throw Error(ErrorCode::shape_mismatch, "batch input has wrong length");
  std::vector<FxpTrace> traces(inputs.size());
  const auto n = static_cast<long long>(inputs.size());
  if (exec == Exec::serial) {
    for (long long i = 0; i < n; ++i)
      traces[i] = forward_fxp(qnet, inputs[i]);
    return traces;
  }
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i)
    traces[i] = forward_fxp(qnet, inputs[i]);
  return traces;
}

ConformanceReport conformance_diff(const Network &net,
                                   std::span<const std::vector<double>> inputs,
                                   FxpFormat fmt,
                                   const ConformanceOptions &options) {
  ConformanceReport report;
  report.format = fmt;
  report.conversion = options.conversion;
  report.threshold = options.threshold;
  if (inputs.empty())
    return report;

  const QuantizedNetwork qnet(net, fmt, options.conversion);
  const auto float_traces = forward_float_batch(net, inputs, options.exec);
  const auto fxp_traces = forward_fxp_batch(qnet, inputs, options.exec);

  report.per_input.resize(inputs.size());
  const auto n = static_cast<long long>(inputs.size());
  auto compare = [&](long long i) {
    const auto &ft = float_traces[i];
    const auto &xt = fxp_traces[i];
    ConformanceEntry e;
    e.input = inputs[i];
    double total = 0;
    std::size_t count = 0;
    for (std::size_t l = 0; l < ft.potentials.size(); ++l)
      for (std::size_t k = 0; k < ft.potentials[l].size(); ++k) {
        const double du = std::fabs(
            static_cast<double>(static_cast<long double>(ft.potentials[l][k]) -
                                xt.potential(l, k)));
        const double dy = std::fabs(
            static_cast<double>(static_cast<long double>(ft.outputs[l][k]) -
                                xt.output(l, k)));
        e.max_abs_dev = std::max({e.max_abs_dev, du, dy});
        total += du + dy;
        count += 2;
      }
    e.mean_abs_dev = count ? total / static_cast<double>(count) : 0.0;
    e.class_float = classify(ft, options.threshold);
    e.class_fxp = classify(xt.final_outputs(), options.threshold);
    e.saturation_events = xt.saturation_events;
    report.per_input[i] = std::move(e);
  };
  if (options.exec == Exec::serial) {
    for (long long i = 0; i < n; ++i)
      compare(i);
  } else {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i)
      compare(i);
  }

  auto &s = report.summary;
  s.inputs = report.per_input.size();
  double total = 0;
  for (const auto &e : report.per_input) {
    s.max_abs_dev = std::max(s.max_abs_dev, e.max_abs_dev);
    total += e.mean_abs_dev;
    s.classification_flips += e.flipped() ? 1 : 0;
    s.saturation_events += e.saturation_events;
  }
  s.mean_abs_dev = total / static_cast<double>(s.inputs);
  return report;
}

} // namespace nnverify
