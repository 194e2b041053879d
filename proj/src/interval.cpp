#include "nnverify/interval.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "nnverify/error.hpp"

namespace nnverify {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi)
    throw Error(ErrorCode::invalid_argument, "interval with lo > hi");
}

Box point_box(std::span<const double> x) {
  Box b;
  for (double v : x)
    b.emplace_back(v, v);
  return b;
}

bool LayerBounds::contains(const ActivationTrace &trace) const {
  if (trace.potentials.size() != potentials.size())
    return false;
  for (std::size_t l = 0; l < potentials.size(); ++l)
    for (std::size_t k = 0; k < potentials[l].size(); ++k)
      if (!potentials[l][k].contains(trace.potentials[l][k]) ||
          !outputs[l][k].contains(trace.outputs[l][k]))
        return false;
  return true;
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double down(double x) { return std::nextafter(x, -inf); }
double up(double x) { return std::nextafter(x, inf); }

} // namespace

// The concrete pass sums fan_in products left to right and then adds the
// bias; each of those roundings is bounded by eps times the running
// magnitude, and so is each rounding of the interval sums below. Doubling
// the standard (n+2)*eps bound covers both sides.
std::vector<Interval> propagate_affine(const Layer &layer, const Box &in) {
  if (in.size() != layer.fan_in)
    throw Error(ErrorCode::shape_mismatch,
                "box dimension " + std::to_string(in.size()) +
                    " != layer fan-in " + std::to_string(layer.fan_in));
  const double slack =
      2.0 * static_cast<double>(layer.fan_in + 2) * DBL_EPSILON;
  std::vector<Interval> out;
  out.reserve(layer.width);
  for (std::size_t k = 0; k < layer.width; ++k) {
    double lo = 0, hi = 0, mag = 0;
    for (std::size_t j = 0; j < layer.fan_in; ++j) {
      const double w = layer.weight(k, j);
      const double a = w * in[j].lo;
      const double b = w * in[j].hi;
      lo += std::min(a, b);
      hi += std::max(a, b);
      mag += std::max(std::fabs(a), std::fabs(b));
    }
    const double bias = layer.biases[k];
    lo += bias;
    hi += bias;
    mag += std::fabs(bias);
    const double err = slack * mag + DBL_MIN;
    out.emplace_back(down(lo - err), up(hi + err));
  }
  return out;
}

std::vector<Interval> propagate_activation(ActivationKind kind,
                                           const std::vector<Interval> &in,
                                           const SigmoidTable &table) {
  std::vector<Interval> out;
  out.reserve(in.size());
  for (const auto &iv : in) {
    switch (kind) {
    case ActivationKind::relu:
      out.emplace_back(relu(iv.lo), relu(iv.hi));
      break;
    case ActivationKind::identity:
      out.push_back(iv);
      break;
    case ActivationKind::sigmoid_lut: {
      const double lo = std::clamp(sigmoid_lut(iv.lo, table), 0.0, 1.0);
      const double hi = std::clamp(sigmoid_lut(iv.hi, table), 0.0, 1.0);
      out.emplace_back(lo, hi);
      break;
    }
    }
  }
  return out;
}

LayerBounds propagate_network(const Network &net, const Box &in) {
  if (in.size() != net.input_size())
    throw Error(ErrorCode::shape_mismatch,
                "box dimension " + std::to_string(in.size()) +
                    " != network input size " +
                    std::to_string(net.input_size()));
  Box x = in;
  if (net.metadata().normalize) {
    // Normalization is an increasing map per input (ranges are positive).
    std::vector<double> lo, hi;
    for (const auto &iv : in) {
      lo.push_back(iv.lo);
      hi.push_back(iv.hi);
    }
    const auto nlo = net.prepare_input(lo);
    const auto nhi = net.prepare_input(hi);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = Interval(down(std::min(nlo[i], nhi[i])), up(std::max(nlo[i], nhi[i])));
  }
  LayerBounds bounds;
  const Box *prev = &x;
  for (const auto &layer : net.layers()) {
    auto u = propagate_affine(layer, *prev);
    auto y = propagate_activation(layer.activation, u, net.sigmoid_table());
    bounds.potentials.push_back(std::move(u));
    bounds.outputs.push_back(std::move(y));
    prev = &bounds.outputs.back();
  }
  return bounds;
}

Box widen(const Box &b, Interval limit) {
  Box out;
  out.reserve(b.size());
  for (const auto &iv : b) {
    if (std::isinf(iv.lo) || std::isinf(iv.hi) || iv.lo < limit.lo ||
        iv.hi > limit.hi)
      out.push_back(limit);
    else
      out.push_back(iv);
  }
  return out;
}

std::pair<Box, Box> split(const Box &b, std::optional<FxpFormat> grid) {
  std::size_t dim = b.size();
  double widest = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i].width() > widest) {
      widest = b[i].width();
      dim = i;
    }
  if (dim == b.size())
    throw Error(ErrorCode::invalid_argument,
                "split: every dimension has zero width");
  double mid = b[dim].lo + (b[dim].hi - b[dim].lo) / 2;
  if (grid) {
    const double scale = std::ldexp(1.0, grid->frac_bits());
    mid = std::floor(mid * scale) / scale;
    mid = std::clamp(mid, b[dim].lo, b[dim].hi);
  }
  Box left = b, right = b;
  left[dim].hi = mid;
  right[dim].lo = mid;
  return {std::move(left), std::move(right)};
}

// ---------------------------------------------------------------------------

bool FxpLayerBounds::contains(const FxpTrace &trace) const {
  if (trace.potentials.size() != potentials.size())
    return false;
  for (std::size_t l = 0; l < potentials.size(); ++l)
    for (std::size_t k = 0; k < potentials[l].size(); ++k) {
      const auto u = trace.potentials[l][k];
      const auto y = trace.outputs[l][k];
      if (u < potentials[l][k].lo || u > potentials[l][k].hi ||
          y < outputs[l][k].lo || y > outputs[l][k].hi)
        return false;
    }
  return true;
}

namespace {

double raw_down(std::int64_t raw, int frac) {
  const long double exact = std::ldexp(static_cast<long double>(raw), -frac);
  const double d = static_cast<double>(exact);
  return static_cast<long double>(d) > exact ? down(d) : d;
}

double raw_up(std::int64_t raw, int frac) {
  const long double exact = std::ldexp(static_cast<long double>(raw), -frac);
  const double d = static_cast<double>(exact);
  return static_cast<long double>(d) < exact ? up(d) : d;
}

} // namespace

LayerBounds FxpLayerBounds::to_real() const {
  const int f = format.frac_bits();
  auto convert = [f](const std::vector<std::vector<RawInterval>> &src) {
    std::vector<std::vector<Interval>> dst;
    for (const auto &row : src) {
      std::vector<Interval> v;
      for (const auto &r : row)
        v.emplace_back(raw_down(r.lo, f), raw_up(r.hi, f));
      dst.push_back(std::move(v));
    }
    return dst;
  };
  return {convert(potentials), convert(outputs)};
}

// Every step of forward_fxp_raw is monotone in its variable operand: a
// product with a fixed weight (direction by the weight's sign), saturating
// addition, and the activations. Folding lower ends with lower ends and
// upper with upper therefore brackets every concrete run.
FxpLayerBounds propagate_network_fxp(const QuantizedNetwork &qnet,
                                     std::span<const RawInterval> in) {
  const auto &layers = qnet.layers();
  if (in.size() != layers.front().fan_in)
    throw Error(ErrorCode::shape_mismatch,
                "box dimension " + std::to_string(in.size()) +
                    " != network input size " +
                    std::to_string(layers.front().fan_in));
  const FxpArith &ar = qnet.arith();
  FxpLayerBounds bounds;
  bounds.format = qnet.format();
  std::vector<RawInterval> x(in.begin(), in.end());
  for (const auto &r : x)
    if (r.lo > r.hi)
      throw Error(ErrorCode::invalid_argument, "raw interval with lo > hi");
  const std::vector<RawInterval> *prev = &x;
  for (const auto &layer : layers) {
    std::vector<RawInterval> u(layer.width), y(layer.width);
    for (std::size_t k = 0; k < layer.width; ++k) {
      const std::int64_t *w = layer.weights.data() + k * layer.fan_in;
      std::int64_t lo = 0, hi = 0;
      for (std::size_t z = 0; z < layer.fan_in; ++z) {
        const auto &xi = (*prev)[z];
        std::int64_t plo = ar.mul(w[z], xi.lo);
        std::int64_t phi = ar.mul(w[z], xi.hi);
        if (w[z] < 0)
          std::swap(plo, phi);
        lo = ar.add(plo, lo);
        hi = ar.add(phi, hi);
      }
      u[k] = {ar.add(lo, layer.biases[k]), ar.add(hi, layer.biases[k])};
      y[k] = {qnet.activate(layer.activation, u[k].lo),
              qnet.activate(layer.activation, u[k].hi)};
    }
    bounds.potentials.push_back(std::move(u));
    bounds.outputs.push_back(std::move(y));
    prev = &bounds.outputs.back();
  }
  return bounds;
}

std::vector<RawInterval> quantize_box(const QuantizedNetwork &qnet,
                                      const Box &b) {
  std::vector<double> lo, hi;
  for (const auto &iv : b) {
    lo.push_back(iv.lo);
    hi.push_back(iv.hi);
  }
  const auto rlo = qnet.quantize_input(lo);
  const auto rhi = qnet.quantize_input(hi);
  std::vector<RawInterval> out;
  for (std::size_t i = 0; i < b.size(); ++i)
    out.push_back({std::min(rlo[i], rhi[i]), std::max(rlo[i], rhi[i])});
  return out;
}

} // namespace nnverify
