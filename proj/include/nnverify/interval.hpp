#pragma once

// Rectangular bounds on inputs, potentials and outputs. Real-valued
// propagation widens each affine image outward by a floating rounding bound,
// so it contains every concrete forward_float result. The fixed-point variant
// runs the exact fixed-point operators on interval endpoints.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nnverify/ann.hpp"
#include "nnverify/fxp.hpp"
#include "nnverify/opmodel.hpp"

namespace nnverify {

struct Interval {
  double lo = 0;
  double hi = 0;

  Interval() = default;
  /// Throws Error(invalid_argument) when lo > hi or either end is NaN.
  Interval(double lo, double hi);

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool contains(const Interval &o) const noexcept {
    return lo <= o.lo && o.hi <= hi;
  }
  friend bool operator==(const Interval &, const Interval &) = default;
};

using Box = std::vector<Interval>;

Box point_box(std::span<const double> x);

struct LayerBounds {
  std::vector<std::vector<Interval>> potentials;
  std::vector<std::vector<Interval>> outputs;

  /// True when every potential and output of the trace lies in its interval.
  bool contains(const ActivationTrace &trace) const;
};

std::vector<Interval> propagate_affine(const Layer &layer, const Box &in);

std::vector<Interval> propagate_activation(ActivationKind kind,
                                           const std::vector<Interval> &in,
                                           const SigmoidTable &table =
                                               *SigmoidTable::shared_default());

LayerBounds propagate_network(const Network &net, const Box &in);

/// Replaces intervals that are unbounded or reach outside `limit` by `limit`.
Box widen(const Box &b, Interval limit = Interval(-20.0, 20.0));

/// Bisects the widest dimension (lowest index on ties) at its midpoint; with a
/// format the midpoint is rounded down to that format's grid.
std::pair<Box, Box> split(const Box &b,
                          std::optional<FxpFormat> grid = std::nullopt);

// ---------------------------------------------------------------------------
// Fixed-point bounds

struct RawInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  friend bool operator==(const RawInterval &, const RawInterval &) = default;
};

struct FxpLayerBounds {
  FxpFormat format{32, 32};
  std::vector<std::vector<RawInterval>> potentials;
  std::vector<std::vector<RawInterval>> outputs;

  bool contains(const FxpTrace &trace) const;
  /// Real view, rounded outward to double.
  LayerBounds to_real() const;
};

/// Sound bounds for forward_fxp_raw over every raw input inside `in`.
FxpLayerBounds propagate_network_fxp(const QuantizedNetwork &qnet,
                                     std::span<const RawInterval> in);

/// Raw bounds of the conversion of every real input in `b` (conversion is
/// monotone, so converting the endpoints suffices).
std::vector<RawInterval> quantize_box(const QuantizedNetwork &qnet, const Box &b);

} // namespace nnverify
