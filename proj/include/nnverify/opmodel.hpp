#pragma once

// Fixed-point operational models of the two library primitives a CUDA MLP
// calls per layer: a GEMM (C = A * B, accumulating over the inner index in order) and an element-wise
// activation-forward with alpha/beta scaling. forward_fxp composes them into
// a bit-exact fixed-point forward pass.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nnverify/ann.hpp"
#include "nnverify/fxp.hpp"
#include "nnverify/parallel.hpp"

namespace nnverify {

template <class T> class Matrix {
public:
  Matrix(std::size_t rows, std::size_t cols, T fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T &operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<T> data_;
};

/// C = A * B with A: k x j, B: j x i. Each C[x][y] accumulates
/// sum = fxp_add(fxp_mul(A[x][z], B[z][y]), sum) for z = 0..j-1 in order,
/// saturating at every step. The parallel form distributes output cells, so
/// both forms are bit-identical.
Matrix<FxpValue> gemm_fxp(const Matrix<FxpValue> &a, const Matrix<FxpValue> &b,
                          FxpFormat fmt, Exec exec = Exec::serial);

/// Per element: t = act(fxp_mul(input[i], alpha)); out[i] = fxp_mul(t, beta).
/// The sigmoid branch quantizes the potential's table index exactly and the
/// table entry with `conversion`.
std::vector<FxpValue>
activation_forward_fxp(ActivationKind kind, FxpValue alpha, FxpValue beta,
                       std::span<const FxpValue> input,
                       const SigmoidTable &table = *SigmoidTable::shared_default(),
                       Rounding conversion = Rounding::toward_zero);

struct QuantizedLayer {
  std::size_t fan_in = 0;
  std::size_t width = 0;
  std::vector<std::int64_t> weights; // row-major, one row per neuron
  std::vector<std::int64_t> biases;
  ActivationKind activation = ActivationKind::relu;
};

/// A network with weights, biases and the sigmoid table converted once to a
/// fixed-point format, as a deployed fixed-point implementation holds them.
class QuantizedNetwork {
public:
  QuantizedNetwork(const Network &net, FxpFormat fmt,
                   Rounding conversion = Rounding::toward_zero);

  const Network &source() const noexcept { return *source_; }
  FxpFormat format() const noexcept { return arith_.format(); }
  const FxpArith &arith() const noexcept { return arith_; }
  Rounding conversion() const noexcept { return conversion_; }
  const std::vector<QuantizedLayer> &layers() const noexcept { return layers_; }
  std::int64_t alpha() const noexcept { return alpha_; }
  std::int64_t beta() const noexcept { return beta_; }

  std::int64_t quantize(double x) const { return arith_.from_real(x, conversion_); }
  /// Normalizes (when enabled) and converts an input vector.
  std::vector<std::int64_t> quantize_input(std::span<const double> input) const;

  /// Activation of one raw potential, alpha/beta scaling included.
  std::int64_t activate(ActivationKind kind, std::int64_t u) const noexcept;
  /// The unscaled activation function alone; monotone nondecreasing in u.
  std::int64_t activation_raw(ActivationKind kind, std::int64_t u) const noexcept;

private:
  std::shared_ptr<const Network> source_;
  FxpArith arith_;
  Rounding conversion_;
  std::vector<QuantizedLayer> layers_;
  std::vector<std::int64_t> sigmoid_entries_;
  int steps_per_unit_;
  std::int64_t alpha_;
  std::int64_t beta_;
};

/// Fixed-point activation trace with raw values; real views are exact as
/// long double.
struct FxpTrace {
  FxpFormat format{32, 32};
  std::vector<double> input;          // as supplied
  std::vector<std::int64_t> input_raw;
  std::vector<std::vector<std::int64_t>> potentials;
  std::vector<std::vector<std::int64_t>> outputs;
  /// Number of additions/multiplications that clamped to the format range.
  std::size_t saturation_events = 0;

  long double potential(std::size_t layer, std::size_t k) const;
  long double output(std::size_t layer, std::size_t k) const;
  std::vector<double> final_outputs() const;
  /// Real-valued view (rounded to double) for coverage and reporting.
  ActivationTrace to_activation_trace() const;
};

FxpTrace forward_fxp(const QuantizedNetwork &qnet, std::span<const double> input);
/// Entry point for inputs that are already raw grid values.
FxpTrace forward_fxp_raw(const QuantizedNetwork &qnet,
                         std::span<const std::int64_t> input_raw);
/// Convenience: quantizes the network on every call.
FxpTrace forward_fxp(const Network &net, std::span<const double> input,
                     FxpFormat fmt, Rounding conversion = Rounding::toward_zero);

std::vector<FxpTrace> forward_fxp_batch(const QuantizedNetwork &qnet,
                                        std::span<const std::vector<double>> inputs,
                                        Exec exec = Exec::parallel);

struct ConformanceEntry {
  std::vector<double> input;
  double max_abs_dev = 0;
  double mean_abs_dev = 0;
  std::optional<std::size_t> class_float;
  std::optional<std::size_t> class_fxp;
  std::size_t saturation_events = 0;

  bool flipped() const noexcept { return class_float != class_fxp; }
};

struct ConformanceSummary {
  std::size_t inputs = 0;
  double max_abs_dev = 0;
  double mean_abs_dev = 0;
  std::size_t classification_flips = 0;
  std::size_t saturation_events = 0;
};

struct ConformanceReport {
  FxpFormat format{32, 32};
  Rounding conversion = Rounding::toward_zero;
  double threshold = 0.5;
  std::vector<ConformanceEntry> per_input;
  ConformanceSummary summary;
};

struct ConformanceOptions {
  double threshold = 0.5;
  Rounding conversion = Rounding::toward_zero;
  Exec exec = Exec::parallel;
};

/// Compares the float oracle against the fixed-point model neuron by neuron
/// (potentials and outputs of every layer).
ConformanceReport conformance_diff(const Network &net,
                                   std::span<const std::vector<double>> inputs,
                                   FxpFormat fmt,
                                   const ConformanceOptions &options = {});

} // namespace nnverify
