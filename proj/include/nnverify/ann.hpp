#pragma once

// Multilayer perceptron model, .nnet parsing and the double-precision
// reference forward pass used as the oracle for the fixed-point model.

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnverify/parallel.hpp"

namespace nnverify {

enum class ActivationKind { relu, sigmoid_lut, identity };

std::string to_string(ActivationKind kind);
ActivationKind parse_activation(std::string_view text);

/// Sigmoid lookup table over [-bound, bound). Entry i holds
/// sigmoid(i * step - bound); inputs below the table map to 0 and inputs at or
/// beyond its end map to 1.
class SigmoidTable {
public:
  /// steps_per_unit = 1 / step (100 gives the 0.01 step, 4000 entries).
  explicit SigmoidTable(int steps_per_unit = 100, int bound = 20);

  static std::shared_ptr<const SigmoidTable> shared_default();

  int steps_per_unit() const noexcept { return steps_per_unit_; }
  int bound() const noexcept { return bound_; }
  double step() const noexcept { return 1.0 / steps_per_unit_; }
  std::size_t size() const noexcept { return entries_.size(); }
  double entry(std::size_t i) const { return entries_.at(i); }
  const std::vector<double> &entries() const noexcept { return entries_; }

  /// floor(u * steps_per_unit + size/2); may fall outside [0, size).
  long long index_of(double u) const noexcept;

  double lookup(double u) const noexcept;

private:
  int steps_per_unit_;
  int bound_;
  std::vector<double> entries_;
};

struct Layer {
  std::size_t fan_in = 0;
  std::size_t width = 0;
  /// Row-major, one row per neuron: weights[k * fan_in + j] = w_{j,k}.
  std::vector<double> weights;
  std::vector<double> biases;
  ActivationKind activation = ActivationKind::relu;

  double weight(std::size_t k, std::size_t j) const {
    return weights[k * fan_in + j];
  }
};

struct NetworkMetadata {
  std::string name;
  std::vector<double> input_mins;
  std::vector<double> input_maxes;
  std::vector<double> means;
  std::vector<double> ranges;
  /// Apply (clamp(x, min, max) - mean) / range to inputs before layer 1.
  bool normalize = false;
};

class Network {
public:
  Network() = default;
  /// Validates shapes and finiteness; throws Error(shape_mismatch) or
  /// Error(invalid_argument).
  Network(std::vector<Layer> layers, NetworkMetadata meta = {},
          std::shared_ptr<const SigmoidTable> table = nullptr);

  const std::vector<Layer> &layers() const noexcept { return layers_; }
  const Layer &layer(std::size_t l) const { return layers_.at(l); }
  std::size_t num_layers() const noexcept { return layers_.size(); }
  std::size_t input_size() const;
  std::size_t output_size() const;
  /// NT: neurons over all computing layers (inputs excluded).
  std::size_t num_neurons() const noexcept;
  std::vector<std::size_t> widths() const;

  const NetworkMetadata &metadata() const noexcept { return meta_; }
  const SigmoidTable &sigmoid_table() const noexcept { return *table_; }
  std::shared_ptr<const SigmoidTable> sigmoid_table_ptr() const noexcept {
    return table_;
  }

  Network with_table(std::shared_ptr<const SigmoidTable> table) const;
  Network with_activations(ActivationKind hidden, ActivationKind output) const;

  /// Applies the metadata normalization when enabled; otherwise returns a copy.
  std::vector<double> prepare_input(std::span<const double> input) const;

private:
  std::vector<Layer> layers_;
  NetworkMetadata meta_;
  std::shared_ptr<const SigmoidTable> table_ = SigmoidTable::shared_default();
};

/// Per-neuron activation potentials u_{k,l} and outputs y_{k,l} of one input.
struct ActivationTrace {
  std::vector<double> input;
  std::vector<std::vector<double>> potentials;
  std::vector<std::vector<double>> outputs;

  const std::vector<double> &final_outputs() const { return outputs.back(); }
};

struct ParseOptions {
  /// Overrides the file's "// activations:" directive when set.
  std::optional<ActivationKind> hidden;
  std::optional<ActivationKind> output;
  bool normalize = false;
  std::shared_ptr<const SigmoidTable> table;
};

/// Parses the .nnet text format. Defaults without a directive: ReLU hidden
/// layers, identity output. A comment line "// activations: a,b,c" assigns one
/// kind per layer.
Network parse_nnet(std::istream &in, const ParseOptions &options = {});
Network parse_nnet(std::string_view text, const ParseOptions &options = {});
Network load_nnet(const std::string &path, const ParseOptions &options = {});

/// Writes a .nnet text that parse_nnet reads back to an identical network.
std::string serialize_nnet(const Network &net);

double relu(double x) noexcept;
double sigmoid_exact(double u) noexcept;
double sigmoid_lut(double u, const SigmoidTable &table) noexcept;
double activate(ActivationKind kind, double u, const SigmoidTable &table);

/// u[k] = sum_j w[k][j] * input[j] + b[k] in double precision.
std::vector<double> activation_potential(const Layer &layer,
                                         std::span<const double> input);

ActivationTrace forward_float(const Network &net, std::span<const double> input);

/// One forward pass per input; the parallel form splits inputs across threads.
std::vector<ActivationTrace>
forward_float_batch(const Network &net,
                    std::span<const std::vector<double>> inputs,
                    Exec exec = Exec::parallel);

/// The unique output index >= threshold; among several, the largest output
/// (lowest index on ties); none when no output reaches the threshold.
std::optional<std::size_t> classify(std::span<const double> outputs,
                                    double threshold);
std::optional<std::size_t> classify(const ActivationTrace &trace,
                                    double threshold);

} // namespace nnverify
