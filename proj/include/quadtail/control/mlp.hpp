#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quadtail/math/types.hpp"

namespace quadtail {

enum class Activation { kTanh, kElu };

Activation parse_activation(const std::string& name);
const char* to_string(Activation a);

/// Fully connected network with a linear output layer. Batches are column
/// matrices (one sample per column).
class Mlp {
 public:
  struct Cache {
    std::vector<MatX> inputs;  // input of every layer
    std::vector<MatX> pre;     // pre-activation of every hidden layer
  };

  Mlp() = default;
  Mlp(std::vector<int> sizes, Activation activation);

  /// Gaussian weights scaled by gain / sqrt(fan_in), zero biases. The last
  /// layer uses `output_gain`.
  void initialize(std::uint64_t seed, double output_gain = 1.0);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return activation_; }
  int num_layers() const { return static_cast<int>(weights_.size()); }

  MatX forward(const MatX& x) const;
  MatX forward(const MatX& x, Cache& cache) const;
  VecX forward_one(const VecX& x) const;

  /// Accumulates dL/dparams into `grad` (flat layout of parameters()) given
  /// dL/doutput; returns dL/dinput.
  MatX backward(const Cache& cache, const MatX& grad_output, VecX& grad) const;

  int num_parameters() const;
  VecX parameters() const;
  void set_parameters(const VecX& flat);

  const MatX& weight(int layer) const { return weights_.at(layer); }
  const VecX& bias(int layer) const { return biases_.at(layer); }
  MatX& weight(int layer) { return weights_.at(layer); }
  VecX& bias(int layer) { return biases_.at(layer); }

 private:
  std::vector<int> sizes_;
  Activation activation_ = Activation::kElu;
  std::vector<MatX> weights_;
  std::vector<VecX> biases_;
};

}  // namespace quadtail
