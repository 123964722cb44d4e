#include "quadtail/control/mlp.hpp"

#include <cmath>

#include "quadtail/common/errors.hpp"
#include "quadtail/common/random.hpp"

namespace quadtail {
namespace {

MatX activate(const MatX& z, Activation a) {
  if (a == Activation::kTanh) return z.array().tanh().matrix();
  return z.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
}

// derivative given pre-activation
MatX activation_grad(const MatX& z, Activation a) {
  if (a == Activation::kTanh) return (1.0 - z.array().tanh().square()).matrix();
  return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); });
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "elu") return Activation::kElu;
  throw ConfigError("network.activation", "expected tanh or elu");
}

const char* to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "elu"; }

Mlp::Mlp(std::vector<int> sizes, Activation activation)
    : sizes_(std::move(sizes)), activation_(activation) {
  if (sizes_.size() < 2) throw PreconditionError("an MLP needs input and output sizes");
  for (int s : sizes_) {
    if (s <= 0) throw PreconditionError("layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.push_back(MatX::Zero(sizes_[l + 1], sizes_[l]));
    biases_.push_back(VecX::Zero(sizes_[l + 1]));
  }
}

void Mlp::initialize(std::uint64_t seed, double output_gain) {
  Rng rng(seed);
  for (int l = 0; l < num_layers(); ++l) {
    const bool last = l + 1 == num_layers();
    const double gain = last ? output_gain : std::sqrt(2.0);
    const double scale = gain / std::sqrt(static_cast<double>(weights_[l].cols()));
    for (Eigen::Index i = 0; i < weights_[l].size(); ++i) weights_[l].data()[i] = scale * standard_normal(rng);
    biases_[l].setZero();
  }
}

MatX Mlp::forward(const MatX& x) const {
  if (x.rows() != input_size()) throw PreconditionError("MLP input dimension mismatch");
  MatX h = x;
  for (int l = 0; l < num_layers(); ++l) {
    MatX z = weights_[l] * h;
    z.colwise() += biases_[l];
    h = l + 1 == num_layers() ? std::move(z) : activate(z, activation_);
  }
  return h;
}

MatX Mlp::forward(const MatX& x, Cache& cache) const {
  if (x.rows() != input_size()) throw PreconditionError("MLP input dimension mismatch");
  cache.inputs.clear();
  cache.pre.clear();
  MatX h = x;
  for (int l = 0; l < num_layers(); ++l) {
    cache.inputs.push_back(h);
    MatX z = weights_[l] * h;
    z.colwise() += biases_[l];
    if (l + 1 == num_layers()) return z;
    h = activate(z, activation_);
    cache.pre.push_back(std::move(z));
  }
  return h;
}

VecX Mlp::forward_one(const VecX& x) const { return forward(MatX(x)).col(0); }

MatX Mlp::backward(const Cache& cache, const MatX& grad_output, VecX& grad) const {
  if (grad.size() != num_parameters()) throw PreconditionError("gradient buffer size mismatch");
  // offsets of each layer in the flat vector
  std::vector<Eigen::Index> offset(num_layers());
  Eigen::Index pos = 0;
  for (int l = 0; l < num_layers(); ++l) {
    offset[l] = pos;
    pos += weights_[l].size() + biases_[l].size();
  }
  MatX delta = grad_output;
  for (int l = num_layers() - 1; l >= 0; --l) {
    if (l + 1 < num_layers()) delta = delta.cwiseProduct(activation_grad(cache.pre[l], activation_));
    Eigen::Map<MatX> gw(grad.data() + offset[l], weights_[l].rows(), weights_[l].cols());
    Eigen::Map<VecX> gb(grad.data() + offset[l] + weights_[l].size(), biases_[l].size());
    gw.noalias() += delta * cache.inputs[l].transpose();
    gb += delta.rowwise().sum();
    delta = weights_[l].transpose() * delta;
  }
  return delta;
}

int Mlp::num_parameters() const {
  Eigen::Index n = 0;
  for (int l = 0; l < num_layers(); ++l) n += weights_[l].size() + biases_[l].size();
  return static_cast<int>(n);
}

VecX Mlp::parameters() const {
  VecX flat(num_parameters());
  Eigen::Index pos = 0;
  for (int l = 0; l < num_layers(); ++l) {
    flat.segment(pos, weights_[l].size()) = Eigen::Map<const VecX>(weights_[l].data(), weights_[l].size());
    pos += weights_[l].size();
    flat.segment(pos, biases_[l].size()) = biases_[l];
    pos += biases_[l].size();
  }
  return flat;
}

void Mlp::set_parameters(const VecX& flat) {
  if (flat.size() != num_parameters()) throw PreconditionError("parameter vector size mismatch");
  Eigen::Index pos = 0;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::Map<VecX>(weights_[l].data(), weights_[l].size()) = flat.segment(pos, weights_[l].size());
    pos += weights_[l].size();
    biases_[l] = flat.segment(pos, biases_[l].size());
    pos += biases_[l].size();
  }
}

}  // namespace quadtail
