#pragma once

#include <cstdint>

#include "quadtail/math/types.hpp"

namespace quadtail {

/// Adam with bias correction (Kingma and Ba), applied to a flat parameter
/// vector. The learning rate may change between steps.
class Adam {
 public:
  Adam() = default;
  Adam(int size, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  /// params -= lr * m_hat / (sqrt(v_hat) + eps)
  void step(VecX& params, const VecX& grad, double lr);

  std::int64_t steps() const { return t_; }
  const VecX& first_moment() const { return m_; }
  const VecX& second_moment() const { return v_; }
  void set_state(std::int64_t t, const VecX& m, const VecX& v);

 private:
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double epsilon_ = 1e-8;
  std::int64_t t_ = 0;
  VecX m_;
  VecX v_;
};

}  // namespace quadtail
