#include "quadtail/ppo/adam.hpp"

#include <cmath>

#include "quadtail/common/errors.hpp"

namespace quadtail {

Adam::Adam(int size, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(VecX::Zero(size)), v_(VecX::Zero(size)) {}

void Adam::step(VecX& params, const VecX& grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw PreconditionError("Adam: size mismatch");
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + epsilon_);
}

void Adam::set_state(std::int64_t t, const VecX& m, const VecX& v) {
  if (m.size() != m_.size() || v.size() != v_.size()) throw PreconditionError("Adam state size mismatch");
  t_ = t;
  m_ = m;
  v_ = v;
}

}  // namespace quadtail
