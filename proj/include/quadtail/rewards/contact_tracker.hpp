#pragma once

#include <vector>

namespace quadtail {

struct FootPhase {
  bool contact = false;
  double stance_time = 0.0;  // T_s, current stance so far
  double air_time = 0.0;     // T_a, current swing so far
  double last_stance_time = 0.0;
  double last_air_time = 0.0;

  double max_time() const { return stance_time > air_time ? stance_time : air_time; }
};

/// Per-foot stance/swing timers. Exactly one of the two timers of a foot
/// accumulates per update; the other is zero.
class FootContactTracker {
 public:
  explicit FootContactTracker(int num_feet = 4);

  /// Sets the flags without accumulating time (episode start).
  void reset(const std::vector<bool>& contact);
  void update(const std::vector<bool>& contact, double dt);

  int num_feet() const { return static_cast<int>(feet_.size()); }
  const FootPhase& foot(int i) const { return feet_.at(i); }
  const std::vector<FootPhase>& feet() const { return feet_; }
  std::vector<bool> contact_flags() const;

 private:
  std::vector<FootPhase> feet_;
};

}  // namespace quadtail
