#include "quadtail/rewards/contact_tracker.hpp"

#include <string>

#include "quadtail/common/errors.hpp"

namespace quadtail {

FootContactTracker::FootContactTracker(int num_feet) {
  if (num_feet < 0) throw PreconditionError("negative foot count");
  feet_.resize(num_feet);
}

void FootContactTracker::reset(const std::vector<bool>& contact) {
  if (contact.size() != feet_.size()) throw PreconditionError("contact flag count mismatch");
  for (std::size_t i = 0; i < feet_.size(); ++i) feet_[i] = FootPhase{contact[i]};
}

void FootContactTracker::update(const std::vector<bool>& contact, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("tracker update requires dt > 0");
  if (contact.size() != feet_.size()) throw PreconditionError("contact flag count mismatch");
  for (std::size_t i = 0; i < feet_.size(); ++i) {
    FootPhase& f = feet_[i];
    if (contact[i]) {
      if (!f.contact) {  // touchdown
        f.last_air_time = f.air_time;
        f.air_time = 0.0;
        f.stance_time = 0.0;
      }
      f.stance_time += dt;
    } else {
      if (f.contact) {  // liftoff
        f.last_stance_time = f.stance_time;
        f.stance_time = 0.0;
        f.air_time = 0.0;
      }
      f.air_time += dt;
    }
    f.contact = contact[i];
  }
}

std::vector<bool> FootContactTracker::contact_flags() const {
  std::vector<bool> out(feet_.size());
  for (std::size_t i = 0; i < feet_.size(); ++i) out[i] = feet_[i].contact;
  return out;
}

}  // namespace quadtail
