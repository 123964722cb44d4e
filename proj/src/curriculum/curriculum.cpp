#include "quadtail/curriculum/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quadtail/common/errors.hpp"

namespace quadtail {

double stage1_velocity(std::int64_t iteration) {
  if (iteration < 0) throw PreconditionError("iteration must be >= 0");
  return 1.0 + 1.5 / (1.0 + std::exp(-0.008 * (static_cast<double>(iteration) - 500.0)));
}

double stage2_velocity(std::int64_t reward_step) {
  if (reward_step < 0) throw PreconditionError("reward_step must be >= 0");
  return 1.77 + 2.73 / (1.0 + std::exp(-0.01 * (static_cast<double>(reward_step) - 100.0)));
}

std::int64_t command_range(std::int64_t reward_step) {
  if (reward_step < 0) throw PreconditionError("reward_step must be >= 0");
  return 1 + std::min<std::int64_t>(300, reward_step);
}

CurriculumState CurriculumState::initial(CurriculumKind kind, double threshold) {
  CurriculumState s;
  s.kind = kind;
  s.threshold = threshold;
  s.refresh();
  return s;
}

void CurriculumState::refresh() {
  switch (kind) {
    case CurriculumKind::kStage1: velocity = stage1_velocity(iteration); break;
    case CurriculumKind::kStage2: velocity = stage2_velocity(reward_step); break;
    case CurriculumKind::kNone: velocity = 0.0; break;
  }
  command_range = quadtail::command_range(reward_step);
}

CurriculumState advance(const CurriculumState& state, double mean_iteration_reward) {
  CurriculumState next = state;
  next.iteration += 1;
  if (mean_iteration_reward > state.threshold) next.reward_step += 1;
  next.refresh();
  return next;
}

const char* to_string(CurriculumKind kind) {
  switch (kind) {
    case CurriculumKind::kStage1: return "stage1";
    case CurriculumKind::kStage2: return "stage2";
    case CurriculumKind::kNone: return "none";
  }
  return "none";
}

CurriculumKind parse_curriculum_kind(const char* name) {
  const std::string s = name;
  if (s == "stage1") return CurriculumKind::kStage1;
  if (s == "stage2") return CurriculumKind::kStage2;
  if (s == "none") return CurriculumKind::kNone;
  throw ConfigError("curriculum.kind", "expected stage1, stage2 or none");
}

}  // namespace quadtail
