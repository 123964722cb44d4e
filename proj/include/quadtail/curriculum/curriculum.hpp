#pragma once

#include <cstdint>

namespace quadtail {

/// Command speed of the first turning stage: sigmoid in the iteration count,
/// 1.0 m/s to 2.5 m/s around iteration 500.
double stage1_velocity(std::int64_t iteration);

/// Command speed of the second stage: sigmoid in the reward step,
/// 1.77 m/s to 4.5 m/s around step 100.
double stage2_velocity(std::int64_t reward_step);

/// Width, in control steps, of the turn-onset window: 1 + min(300, step).
std::int64_t command_range(std::int64_t reward_step);

enum class CurriculumKind { kStage1, kStage2, kNone };

struct CurriculumState {
  CurriculumKind kind = CurriculumKind::kStage1;
  std::int64_t iteration = 0;
  std::int64_t reward_step = 0;
  double threshold = 4.75;
  double velocity = 0.0;  // V^cmd_x, m/s
  std::int64_t command_range = 1;

  static CurriculumState initial(CurriculumKind kind, double threshold = 4.75);
  /// Recomputes velocity and command_range from the counters.
  void refresh();
};

/// iteration += 1; reward_step += 1 iff mean_reward > threshold (strict).
CurriculumState advance(const CurriculumState& state, double mean_iteration_reward);

const char* to_string(CurriculumKind kind);
CurriculumKind parse_curriculum_kind(const char* name);

}  // namespace quadtail
