#include <doctest.h>

#include <cmath>

#include "quadtail/curriculum/curriculum.hpp"

using namespace quadtail;

TEST_CASE("stage-1 velocity") {
  CHECK(stage1_velocity(500) == 1.75);
  CHECK(stage1_velocity(0) == doctest::Approx(1.0 + 1.5 / (1.0 + std::exp(4.0))).epsilon(1e-15));
  CHECK(stage1_velocity(0) == doctest::Approx(1.0268).epsilon(1e-4));
  CHECK(stage1_velocity(100000) == 2.5);
  double prev = stage1_velocity(0);
  for (int i = 1; i < 3000; ++i) {
    const double v = stage1_velocity(i);
    CHECK(v > prev);
    CHECK(v < 2.5);
    prev = v;
  }
}

TEST_CASE("stage-2 velocity") {
  CHECK(stage2_velocity(100) == 1.77 + 2.73 / 2.0);
  CHECK(stage2_velocity(100) == doctest::Approx(3.135).epsilon(1e-15));
  CHECK(stage2_velocity(0) == doctest::Approx(2.5042).epsilon(1e-4));
  CHECK(stage2_velocity(100000) == 4.5);
  double prev = stage2_velocity(0);
  for (int i = 1; i < 2000; ++i) {
    const double v = stage2_velocity(i);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(stage2_velocity(0) > 1.77);
}

TEST_CASE("command range") {
  CHECK(command_range(0) == 1);
  CHECK(command_range(300) == 301);
  CHECK(command_range(1000000) == 301);
  for (int i = 1; i < 500; ++i) CHECK(command_range(i) >= command_range(i - 1));
}

TEST_CASE("advance uses a strict threshold") {
  CurriculumState s = CurriculumState::initial(CurriculumKind::kStage2);
  CHECK(s.velocity == stage2_velocity(0));
  CurriculumState a = advance(s, 4.80);
  CHECK(a.reward_step == 1);
  CHECK(a.iteration == 1);
  CHECK(a.velocity == stage2_velocity(1));
  CHECK(a.command_range == 2);
  CurriculumState b = advance(s, 4.75);
  CHECK(b.reward_step == 0);
  CHECK(b.iteration == 1);
  CurriculumState c = advance(s, 1.0);
  CHECK(c.reward_step == 0);
  CHECK(c.iteration == 1);

  CurriculumState one = CurriculumState::initial(CurriculumKind::kStage1);
  for (int i = 0; i < 500; ++i) one = advance(one, 0.0);
  CHECK(one.velocity == 1.75);
  CHECK(one.reward_step == 0);
  CHECK_THROWS(stage1_velocity(-1));
}
