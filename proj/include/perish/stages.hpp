#pragma once

#include <string>
#include <vector>

#include "perish/prophet.hpp"

namespace perish {

// Empty marks a stage whose threshold was already met when it began (r_k = l_k).
enum class StageKind { Long, Short, Empty };

struct Stage {
  Step l;
  Step r;
  StageKind kind;
  Step length() const { return r - l; }
};

struct StagePlan {
  std::size_t m = 0;
  double rho = 0.5;
  int s = 0;
  std::vector<Stage> stages;  // stages[k-1] is stage k
  Step final_start = 1;

  // Target of stage k (1-based): m * rho^k.
  double threshold(int k) const;
  // Items budget used by the stage-k bound: m * rho^(k-1).
  double budget(int k) const { return threshold(k - 1); }
};

double expected_remaining(const Instance& inst, Step t);

int stage_count(std::size_t m, double rho = 0.5);

StagePlan build_stage_plan(const Instance& inst, double rho = 0.5);
// Linear scan only; the reference the geometric shortcut is tested against.
StagePlan build_stage_plan_scan(const Instance& inst, double rho = 0.5);

std::string to_string(StageKind k);
std::string stage_plan_json(const StagePlan& plan);

}  // namespace perish
