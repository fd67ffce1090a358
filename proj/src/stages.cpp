#include "perish/stages.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace perish {

namespace {

constexpr Step kScanGuard = 10'000'000;

bool common_geometric(const Instance& inst, double& q) {
  const auto* g0 = std::get_if<Geometric>(&inst.horizons.front().family());
  if (!g0) return false;
  for (const auto& h : inst.horizons) {
    const auto* g = std::get_if<Geometric>(&h.family());
    if (!g || g->mean != g0->mean) return false;
  }
  q = inst.horizons.front().geometric_continue();
  return q > 0.0 && q < 1.0;
}

StageKind kind_of(Step len) {
  if (len >= 2) return StageKind::Long;
  if (len == 1) return StageKind::Short;
  return StageKind::Empty;
}

template <class FindT>
StagePlan assemble(const Instance& inst, double rho, FindT&& first_t_at_or_after) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("split ratio must lie in (0,1)");
  StagePlan plan;
  plan.m = inst.m();
  plan.rho = rho;
  plan.s = stage_count(plan.m, rho);
  Step l = 1;
  for (int k = 1; k <= plan.s; ++k) {
    const Step t = first_t_at_or_after(l - 1, plan.threshold(k));
    const Step r = t + 1;
    plan.stages.push_back({l, r, kind_of(r - l)});
    l = r;
  }
  plan.final_start = l;
  return plan;
}

Step scan_from(const Instance& inst, Step t, double target) {
  const Step start = t;
  while (expected_remaining(inst, t) > target) {
    if (++t - start > kScanGuard) throw std::runtime_error("stage search exceeded the step guard");
  }
  return t;
}

}  // namespace

double StagePlan::threshold(int k) const {
  return static_cast<double>(m) * std::pow(rho, k);
}

double expected_remaining(const Instance& inst, Step t) {
  if (t < 0) throw std::invalid_argument("expected_remaining needs t >= 0");
  double s = 0.0;
  for (const auto& h : inst.horizons) s += h.survival(t + 1);
  return s;
}

int stage_count(std::size_t m, double rho) {
  int s = 0;
  double level = static_cast<double>(m);
  while (level > 10.0) {
    level *= rho;
    ++s;
  }
  return s;
}

StagePlan build_stage_plan_scan(const Instance& inst, double rho) {
  return assemble(inst, rho, [&](Step t0, double target) { return scan_from(inst, t0, target); });
}

StagePlan build_stage_plan(const Instance& inst, double rho) {
  double q = 0.0;
  if (!common_geometric(inst, q)) return build_stage_plan_scan(inst, rho);
  const double m = static_cast<double>(inst.m());
  return assemble(inst, rho, [&](Step t0, double target) {
    // m q^t <= target  <=>  t >= log(target/m)/log(q); then settle on the exact predicate.
    auto ok = [&](Step t) { return expected_remaining(inst, t) <= target; };
    Step t = static_cast<Step>(std::ceil(std::log(target / m) / std::log(q)));
    t = std::max(t, t0);
    while (t > t0 && ok(t - 1)) --t;
    while (!ok(t)) ++t;
    return t;
  });
}

std::string to_string(StageKind k) {
  switch (k) {
    case StageKind::Long: return "long";
    case StageKind::Short: return "short";
    case StageKind::Empty: return "empty";
  }
  return "?";
}

std::string stage_plan_json(const StagePlan& plan) {
  nlohmann::ordered_json j;
  j["m"] = plan.m;
  j["rho"] = plan.rho;
  j["s"] = plan.s;
  j["final_start"] = plan.final_start;
  auto& arr = j["stages"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < plan.stages.size(); ++k) {
    const auto& st = plan.stages[k];
    arr.push_back({{"k", k + 1}, {"l", st.l}, {"r", st.r}, {"kind", to_string(st.kind)}});
  }
  return j.dump();
}

}  // namespace perish
