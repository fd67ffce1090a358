#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "perish/policies.hpp"
#include "perish/simplex.hpp"

namespace perish {

// m items and n buyers with finite per-step value laws. Items live at most n steps.
struct FiniteInstance {
  std::vector<HorizonDistribution> horizons;
  std::vector<ValueDistribution> values;  // values[h-1] is V_h

  std::size_t m() const { return horizons.size(); }
  Step n() const { return static_cast<Step>(values.size()); }
  // Pr[Z_i >= h]
  double survival(std::size_t i, Step h) const { return horizons[i].survival(h); }
  void validate() const;
  // Simulator instance: horizons truncated at n, one buyer per step.
  Instance to_instance() const;
};

class SizeGuardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct VproColumn {
  std::size_t item;
  Step h;
  std::size_t atom;  // index into values[h-1].atoms()
  double value;
  double prob;       // Pr[X_h = value] > 0
};

struct VproLp {
  LinearProgram lp;
  std::vector<VproColumn> columns;
  bool monotone = false;
  // Column of (i, h, atom), or -1 when the atom has no mass.
  std::vector<long> index;  // flattened [i][h-1][atom]
  std::size_t items = 0;
  Step steps = 0;
  std::size_t atoms_max = 0;

  long column(std::size_t i, Step h, std::size_t atom) const;
};

constexpr std::size_t kMaxLpColumns = 10000;

VproLp build_vpro_lp(const FiniteInstance& fi, bool monotone);

struct LpSolution {
  std::vector<double> y;  // per column
  double objective = 0.0;
  LpStatus status = LpStatus::Optimal;
  double residual = 0.0;  // max constraint violation, recomputed after solving
};

LpSolution solve_lp(const VproLp& lp);

// Inclusion probabilities y / (2 Pr[X_h = v]) for every column.
struct InclusionTable {
  const FiniteInstance* fi;
  std::vector<std::vector<std::vector<double>>> r;  // [h-1][atom][item]
};
InclusionTable inclusion_table(const FiniteInstance& fi, const VproLp& lp, const LpSolution& sol);

// max over (h, v) of the survival-weighted expected size of S_hv; the analysis needs this <= 1/2.
double assignment_audit(const FiniteInstance& fi, const VproLp& lp, const LpSolution& sol);

std::unique_ptr<Policy> vpro_assignment_policy(std::shared_ptr<const InclusionTable> table, std::uint64_t seed);
std::unique_ptr<Policy> truthful_pricing_policy(std::shared_ptr<const InclusionTable> table, std::uint64_t seed);
PolicyFactory vpro_assignment_factory(const FiniteInstance& fi, const VproLp& lp, const LpSolution& sol);
// Throws PolicyError when the solution is not monotone in value.
PolicyFactory truthful_pricing_factory(const FiniteInstance& fi, const VproLp& lp, const LpSolution& sol);

// Optimal non-anticipating policy by backward induction over (step, alive-unmatched subset).
double exact_optimal_policy_value(const FiniteInstance& fi);

// m <= m_max, n <= n_max, at most atoms_max atoms per step, mixed horizon families.
FiniteInstance random_finite_instance(Rng& rng, std::size_t m_max, Step n_max, std::size_t atoms_max);

}  // namespace perish
