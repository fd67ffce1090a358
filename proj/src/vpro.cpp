#include "perish/vpro.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace perish {

void FiniteInstance::validate() const {
  if (horizons.empty()) throw DistributionError("finite instance needs at least one item");
  if (values.empty()) throw DistributionError("finite instance needs at least one buyer");
  for (const auto& v : values)
    if (!v.is_discrete()) throw DistributionError("finite instance values must be discrete");
}

Instance FiniteInstance::to_instance() const {
  validate();
  Instance inst;
  const Step N = n();
  for (const auto& h : horizons) {
    std::vector<std::pair<Step, double>> pmf;
    for (Step t = 1; t < N; ++t) pmf.emplace_back(t, h.pmf(t));
    pmf.emplace_back(N, h.survival(N));
    inst.horizons.emplace_back(ExplicitPmf{pmf});
  }
  inst.values = ValueProcess::make_per_step(values);
  inst.time_cap = N;
  inst.validate();
  return inst;
}

long VproLp::column(std::size_t i, Step h, std::size_t atom) const {
  if (i >= items || h < 1 || h > steps || atom >= atoms_max) return -1;
  return index[(i * static_cast<std::size_t>(steps) + static_cast<std::size_t>(h - 1)) * atoms_max + atom];
}

VproLp build_vpro_lp(const FiniteInstance& fi, bool monotone) {
  fi.validate();
  VproLp out;
  out.monotone = monotone;
  out.items = fi.m();
  out.steps = fi.n();
  for (const auto& v : fi.values) out.atoms_max = std::max(out.atoms_max, v.atoms().size());
  out.index.assign(out.items * static_cast<std::size_t>(out.steps) * out.atoms_max, -1);

  for (std::size_t i = 0; i < fi.m(); ++i)
    for (Step h = 1; h <= fi.n(); ++h) {
      const auto& atoms = fi.values[static_cast<std::size_t>(h - 1)].atoms();
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        if (!(atoms[a].second > 0.0)) continue;
        out.index[(i * static_cast<std::size_t>(out.steps) + static_cast<std::size_t>(h - 1)) * out.atoms_max + a] =
            static_cast<long>(out.columns.size());
        out.columns.push_back({i, h, a, atoms[a].first, atoms[a].second});
      }
    }
  const std::size_t nc = out.columns.size();
  if (nc > kMaxLpColumns) throw SizeGuardError("VPro LP has " + std::to_string(nc) + " columns");

  LinearProgram& lp = out.lp;
  lp.c.resize(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    const auto& col = out.columns[j];
    lp.c[j] = fi.survival(col.item, col.h) * col.value;
    lp.column_names.push_back("y_" + std::to_string(col.item) + "_" + std::to_string(col.h) + "_" +
                              std::to_string(col.atom));
  }

  // Capacity of each buyer type.
  for (Step h = 1; h <= fi.n(); ++h) {
    const auto& atoms = fi.values[static_cast<std::size_t>(h - 1)].atoms();
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (!(atoms[a].second > 0.0)) continue;
      std::vector<double> row(nc, 0.0);
      for (std::size_t i = 0; i < fi.m(); ++i) row[static_cast<std::size_t>(out.column(i, h, a))] = fi.survival(i, h);
      lp.add_row(std::move(row), atoms[a].second, "cap_" + std::to_string(h) + "_" + std::to_string(a));
    }
  }
  // Each item is sold at most once.
  for (std::size_t i = 0; i < fi.m(); ++i) {
    std::vector<double> row(nc, 0.0);
    for (std::size_t j = 0; j < nc; ++j)
      if (out.columns[j].item == i) row[j] = 1.0;
    lp.add_row(std::move(row), 1.0, "item_" + std::to_string(i));
  }
  // y_ivh <= Pr[X_h = v], implied by the variable's meaning.
  for (std::size_t j = 0; j < nc; ++j) {
    std::vector<double> row(nc, 0.0);
    row[j] = 1.0;
    lp.add_row(std::move(row), out.columns[j].prob, "ub_" + lp.column_names[j]);
  }
  if (monotone) {
    for (std::size_t i = 0; i < fi.m(); ++i)
      for (Step h = 1; h <= fi.n(); ++h) {
        long prev = -1;
        const auto& atoms = fi.values[static_cast<std::size_t>(h - 1)].atoms();
        for (std::size_t a = 0; a < atoms.size(); ++a) {
          const long col = out.column(i, h, a);
          if (col < 0) continue;
          if (prev >= 0) {
            std::vector<double> row(nc, 0.0);
            row[static_cast<std::size_t>(prev)] = 1.0 / out.columns[static_cast<std::size_t>(prev)].prob;
            row[static_cast<std::size_t>(col)] = -1.0 / out.columns[static_cast<std::size_t>(col)].prob;
            lp.add_row(std::move(row), 0.0, "mono_" + std::to_string(i) + "_" + std::to_string(h) + "_" + std::to_string(a));
          }
          prev = col;
        }
      }
  }
  return out;
}

LpSolution solve_lp(const VproLp& lp) {
  const LpResult r = simplex_max(lp.lp);
  LpSolution sol;
  sol.status = r.status;
  if (r.status != LpStatus::Optimal) throw LpNumericalError("VPro LP reported unbounded");
  sol.y = r.x;
  sol.objective = r.objective;
  sol.residual = max_violation(lp.lp, sol.y);
  if (sol.residual > 1e-9) throw LpNumericalError("LP solution violates constraints by " + std::to_string(sol.residual));
  return sol;
}

InclusionTable inclusion_table(const FiniteInstance& fi, const VproLp& lp, const LpSolution& sol) {
  InclusionTable t;
  t.fi = &fi;
  t.r.resize(static_cast<std::size_t>(fi.n()));
  for (Step h = 1; h <= fi.n(); ++h) {
    const auto& atoms = fi.values[static_cast<std::size_t>(h - 1)].atoms();
    auto& rh = t.r[static_cast<std::size_t>(h - 1)];
    rh.resize(atoms.size());
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (!(atoms[a].second > 0.0)) continue;  // empty marks a massless atom
      rh[a].resize(fi.m());
      for (std::size_t i = 0; i < fi.m(); ++i) {
        const long col = lp.column(i, h, a);
        rh[a][i] = std::clamp(sol.y[static_cast<std::size_t>(col)] / (2.0 * atoms[a].second), 0.0, 1.0);
      }
    }
  }
  return t;
}

double assignment_audit(const FiniteInstance& fi, const VproLp& lp, const LpSolution& sol) {
  const InclusionTable t = inclusion_table(fi, lp, sol);
  double worst = 0.0;
  for (Step h = 1; h <= fi.n(); ++h)
    for (const auto& ra : t.r[static_cast<std::size_t>(h - 1)]) {
      double s = 0.0;
      for (std::size_t i = 0; i < ra.size(); ++i) s += ra[i] * fi.survival(i, h);
      worst = std::max(worst, s);
    }
  return worst;
}

namespace {

std::optional<std::size_t> atom_index(const ValueDistribution& v, double value) {
  const auto& atoms = v.atoms();
  const auto it =
      std::lower_bound(atoms.begin(), atoms.end(), value, [](const auto& a, double x) { return a.first < x; });
  if (it == atoms.end() || it->first != value) return std::nullopt;
  return static_cast<std::size_t>(it - atoms.begin());
}

class VproAssignment : public Policy {
 public:
  VproAssignment(std::shared_ptr<const InclusionTable> t, std::uint64_t seed) : t_(std::move(t)), rng_(make_rng(seed)) {}

  ThresholdRule post(const StepView&) override { return ThresholdRule::reject_all(); }
  std::optional<std::size_t> select(const StepView&) override { return std::nullopt; }
  bool reveals_value() const override { return true; }

  std::optional<std::size_t> assign(const StepView& view, double value) override {
    const FiniteInstance& fi = *t_->fi;
    if (view.step > fi.n()) return std::nullopt;
    const auto h = static_cast<std::size_t>(view.step - 1);
    const auto a = atom_index(fi.values[h], value);
    if (!a || t_->r[h][*a].empty()) return std::nullopt;
    const auto& r = t_->r[h][*a];
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const bool in_s = uniform01(rng_) < r[i];
      if (in_s && !pick && view.items[i] == ItemState::Available) pick = i;
    }
    return pick;
  }
  std::string name() const override { return "vpro_assignment"; }

 private:
  std::shared_ptr<const InclusionTable> t_;
  Rng rng_;
};

class TruthfulPricing : public Policy {
 public:
  TruthfulPricing(std::shared_ptr<const InclusionTable> t, std::uint64_t seed) : t_(std::move(t)), rng_(make_rng(seed)) {}

  ThresholdRule post(const StepView& view) override {
    chosen_.reset();
    const FiniteInstance& fi = *t_->fi;
    if (view.step > fi.n()) return ThresholdRule::reject_all();
    const auto h = static_cast<std::size_t>(view.step - 1);
    const auto& rh = t_->r[h];
    const auto& atoms = fi.values[h].atoms();
    // Item i lands in S_j for the smallest j with U_i below its cumulative probability at v_j,
    // so Pr[i in S_1 u ... u S_j] is exactly y_{i v_j h} / (2 Pr[X_h = v_j]).
    std::size_t best_level = atoms.size();
    for (std::size_t i = 0; i < fi.m(); ++i) {
      const double u = uniform01(rng_);
      double cum = 0.0;
      for (std::size_t a = 0; a < atoms.size() && a < best_level; ++a) {
        if (rh[a].empty()) continue;
        cum = std::max(cum, rh[a][i]);
        if (u < cum) {
          if (view.items[i] == ItemState::Available) {
            best_level = a;
            chosen_ = i;
          }
          break;
        }
      }
    }
    if (!chosen_) return ThresholdRule::reject_all();
    return price_rule(fi.values[h], atoms[best_level].first);
  }
  std::optional<std::size_t> select(const StepView&) override { return chosen_; }
  std::string name() const override { return "truthful_pricing"; }

 private:
  std::shared_ptr<const InclusionTable> t_;
  Rng rng_;
  std::optional<std::size_t> chosen_;
};

}  // namespace

std::unique_ptr<Policy> vpro_assignment_policy(std::shared_ptr<const InclusionTable> table, std::uint64_t seed) {
  return std::make_unique<VproAssignment>(std::move(table), seed);
}

std::unique_ptr<Policy> truthful_pricing_policy(std::shared_ptr<const InclusionTable> table, std::uint64_t seed) {
  return std::make_unique<TruthfulPricing>(std::move(table), seed);
}

PolicyFactory vpro_assignment_factory(const FiniteInstance& fi, const VproLp& lp, const LpSolution& sol) {
  auto table = std::make_shared<const InclusionTable>(inclusion_table(fi, lp, sol));
  return [table](std::uint64_t seed) { return vpro_assignment_policy(table, seed); };
}

PolicyFactory truthful_pricing_factory(const FiniteInstance& fi, const VproLp& lp, const LpSolution& sol) {
  auto table = std::make_shared<const InclusionTable>(inclusion_table(fi, lp, sol));
  for (const auto& rh : table->r)
    for (std::size_t i = 0; i < fi.m(); ++i) {
      double prev = 0.0;
      for (const auto& ra : rh) {
        if (ra.empty()) continue;
        if (ra[i] - prev < -1e-9) throw PolicyError("LP solution is not monotone in value; solve the monotone LP");
        prev = std::max(prev, ra[i]);
      }
    }
  return [table](std::uint64_t seed) { return truthful_pricing_policy(table, seed); };
}

double exact_optimal_policy_value(const FiniteInstance& fi) {
  fi.validate();
  const std::size_t m = fi.m();
  const Step n = fi.n();
  if (m > 3 || n > 5) throw SizeGuardError("exact DP is limited to m <= 3 items and n <= 5 buyers");
  for (const auto& v : fi.values)
    if (v.atoms().size() > 3) throw SizeGuardError("exact DP is limited to 3 atoms per buyer");

  const std::size_t S = std::size_t{1} << m;
  std::vector<double> next(S, 0.0), cur(S, 0.0);
  for (Step h = n; h >= 1; --h) {
    // Pr[item alive at h+1 | alive at h].
    std::vector<double> q(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double s = fi.survival(i, h);
      q[i] = s > 0.0 ? fi.survival(i, h + 1) / s : 0.0;
    }
    // Expected continuation when set R is unmatched at the end of step h.
    std::vector<double> cont(S, 0.0);
    for (std::size_t R = 0; R < S; ++R) {
      for (std::size_t sub = R;; sub = (sub - 1) & R) {
        double p = 1.0;
        for (std::size_t i = 0; i < m; ++i)
          if (R >> i & 1) p *= (sub >> i & 1) ? q[i] : 1.0 - q[i];
        cont[R] += p * next[sub];
        if (sub == 0) break;
      }
    }
    const auto& atoms = fi.values[static_cast<std::size_t>(h - 1)].atoms();
    for (std::size_t A = 0; A < S; ++A) {
      double e = 0.0;
      for (const auto& [v, p] : atoms) {
        double best = cont[A];
        for (std::size_t i = 0; i < m; ++i)
          if (A >> i & 1) best = std::max(best, v + cont[A & ~(std::size_t{1} << i)]);
        e += p * best;
      }
      cur[A] = e;
    }
    std::swap(cur, next);
  }
  return next[S - 1];
}

FiniteInstance random_finite_instance(Rng& rng, std::size_t m_max, Step n_max, std::size_t atoms_max) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  FiniteInstance fi;
  const auto m = static_cast<std::size_t>(pick(1, static_cast<std::int64_t>(m_max)));
  const Step n = pick(1, n_max);
  for (std::size_t i = 0; i < m; ++i) {
    switch (pick(0, 3)) {
      case 0:
        fi.horizons.emplace_back(Deterministic{pick(1, n)});
        break;
      case 1: {
        const Step lo = pick(1, n);
        fi.horizons.emplace_back(UniformRange{lo, pick(lo, n)});
        break;
      }
      case 2:
        fi.horizons.emplace_back(Geometric{1.0 + 3.0 * uniform01(rng)});
        break;
      default: {
        std::vector<std::pair<Step, double>> pmf;
        double total = 0.0;
        for (Step t = 1; t <= n; ++t) {
          const double w = uniform01(rng) < 0.6 ? uniform_open0(rng) : 0.0;
          pmf.emplace_back(t, w);
          total += w;
        }
        if (total == 0.0) {
          pmf.back().second = 1.0;
          total = 1.0;
        }
        for (auto& pt : pmf) pt.second /= total;
        fi.horizons.emplace_back(ExplicitPmf{pmf});
      }
    }
  }
  for (Step h = 1; h <= n; ++h) {
    const auto k = static_cast<std::size_t>(pick(1, static_cast<std::int64_t>(atoms_max)));
    std::vector<int> vals(11);
    for (int j = 0; j <= 10; ++j) vals[static_cast<std::size_t>(j)] = j;
    std::shuffle(vals.begin(), vals.end(), rng);
    vals.resize(k);
    std::sort(vals.begin(), vals.end());
    std::vector<std::pair<double, double>> atoms;
    double total = 0.0;
    for (int v : vals) {
      const double w = 0.05 + uniform01(rng);
      atoms.emplace_back(static_cast<double>(v), w);
      total += w;
    }
    double used = 0.0;
    for (std::size_t j = 0; j + 1 < atoms.size(); ++j) used += (atoms[j].second /= total);
    atoms.back().second = 1.0 - used;
    fi.values.emplace_back(DiscreteAtoms{atoms});
  }
  return fi;
}

}  // namespace perish
