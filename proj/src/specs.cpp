#include "perish/specs.hpp"

#include <algorithm>
#include <cmath>

namespace perish {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw SpecError("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(x)) throw SpecError("not a finite number: '" + s + "'");
  return x;
}

Step parse_step(const std::string& s) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw SpecError("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw SpecError("not an integer: '" + s + "'");
  return static_cast<Step>(x);
}

namespace {

void expect_fields(const std::vector<std::string>& f, std::size_t lo, std::size_t hi, const std::string& spec) {
  if (f.size() < lo || f.size() > hi) throw SpecError("malformed spec '" + spec + "'");
}

template <class T, class Parse>
std::vector<std::pair<T, double>> parse_pairs(const std::string& body, Parse parse) {
  std::vector<std::pair<T, double>> out;
  for (const auto& item : split(body, ',')) {
    const auto kv = split(item, '@');
    if (kv.size() != 2) throw SpecError("expected VALUE@PROB, got '" + item + "'");
    out.emplace_back(parse(kv[0]), parse_double(kv[1]));
  }
  return out;
}

}  // namespace

ValueDistribution parse_value_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "uniform-int") {
      const auto f = split(body, ':');
      expect_fields(f, 2, 2, spec);
      const Step lo = parse_step(f[0]), hi = parse_step(f[1]);
      if (lo > hi) throw SpecError("empty range in '" + spec + "'");
      return uniform_int_values(static_cast<int>(lo), static_cast<int>(hi));
    }
    if (kind == "atoms") {
      auto atoms = parse_pairs<double>(body, parse_double);
      std::sort(atoms.begin(), atoms.end());
      return ValueDistribution(DiscreteAtoms{atoms});
    }
    if (kind == "pareto") {
      const auto f = split(body, ':');
      expect_fields(f, 1, 2, spec);
      Pareto p{parse_double(f[0])};
      if (f.size() == 2) p.cap = parse_double(f[1]);
      return ValueDistribution(p);
    }
    if (kind == "point") return point_mass(parse_double(body));
  } catch (const DistributionError& e) {
    throw SpecError("'" + spec + "': " + e.what());
  }
  throw SpecError("unknown value distribution '" + spec + "'");
}

HorizonDistribution parse_horizon_spec(const std::string& spec, double mean, Step cap) {
  const auto f = split(spec, ':');
  const std::string& kind = f[0];
  const bool bare = f.size() == 1;
  if (bare && kind != "pmf" && !(mean >= 1.0)) throw SpecError("horizon '" + kind + "' needs a mean >= 1");
  try {
    if (kind == "geometric") {
      expect_fields(f, 1, 2, spec);
      return Geometric{bare ? mean : parse_double(f[1])};
    }
    if (kind == "deterministic") {
      expect_fields(f, 1, 2, spec);
      if (bare && mean != std::round(mean)) throw SpecError("deterministic horizon needs an integer mean");
      return Deterministic{bare ? static_cast<Step>(mean) : parse_step(f[1])};
    }
    if (kind == "uniform") {
      if (bare) {
        const double hi = 2.0 * mean - 1.0;
        if (hi != std::round(hi)) throw SpecError("uniform horizon needs 2*mean - 1 to be an integer");
        return UniformRange{1, static_cast<Step>(hi)};
      }
      expect_fields(f, 3, 3, spec);
      return UniformRange{parse_step(f[1]), parse_step(f[2])};
    }
    if (kind == "truncated-geometric") {
      if (bare) return TruncatedGeometric{mean, cap > 0 ? cap : static_cast<Step>(std::ceil(4.0 * mean))};
      expect_fields(f, 3, 3, spec);
      return TruncatedGeometric{parse_double(f[1]), parse_step(f[2])};
    }
    if (kind == "pmf") {
      const auto colon = spec.find(':');
      if (colon == std::string::npos) throw SpecError("pmf needs T@P pairs");
      return ExplicitPmf{parse_pairs<Step>(spec.substr(colon + 1), parse_step)};
    }
  } catch (const DistributionError& e) {
    throw SpecError("'" + spec + "': " + e.what());
  }
  throw SpecError("unknown horizon distribution '" + spec + "'");
}

}  // namespace perish
