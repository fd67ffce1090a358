#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "perish/distributions.hpp"

namespace perish {

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// uniform-int:LO:HI | atoms:V@P,V@P,... | pareto:ALPHA[:CAP] | point:V
ValueDistribution parse_value_spec(const std::string& spec);

// A bare family name takes its parameters from `mean` (and `cap` for truncated-geometric, 0 = 4*mean):
//   geometric, deterministic, uniform (1..2*mean-1), truncated-geometric.
// Explicit forms: geometric:MEAN | deterministic:N | uniform:LO:HI | truncated-geometric:MEAN:CAP | pmf:T@P,T@P,...
HorizonDistribution parse_horizon_spec(const std::string& spec, double mean = 0.0, Step cap = 0);

std::vector<std::string> split(const std::string& s, char sep);
double parse_double(const std::string& s);
Step parse_step(const std::string& s);

}  // namespace perish
