#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace perish {

struct WelfareEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::pair<double, double> ci95{0.0, 0.0};
};

// Sample mean and standard error, summed in index order.
WelfareEstimate summarize(const std::vector<double>& xs);

// Delta-method standard error of mean(num)/mean(den) for paired samples.
double ratio_stderr(const std::vector<double>& num, const std::vector<double>& den);

// Bernoulli frequency estimate with its standard error.
WelfareEstimate frequency(std::size_t hits, std::size_t n);

}  // namespace perish
