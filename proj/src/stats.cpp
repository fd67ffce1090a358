#include "perish/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace perish {

WelfareEstimate summarize(const std::vector<double>& xs) {
  WelfareEstimate e;
  e.trials = xs.size();
  if (xs.empty()) return e;
  double sum = 0.0;
  for (double x : xs) sum += x;
  e.mean = sum / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  }
  e.ci95 = {e.mean - 1.96 * e.std_error, e.mean + 1.96 * e.std_error};
  return e;
}

double ratio_stderr(const std::vector<double>& num, const std::vector<double>& den) {
  if (num.size() != den.size()) throw std::invalid_argument("paired samples differ in length");
  const std::size_t n = num.size();
  if (n < 2) return 0.0;
  double sn = 0.0, sd = 0.0;
  for (std::size_t i = 0; i < n; ++i) { sn += num[i]; sd += den[i]; }
  const double mn = sn / static_cast<double>(n), md = sd / static_cast<double>(n);
  if (md == 0.0) return 0.0;
  const double r = mn / md;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = num[i] - r * den[i];
    ss += z * z;
  }
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) / std::abs(md);
}

WelfareEstimate frequency(std::size_t hits, std::size_t n) {
  WelfareEstimate e;
  e.trials = n;
  if (n == 0) return e;
  e.mean = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
  e.ci95 = {e.mean - 1.96 * e.std_error, e.mean + 1.96 * e.std_error};
  return e;
}

}  // namespace perish
