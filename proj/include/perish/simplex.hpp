#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace perish {

// maximize c'x subject to A x <= b, x >= 0, with b >= 0.
struct LinearProgram {
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<std::string> column_names;  // optional, used by write_lp
  std::vector<std::string> row_names;

  std::size_t rows() const { return b.size(); }
  std::size_t cols() const { return c.size(); }
  void add_row(std::vector<double> coeffs, double rhs, std::string name = {});
};

enum class LpStatus { Optimal, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  std::vector<double> x;
  int pivots = 0;
};

class LpNumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense tableau simplex, Bland's rule, starting from the slack basis.
LpResult simplex_max(const LinearProgram& lp, double pivot_floor = 1e-12);

// Largest violation of Ax <= b or x >= 0.
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

// CPLEX LP text format.
void write_lp(std::ostream& os, const LinearProgram& lp);

}  // namespace perish
