#include "perish/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace perish {

void LinearProgram::add_row(std::vector<double> coeffs, double rhs, std::string name) {
  coeffs.resize(cols(), 0.0);
  A.push_back(std::move(coeffs));
  b.push_back(rhs);
  row_names.push_back(std::move(name));
}

LpResult simplex_max(const LinearProgram& lp, double pivot_floor) {
  const std::size_t m = lp.rows();
  const std::size_t n = lp.cols();
  if (lp.A.size() != m) throw std::invalid_argument("row count mismatch");
  for (std::size_t r = 0; r < m; ++r) {
    if (lp.A[r].size() != n) throw std::invalid_argument("row width mismatch");
    if (!(lp.b[r] >= 0.0)) throw std::invalid_argument("slack basis needs b >= 0");
  }

  // Tableau columns: n structural, m slack, then the right-hand side.
  const std::size_t W = n + m + 1;
  std::vector<double> T((m + 1) * W, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return T[r * W + c]; };
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) at(r, j) = lp.A[r][j];
    at(r, n + r) = 1.0;
    at(r, W - 1) = lp.b[r];
  }
  // Objective row holds reduced costs c_j - z_j.
  for (std::size_t j = 0; j < n; ++j) at(m, j) = lp.c[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;

  LpResult res;
  const double eps = 1e-12;
  const int max_pivots = 50 * static_cast<int>(n + m) + 1000;
  for (;;) {
    std::size_t enter = W;
    for (std::size_t j = 0; j + 1 < W; ++j) {
      if (at(m, j) > eps) {
        enter = j;
        break;
      }
    }
    if (enter == W) break;

    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double a = at(r, enter);
      if (a <= pivot_floor) continue;
      const double ratio = at(r, W - 1) / a;
      if (leave == m || ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == m) {
      res.status = LpStatus::Unbounded;
      res.objective = HUGE_VAL;
      return res;
    }
    if (++res.pivots > max_pivots) throw LpNumericalError("simplex pivot limit reached");

    const double p = at(leave, enter);
    for (std::size_t c = 0; c < W; ++c) at(leave, c) /= p;
    at(leave, enter) = 1.0;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < W; ++c) at(r, c) -= f * at(leave, c);
      at(r, enter) = 0.0;
    }
    basis[leave] = enter;
  }

  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) res.x[basis[r]] = std::max(0.0, at(r, W - 1));
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += lp.c[j] * res.x[j];
  if (!std::isfinite(res.objective)) throw LpNumericalError("non-finite objective");
  return res;
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (double xi : x) worst = std::max(worst, -xi);
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < lp.cols(); ++j) s += lp.A[r][j] * x[j];
    worst = std::max(worst, s - lp.b[r]);
  }
  return worst;
}

namespace {

std::string col_name(const LinearProgram& lp, std::size_t j) {
  if (j < lp.column_names.size() && !lp.column_names[j].empty()) return lp.column_names[j];
  return "x" + std::to_string(j);
}

void write_terms(std::ostream& os, const LinearProgram& lp, const std::vector<double>& coeffs) {
  bool any = false;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j] == 0.0) continue;
    os << (coeffs[j] < 0 ? " - " : (any ? " + " : " ")) << std::abs(coeffs[j]) << ' ' << col_name(lp, j);
    any = true;
  }
  if (!any) os << " 0 " << col_name(lp, 0);
}

}  // namespace

void write_lp(std::ostream& os, const LinearProgram& lp) {
  const auto old = os.precision(17);
  os << "Maximize\n obj:";
  write_terms(os, lp, lp.c);
  os << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    const std::string name = r < lp.row_names.size() && !lp.row_names[r].empty() ? lp.row_names[r] : "r" + std::to_string(r);
    os << ' ' << name << ':';
    write_terms(os, lp, lp.A[r]);
    os << " <= " << lp.b[r] << '\n';
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.cols(); ++j) os << ' ' << col_name(lp, j) << " >= 0\n";
  os << "End\n";
  os.precision(old);
}

}  // namespace perish
