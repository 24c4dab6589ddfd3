#pragma once

#include <cmath>
#include <cstddef>
#include <gmpxx.h>
#include <optional>
#include <vector>

#include "selinf/error.hpp"

namespace selinf::lp {

template <class T>
struct Tolerance;

template <>
struct Tolerance<mpq_class> {
  static bool negative(const mpq_class& v) { return sgn(v) < 0; }
  static bool positive(const mpq_class& v) { return sgn(v) > 0; }
  static bool zero(const mpq_class& v) { return sgn(v) == 0; }
};

template <>
struct Tolerance<double> {
  static constexpr double eps = 1e-9;
  static bool negative(double v) { return v < -eps; }
  static bool positive(double v) { return v > eps; }
  static bool zero(double v) { return std::fabs(v) <= eps; }
};

/// Dense constraint system A x = b over rows x columns.
template <class T>
struct EqualityProblem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> a;  // row-major
  std::vector<T> b;

  T& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  const T& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

template <class T>
struct FeasibilityResult {
  bool feasible = false;
  std::vector<T> x;  // a nonnegative solution, when feasible
  /// When infeasible: y with y^T A >= 0 componentwise and y^T b < 0.
  std::vector<T> farkas;
  std::size_t pivots = 0;
};

/// Phase-1 simplex on a dense tableau with Bland's anticycling rule.
///
/// Minimizes the sum of one artificial per row. Rows are sign-normalized so
/// the artificials start as a feasible basis. A positive optimum means the
/// system has no nonnegative solution; the simplex multipliers then give a
/// Farkas certificate.
template <class T>
FeasibilityResult<T> solve_phase1(const EqualityProblem<T>& problem, std::size_t max_pivots = 0) {
  using Tol = Tolerance<T>;
  const std::size_t m = problem.rows;
  const std::size_t n = problem.cols;
  const std::size_t width = n + m + 1;  // structural, artificial, rhs
  std::vector<T> tab(m * width);
  std::vector<int> flip(m, 1);
  auto cell = [&](std::size_t r, std::size_t c) -> T& { return tab[r * width + c]; };

  for (std::size_t r = 0; r < m; ++r) {
    flip[r] = Tol::negative(problem.b[r]) ? -1 : 1;
    for (std::size_t c = 0; c < n; ++c) {
      cell(r, c) = problem.at(r, c);
      if (flip[r] < 0) cell(r, c) = -cell(r, c);
    }
    cell(r, n + r) = 1;
    cell(r, width - 1) = flip[r] < 0 ? T(-problem.b[r]) : problem.b[r];
  }

  // Reduced costs of the phase-1 objective (1 on artificials).
  std::vector<T> cost(width);
  for (std::size_t c = 0; c < n; ++c) {
    T s = 0;
    for (std::size_t r = 0; r < m; ++r) s -= cell(r, c);
    cost[c] = s;
  }
  for (std::size_t r = 0; r < m; ++r) cost[width - 1] -= cell(r, width - 1);

  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;

  FeasibilityResult<T> result;
  for (;;) {
    std::optional<std::size_t> enter;
    for (std::size_t c = 0; c + 1 < width; ++c) {
      if (Tol::negative(cost[c])) {
        enter = c;
        break;
      }
    }
    if (!enter) break;

    std::optional<std::size_t> leave;
    T best_ratio = 0;
    for (std::size_t r = 0; r < m; ++r) {
      const T& coef = cell(r, *enter);
      if (!Tol::positive(coef)) continue;
      T ratio = cell(r, width - 1) / coef;
      if (!leave || ratio < best_ratio || (ratio == best_ratio && basis[r] < basis[*leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    // The phase-1 objective is bounded below by zero.
    if (!leave) throw Error(ErrorCode::NumericalInstability, "unbounded phase-1 ray");

    const std::size_t pr = *leave;
    const std::size_t pc = *enter;
    const T pivot = cell(pr, pc);
    for (std::size_t c = 0; c < width; ++c) {
      if (!Tol::zero(cell(pr, c))) cell(pr, c) /= pivot;
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (r == pr) continue;
      const T factor = cell(r, pc);
      if (Tol::zero(factor)) continue;
      for (std::size_t c = 0; c < width; ++c) {
        if (!Tol::zero(cell(pr, c))) cell(r, c) -= factor * cell(pr, c);
      }
    }
    {
      const T factor = cost[pc];
      for (std::size_t c = 0; c < width; ++c) {
        if (!Tol::zero(cell(pr, c))) cost[c] -= factor * cell(pr, c);
      }
    }
    basis[pr] = pc;
    ++result.pivots;
    if (max_pivots && result.pivots > max_pivots)
      throw Error(ErrorCode::NumericalInstability, "pivot limit reached; rerun in rational arithmetic");
  }

  // cost[width-1] holds minus the objective value.
  const T objective = -cost[width - 1];
  if (!Tol::positive(objective)) {
    result.feasible = true;
    result.x.assign(n, T(0));
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] < n) result.x[basis[r]] = cell(r, width - 1);
    }
    return result;
  }

  // Multipliers y_r = 1 - reduced cost of artificial r give y^T A' <= 0 and
  // y^T b' > 0 on the sign-normalized rows; negate and undo the flips.
  result.farkas.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    T y = T(1) - cost[n + r];
    result.farkas[r] = flip[r] < 0 ? y : T(-y);
  }
  return result;
}

}  // namespace selinf::lp
