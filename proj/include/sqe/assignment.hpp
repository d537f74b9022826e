// Rectangular linear assignment with forbidden entries.
//
// solve_assignment returns the matching that (1) has maximum cardinality
// over allowed entries, (2) minimum total cost among those, and (3) is the
// lexicographically smallest (row, col) list among the remaining optima.
// Unmatched rows and columns are simply absent from the result.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace sqe {

struct AssignmentProblem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cost;     // row-major, rows * cols
  std::vector<char> allowed;    // row-major; empty means all allowed

  static AssignmentProblem dense(const std::vector<std::vector<double>>& matrix);

  double cost_at(std::size_t r, std::size_t c) const { return cost[r * cols + c]; }
  bool is_allowed(std::size_t r, std::size_t c) const {
    return allowed.empty() || allowed[r * cols + c] != 0;
  }
  void forbid(std::size_t r, std::size_t c) {
    if (allowed.empty()) allowed.assign(rows * cols, 1);
    allowed[r * cols + c] = 0;
  }
};

std::vector<std::pair<std::size_t, std::size_t>> solve_assignment(
    const AssignmentProblem& problem);

double assignment_total_cost(const AssignmentProblem& problem,
                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

}  // namespace sqe
