#include "sqe/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sqe {

AssignmentProblem AssignmentProblem::dense(const std::vector<std::vector<double>>& matrix) {
  AssignmentProblem p;
  p.rows = matrix.size();
  p.cols = p.rows == 0 ? 0 : matrix.front().size();
  p.cost.reserve(p.rows * p.cols);
  for (const auto& row : matrix) {
    if (row.size() != p.cols) throw std::invalid_argument("ragged cost matrix");
    for (double v : row) p.cost.push_back(v);
  }
  return p;
}

double assignment_total_cost(const AssignmentProblem& problem,
                             const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  double total = 0.0;
  for (const auto& [r, c] : pairs) total += problem.cost_at(r, c);
  return total;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Internal square-free formulation: R rows over C real columns plus R
// dummy columns at cost 0. Allowed cells carry cost - G with
// G > sum of |allowed costs|, so minimizing the transformed total first
// maximizes cardinality and then minimizes the real total.
struct Transformed {
  std::size_t R, C, m;  // m = C + R
  const AssignmentProblem* p;
  double shift;

  double at(std::size_t r, std::size_t c) const {
    if (c >= C) return 0.0;
    if (!p->is_allowed(r, c)) return kInf;
    return p->cost_at(r, c) - shift;
  }
};

// Potentials-based Hungarian over the rows of t (Jonker-Volgenant style
// augmenting row reduction, O(R^2 m)).
struct DualSolution {
  std::vector<double> u, v;
  std::vector<int> col_match;  // col -> row, -1 if free
};

DualSolution hungarian(const Transformed& t) {
  const std::size_t n = t.R;
  const std::size_t m = t.m;
  DualSolution s;
  s.u.assign(n, 0.0);
  s.v.assign(m + 1, 0.0);
  s.col_match.assign(m + 1, -1);
  std::vector<double> minv(m + 1);
  std::vector<char> used(m + 1);
  std::vector<std::size_t> way(m + 1, 0);

  for (std::size_t i = 0; i < n; ++i) {
    s.col_match[m] = static_cast<int>(i);
    std::size_t j0 = m;
    minv.assign(m + 1, kInf);
    used.assign(m + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = static_cast<std::size_t>(s.col_match[j0]);
      std::size_t j1 = m;
      double delta = kInf;
      for (std::size_t j = 0; j < m; ++j) {
        if (used[j]) continue;
        double a = t.at(i0, j);
        if (a != kInf) {
          double cur = a - s.u[i0] - s.v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      // Dummy columns guarantee a finite augmenting edge exists.
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          if (s.col_match[j] >= 0) s.u[static_cast<std::size_t>(s.col_match[j])] += delta;
          s.v[j] -= delta;
        } else if (minv[j] != kInf) {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (s.col_match[j0] != -1);
    do {
      std::size_t j1 = way[j0];
      s.col_match[j0] = s.col_match[j1];
      j0 = j1;
    } while (j0 != m);
  }
  s.col_match.pop_back();  // drop the virtual column
  return s;
}

// Lexicographic refinement. A perfect-on-rows matching is optimal exactly
// when it uses only tight edges AND keeps every column with a strictly
// negative potential covered (complementary slackness of the unbalanced
// assignment LP; the augmenting-row Hungarian keeps v <= 0 and only ever
// lowers v on columns it matches, so its own output satisfies both). Rows
// are fixed in order to their smallest column that preserves optimality.
class LexRefiner {
 public:
  LexRefiner(const Transformed& t, const DualSolution& duals)
      : t_(t), u_(duals.u), v_(duals.v), eps_(1e-11 * (t.shift + 1.0)) {
    row_match_.assign(t_.R, 0);
    col_match_.assign(t_.m, -1);
    locked_.assign(t_.R, 0);
    for (std::size_t j = 0; j < t_.m; ++j) {
      if (duals.col_match[j] >= 0) {
        row_match_[static_cast<std::size_t>(duals.col_match[j])] = j;
        col_match_[j] = duals.col_match[j];
      }
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> run() {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t r = 0; r < t_.R; ++r) {
      bool fixed = false;
      for (std::size_t c = 0; c < t_.C && !fixed; ++c) {
        if (t_.at(r, c) == kInf || !tight(r, c)) continue;
        fixed = try_lock(r, c);
      }
      locked_[r] = 1;
      std::size_t c = row_match_[r];
      if (c < t_.C && t_.p->is_allowed(r, c)) out.emplace_back(r, c);
    }
    return out;
  }

 private:
  bool tight(std::size_t r, std::size_t c) const {
    double a = t_.at(r, c);
    return a != kInf && a - u_[r] - v_[c] <= eps_;
  }

  bool strict_col(std::size_t c) const { return v_[c] < -eps_; }

  // Moves r onto column c if some optimal completion allows it.
  bool try_lock(std::size_t r, std::size_t c) {
    if (row_match_[r] == c) return true;
    int occupant = col_match_[c];
    if (occupant >= 0 && locked_[static_cast<std::size_t>(occupant)]) return false;

    auto saved_rows = row_match_;
    auto saved_cols = col_match_;
    std::size_t old = row_match_[r];
    col_match_[old] = -1;
    row_match_[r] = c;
    col_match_[c] = static_cast<int>(r);
    locked_[r] = 1;  // repair moves below must not displace r

    bool ok = true;
    if (occupant >= 0) {
      visited_cols_.assign(t_.m, 0);
      visited_cols_[c] = 1;
      ok = augment(static_cast<std::size_t>(occupant));
    }
    // Freeing a negative-potential column would break optimality; re-cover
    // it by shifting rows until a zero-potential column frees up instead.
    if (ok && strict_col(old) && col_match_[old] < 0) {
      visited_rows_.assign(t_.R, 0);
      ok = cover_column(old);
    }
    locked_[r] = 0;
    if (!ok) {
      row_match_ = std::move(saved_rows);
      col_match_ = std::move(saved_cols);
    }
    return ok;
  }

  bool augment(std::size_t row) {
    for (std::size_t c = 0; c < t_.m; ++c) {
      if (visited_cols_[c] || !tight(row, c)) continue;
      visited_cols_[c] = 1;
      int occupant = col_match_[c];
      if (occupant < 0 || (!locked_[static_cast<std::size_t>(occupant)] &&
                           augment(static_cast<std::size_t>(occupant)))) {
        row_match_[row] = c;
        col_match_[c] = static_cast<int>(row);
        return true;
      }
    }
    return false;
  }

  bool cover_column(std::size_t col) {
    for (std::size_t r = 0; r < t_.R; ++r) {
      if (locked_[r] || visited_rows_[r] || !tight(r, col)) continue;
      visited_rows_[r] = 1;
      std::size_t freed = row_match_[r];
      row_match_[r] = col;
      col_match_[col] = static_cast<int>(r);
      col_match_[freed] = -1;
      if (!strict_col(freed) || cover_column(freed)) return true;
      col_match_[freed] = static_cast<int>(r);
      col_match_[col] = -1;
      row_match_[r] = freed;
    }
    return false;
  }

  const Transformed& t_;
  const std::vector<double>& u_;
  const std::vector<double>& v_;
  double eps_;
  std::vector<std::size_t> row_match_;
  std::vector<int> col_match_;
  std::vector<char> locked_;
  std::vector<char> visited_cols_;
  std::vector<char> visited_rows_;
};

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> solve_assignment(
    const AssignmentProblem& problem) {
  if (problem.rows == 0 || problem.cols == 0) return {};
  if (problem.cost.size() != problem.rows * problem.cols) {
    throw std::invalid_argument("cost matrix size does not match rows * cols");
  }
  if (!problem.allowed.empty() && problem.allowed.size() != problem.cost.size()) {
    throw std::invalid_argument("allowed mask size does not match cost matrix");
  }
  double shift = 1.0;
  for (std::size_t r = 0; r < problem.rows; ++r) {
    for (std::size_t c = 0; c < problem.cols; ++c) {
      if (problem.is_allowed(r, c)) {
        double v = problem.cost_at(r, c);
        if (!std::isfinite(v)) throw std::invalid_argument("allowed cost must be finite");
        shift += std::abs(v);
      }
    }
  }
  Transformed t{problem.rows, problem.cols, problem.cols + problem.rows, &problem, shift};
  DualSolution duals = hungarian(t);
  return LexRefiner(t, duals).run();
}

}  // namespace sqe
