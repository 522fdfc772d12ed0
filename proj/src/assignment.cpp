#include "wcs/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace wcs {

namespace {

void require_finite(const Eigen::MatrixXd& cost) {
  if (!cost.allFinite()) {
    throw std::invalid_argument("assignment: cost entries must be finite");
  }
}

/// Kuhn-Munkres on a square matrix with row/column potentials. Returns
/// row -> column. Rows are inserted in order and the minimal-slack column
/// scan takes the first minimum, so ties resolve toward low indices.
std::vector<int> solve_square(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[j]: row assigned to column j, 1-based
  std::vector<int> way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

Matching finalize(const Eigen::MatrixXd& cost,
                  std::vector<std::pair<int, int>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  Matching result;
  result.pairs = std::move(pairs);
  for (const auto& [i, j] : result.pairs) result.total_cost += cost(i, j);
  return result;
}

}  // namespace

Matching hungarian(const Eigen::MatrixXd& cost) {
  require_finite(cost);
  const int m = static_cast<int>(cost.rows());
  const int n = static_cast<int>(cost.cols());
  if (m == 0 || n == 0) return {};

  const int size = std::max(m, n);
  const double sentinel = cost.cwiseAbs().sum() + 1.0;
  Eigen::MatrixXd padded = Eigen::MatrixXd::Constant(size, size, sentinel);
  padded.topLeftCorner(m, n) = cost;

  const std::vector<int> row_to_col = solve_square(padded);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i) {
    if (row_to_col[i] < n) pairs.emplace_back(i, row_to_col[i]);
  }
  return finalize(cost, std::move(pairs));
}

Matching greedy(const Eigen::MatrixXd& cost) {
  require_finite(cost);
  const int m = static_cast<int>(cost.rows());
  const int n = static_cast<int>(cost.cols());
  const int target = std::min(m, n);
  if (target == 0) return {};

  std::vector<std::tuple<double, int, int>> entries;
  entries.reserve(static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) entries.emplace_back(cost(i, j), i, j);
  }
  std::sort(entries.begin(), entries.end());

  std::vector<char> row_used(m, 0), col_used(n, 0);
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [c, i, j] : entries) {
    if (row_used[i] || col_used[j]) continue;
    row_used[i] = col_used[j] = 1;
    pairs.emplace_back(i, j);
    if (static_cast<int>(pairs.size()) == target) break;
  }
  return finalize(cost, std::move(pairs));
}

Matching brute_force(const Eigen::MatrixXd& cost) {
  require_finite(cost);
  const int m = static_cast<int>(cost.rows());
  const int n = static_cast<int>(cost.cols());
  const int small = std::min(m, n);
  if (small == 0) return {};
  if (small > 8) {
    throw std::invalid_argument("brute_force: min(rows, cols) must be <= 8");
  }

  // Enumerate injections of the smaller side into the larger, in
  // lexicographic order; strict improvement keeps the first optimum.
  const bool rows_small = m <= n;
  const int big = rows_small ? n : m;
  std::vector<int> choice(small, -1);
  std::vector<char> used(big, 0);
  std::vector<int> best_choice;
  double best_cost = std::numeric_limits<double>::infinity();

  auto entry = [&](int small_idx, int big_idx) {
    return rows_small ? cost(small_idx, big_idx) : cost(big_idx, small_idx);
  };

  double running = 0.0;
  auto dfs = [&](auto&& self, int depth) -> void {
    if (depth == small) {
      if (running < best_cost) {
        best_cost = running;
        best_choice = choice;
      }
      return;
    }
    for (int b = 0; b < big; ++b) {
      if (used[b]) continue;
      used[b] = 1;
      choice[depth] = b;
      running += entry(depth, b);
      self(self, depth + 1);
      running -= entry(depth, b);
      used[b] = 0;
    }
  };
  dfs(dfs, 0);

  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k < small; ++k) {
    if (rows_small) {
      pairs.emplace_back(k, best_choice[k]);
    } else {
      pairs.emplace_back(best_choice[k], k);
    }
  }
  return finalize(cost, std::move(pairs));
}

}  // namespace wcs
