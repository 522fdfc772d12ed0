#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace wcs {

/// One-to-one assignment of rows (devices) to columns (blocks).
/// Pairs are sorted by row index; cardinality is min(rows, cols).
struct Matching {
  std::vector<std::pair<int, int>> pairs;
  double total_cost = 0.0;
};

/// Exact minimum-cost rectangular assignment (Hungarian method with
/// potentials, O(n^3)). Rectangular inputs are padded square with a constant
/// sentinel larger than the sum of entry magnitudes; padded pairs are
/// stripped. Deterministic: equal-cost alternatives resolve by scan order
/// (lowest row, then lowest column).
Matching hungarian(const Eigen::MatrixXd& cost);

/// Greedy approximation: entries sorted ascending (ties by row then column),
/// non-conflicting pairs accepted until min(rows, cols) are placed. Total
/// cost is never below hungarian's.
Matching greedy(const Eigen::MatrixXd& cost);

/// Exhaustive minimum over all injections of the smaller side into the
/// larger; testing oracle. Throws std::invalid_argument when
/// min(rows, cols) > 8.
Matching brute_force(const Eigen::MatrixXd& cost);

}  // namespace wcs
