#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wcs/assignment.hpp"
#include "wcs/dynamics.hpp"
#include "wcs/phy.hpp"

namespace wcs {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// PER non-decreasing and airtime non-increasing in the MCS index, swept
/// over an effective-SNR grid (-10..30 dB in 0.5 dB steps).
CheckResult check_mcs_monotonicity(const McsTable& table);

/// Assignment solver equals the exhaustive oracle on small random instances.
CheckResult check_assignment_optimality(
    const std::function<Matching(const Eigen::MatrixXd&)>& solver,
    int instances = 50);

/// The greedy approximation never undercuts the exact solver and matches a
/// hand-enumerable adversarial case.
CheckResult check_greedy_bound(
    const std::function<Matching(const Eigen::MatrixXd&)>& greedy_fn,
    int instances = 50);

/// Closed-form drop penalty against a reduced-sample Monte-Carlo estimate of
/// the drop-minus-success expected cost difference.
CheckResult check_control_weight_oracle(const PlantModel& model,
                                        int samples = 100000);

/// The fast self-check suite over a given MCS table and plant.
std::vector<CheckResult> run_validation_checks(const McsTable& table,
                                               const PlantModel& model);

}  // namespace wcs
