#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wcs/assignment.hpp"
#include "wcs/phy.hpp"

namespace wcs {

enum class Policy { kPerOptimal, kControlOptimal, kRoundRobin };

std::string to_string(Policy policy);
Policy policy_from_string(const std::string& name);

/// Partition of one low-latency subframe into congruent blocks of one slot
/// by rho PRBs, slot-major then frequency-major.
struct BlockLayout {
  struct Block {
    int slot = 0;
    int prb_start = 0;
    int prb_end = 0;  // inclusive
  };

  int slots = 0;
  int rho = 0;
  int freq_groups = 0;
  int total_prbs = 0;
  std::vector<Block> blocks;

  int n_blocks() const { return static_cast<int>(blocks.size()); }

  static BlockLayout make(const Numerology& numerology,
                          const FrameConfig& frame, int rho);
};

struct InfeasibleMcsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grant {
  int device = 0;
  int slot = 0;
  int prb_start = 0;
  int prb_end = 0;
  int mcs = 0;
};

struct ScheduleOutcome {
  std::vector<Grant> grants;        // sorted by device
  std::vector<int> unscheduled;     // active devices without a grant
  int next_rr_cursor = 0;
};

/// Smallest MCS whose transmission time fits one slot for a rho-PRB block.
/// Identical for every block of the layout (airtime is channel independent).
/// Throws InfeasibleMcsError when even the top entry does not fit.
int select_mcs(const BlockLayout& layout, const Numerology& numerology,
               const McsTable& table, int payload_bits);

/// Cost matrix whose (i, j) entry is per(mcs, device i's SNRs on block j)
/// minus 1, so leaving a device unscheduled costs 0 and a full minimum-cost
/// matching minimizes the expected number of drops.
Eigen::MatrixXd build_per_cost(const Eigen::MatrixXd& snr,
                               const BlockLayout& layout, const McsEntry& mcs);

/// Per-device weighted variant: entry (i, j) = weights[i] * (per - 1), so the
/// matching minimizes the summed expected drop penalty.
Eigen::MatrixXd build_control_cost(const Eigen::MatrixXd& snr,
                                   const BlockLayout& layout,
                                   const McsEntry& mcs,
                                   const Eigen::VectorXd& weights);

/// Produces the cycle's grants. `snr` holds one row per *active* device and
/// `device_ids` maps those rows to global device indices (ascending).
/// `weights` is consumed by the control-optimal policy only. Round robin
/// walks the full cyclic device order from rr_cursor, skipping inactive
/// devices, and advances the cursor by the block count.
ScheduleOutcome schedule(Policy policy, const Eigen::MatrixXd& snr,
                         const std::vector<int>& device_ids,
                         const Eigen::VectorXd& weights,
                         const BlockLayout& layout,
                         const Numerology& numerology, const McsTable& table,
                         int payload_bits, int device_count, int rr_cursor);

}  // namespace wcs
