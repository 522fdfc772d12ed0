#include "wcs/scheduler.hpp"

#include <algorithm>

namespace wcs {

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::kPerOptimal: return "per";
    case Policy::kControlOptimal: return "control";
    case Policy::kRoundRobin: return "round-robin";
  }
  throw std::logic_error("unknown policy");
}

Policy policy_from_string(const std::string& name) {
  if (name == "per") return Policy::kPerOptimal;
  if (name == "control") return Policy::kControlOptimal;
  if (name == "round-robin") return Policy::kRoundRobin;
  throw std::invalid_argument(
      "scheduler must be one of: control, per, round-robin (got '" + name +
      "')");
}

BlockLayout BlockLayout::make(const Numerology& numerology,
                              const FrameConfig& frame, int rho) {
  if (rho < 1 || rho > frame.total_prbs) {
    throw std::invalid_argument(
        "block layout: rho must be in [1, total_prbs]");
  }
  BlockLayout layout;
  layout.slots = numerology.slots_per_subframe;
  layout.rho = rho;
  layout.freq_groups = frame.total_prbs / rho;
  layout.total_prbs = frame.total_prbs;
  for (int s = 0; s < layout.slots; ++s) {
    for (int g = 0; g < layout.freq_groups; ++g) {
      layout.blocks.push_back({s, g * rho, g * rho + rho - 1});
    }
  }
  return layout;
}

int select_mcs(const BlockLayout& layout, const Numerology& numerology,
               const McsTable& table, int payload_bits) {
  const double block_bandwidth = layout.rho * numerology.prb_bandwidth_hz;
  for (int mu = 0; mu < table.size(); ++mu) {
    if (tx_time(table.entry(mu), block_bandwidth, payload_bits, numerology) <=
        numerology.slot_duration_s) {
      return mu;
    }
  }
  throw InfeasibleMcsError(
      "no MCS fits " + std::to_string(payload_bits) + " payload bits into a " +
      std::to_string(numerology.slot_duration_s * 1e6) + " us slot over " +
      std::to_string(layout.rho) + " PRBs");
}

namespace {

Eigen::MatrixXd per_matrix(const Eigen::MatrixXd& snr,
                           const BlockLayout& layout, const McsEntry& mcs) {
  const int m = static_cast<int>(snr.rows());
  const int n = layout.n_blocks();
  Eigen::MatrixXd q(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto& block = layout.blocks[j];
      const Eigen::VectorXd h_block =
          snr.row(i).segment(block.prb_start, layout.rho).transpose();
      q(i, j) = per(mcs, h_block);
    }
  }
  return q;
}

}  // namespace

Eigen::MatrixXd build_per_cost(const Eigen::MatrixXd& snr,
                               const BlockLayout& layout,
                               const McsEntry& mcs) {
  return per_matrix(snr, layout, mcs).array() - 1.0;
}

Eigen::MatrixXd build_control_cost(const Eigen::MatrixXd& snr,
                                   const BlockLayout& layout,
                                   const McsEntry& mcs,
                                   const Eigen::VectorXd& weights) {
  if (weights.size() != snr.rows()) {
    throw std::invalid_argument("control cost: one weight per device");
  }
  Eigen::MatrixXd shifted = per_matrix(snr, layout, mcs).array() - 1.0;
  return weights.asDiagonal() * shifted;
}

ScheduleOutcome schedule(Policy policy, const Eigen::MatrixXd& snr,
                         const std::vector<int>& device_ids,
                         const Eigen::VectorXd& weights,
                         const BlockLayout& layout,
                         const Numerology& numerology, const McsTable& table,
                         int payload_bits, int device_count, int rr_cursor) {
  const int m_active = static_cast<int>(device_ids.size());
  if (snr.rows() != m_active) {
    throw std::invalid_argument("schedule: one SNR row per active device");
  }
  const int mu = select_mcs(layout, numerology, table, payload_bits);
  const int n = layout.n_blocks();

  ScheduleOutcome outcome;
  outcome.next_rr_cursor = rr_cursor;

  std::vector<std::pair<int, int>> granted;  // (active row, block)
  if (policy == Policy::kRoundRobin) {
    std::vector<char> active(device_count, 0);
    for (int id : device_ids) active.at(id) = 1;
    const int want = std::min(n, m_active);
    int block = 0;
    for (int step = 0; step < device_count && block < want; ++step) {
      const int id = (rr_cursor + step) % device_count;
      if (!active[id]) continue;
      const int row =
          static_cast<int>(std::lower_bound(device_ids.begin(),
                                            device_ids.end(), id) -
                           device_ids.begin());
      granted.emplace_back(row, block++);
    }
    outcome.next_rr_cursor = device_count > 0 ? (rr_cursor + n) % device_count
                                              : 0;
  } else if (m_active > 0) {
    const Eigen::MatrixXd cost =
        policy == Policy::kPerOptimal
            ? build_per_cost(snr, layout, table.entry(mu))
            : build_control_cost(snr, layout, table.entry(mu), weights);
    const Matching matching = hungarian(cost);
    granted = matching.pairs;
  }

  std::vector<char> has_grant(m_active, 0);
  for (const auto& [row, block] : granted) {
    const auto& b = layout.blocks[block];
    outcome.grants.push_back({device_ids[row], b.slot, b.prb_start, b.prb_end,
                              mu});
    has_grant[row] = 1;
  }
  std::sort(outcome.grants.begin(), outcome.grants.end(),
            [](const Grant& a, const Grant& b) { return a.device < b.device; });
  for (int row = 0; row < m_active; ++row) {
    if (!has_grant[row]) outcome.unscheduled.push_back(device_ids[row]);
  }
  return outcome;
}

}  // namespace wcs
