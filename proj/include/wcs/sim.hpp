#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "wcs/dynamics.hpp"
#include "wcs/phy.hpp"
#include "wcs/scheduler.hpp"

namespace wcs {

/// Everything a trial needs; defaults reproduce the reference experiment
/// (20 MHz / 30 kHz SCS / 12-PRB blocks / identical pendulums at 10 ms).
struct SimConfig {
  int devices = 25;
  double cell_radius_m = 50.0;
  double duration_s = 1000.0;
  double cycle_period_s = 0.01;
  Policy policy = Policy::kControlOptimal;
  std::uint64_t seed = 1;
  int trials = 1;
  int rho_prbs_per_block = 12;
  int payload_bytes = 100;

  Numerology numerology = Numerology::from_scs(30e3);
  FrameConfig frame;
  ChannelModel channel;
  McsTable mcs_table = McsTable::default_table();
  PendulumParams pendulum;

  Eigen::Vector4d lqr_state_weights{100.0, 1.0, 1.0, 1.0};  // diagonal of Q
  double lqr_input_weight = 1.0;
  double process_noise_variance = 1e-5;
  double init_angle_std_rad = 0.1;
  double fallen_angle_rad = 0.5235987755982988;  // pi/6
  int counter_cap = 200;

  int payload_bits() const { return payload_bytes * 8; }
  long cycles() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// One device-cycle observation, taken at the start of the cycle (the state
/// that was sampled for transmission).
struct DeviceCycleRecord {
  std::int32_t cycle = 0;
  std::int32_t device = 0;
  std::uint8_t scheduled = 0;
  std::uint8_t gamma = 0;
  std::uint8_t fallen = 0;
  std::int32_t counter = 1;
  double distance = 0.0;   // |cart position + pole_length * sin(theta)|
  double lyapunov = 0.0;   // x' P x
  Eigen::Vector4d state = Eigen::Vector4d::Zero();
};

struct DeviceAggregate {
  double mean_distance = 0.0;
  double drop_rate = 0.0;  // fraction of cycles without a successful uplink
  bool fallen = false;
};

struct MetricsLog {
  int schema_version = 1;
  int devices = 0;
  long cycles = 0;
  double cycle_period_s = 0.0;
  std::vector<DeviceCycleRecord> records;  // device-major within each cycle
  std::vector<DeviceAggregate> per_device;
  double fleet_mean_distance = 0.0;
  double fleet_drop_rate = 0.0;
  int fallen_count = 0;

  /// One row per device-cycle; leading comment line carries schema_version.
  void write_csv(std::ostream& out) const;
};

/// Per-cycle snapshot handed to an observer; used by invariant tests.
struct CycleTrace {
  long cycle = 0;
  ScheduleOutcome outcome;
  std::vector<int> counters_pre;
  std::vector<int> counters_post;
  std::vector<std::uint8_t> gamma;
  std::vector<std::uint8_t> fallen_pre;
  Eigen::MatrixXd states_pre;      // p x m
  Eigen::MatrixXd estimates_used;  // p x m, the estimate for this cycle's counter
};

using CycleObserver = std::function<void(const CycleTrace&)>;

/// Runs one seeded trial. Deterministic in (config, seed): every random
/// stream is derived from the seed per (purpose, device), so the scheduler
/// choice never perturbs placement, fading, noise or drop coins.
/// With keep_records = false only aggregates are retained.
MetricsLog run_trial(const SimConfig& config, std::uint64_t seed,
                     const CycleObserver& observer = {},
                     bool keep_records = true);

struct ExperimentSummary {
  int schema_version = 1;
  Policy policy = Policy::kControlOptimal;
  int devices = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  double duration_s = 0.0;
  std::vector<double> fleet_mean_distance_per_trial;
  std::vector<double> fleet_drop_rate_per_trial;
  std::vector<int> fallen_per_trial;
  double mean_fleet_distance = 0.0;
  double std_fleet_distance = 0.0;  // sample std; 0 for a single trial
};

/// Runs config.trials trials with seeds seed, seed+1, ... and aggregates.
ExperimentSummary run_experiment(const SimConfig& config);

}  // namespace wcs
