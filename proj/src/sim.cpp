#include "wcs/sim.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "wcs/rng.hpp"

namespace wcs {

namespace {

enum StreamPurpose : std::uint64_t {
  kPlacement = 1,
  kInitState = 2,
  kFading = 3,
  kNoise = 4,
  kDropCoin = 5,
};

void check(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

struct DeviceRuntime {
  PlantState plant;
  LinkState link;
  Eigen::VectorXd estimate;  // Ac^counter * last_rx, kept incrementally
  double distance_m = 0.0;
  Rng fading;
  Rng noise;
  Rng coin;
  // aggregate accumulators
  double distance_sum = 0.0;
  long successes = 0;

  DeviceRuntime(Rng f, Rng n, Rng c)
      : fading(std::move(f)), noise(std::move(n)), coin(std::move(c)) {}
};

double tip_distance(const Eigen::VectorXd& x, double pole_length) {
  return std::abs(x(0) + pole_length * std::sin(x(2)));
}

}  // namespace

long SimConfig::cycles() const {
  return std::lround(duration_s / cycle_period_s);
}

void SimConfig::validate() const {
  check(devices >= 1, "devices: must be >= 1");
  check(cell_radius_m > 0, "cell_radius_m: must be positive");
  check(duration_s >= 0, "duration_s: must be nonnegative");
  check(cycle_period_s > 0, "cycle_period_s: must be positive");
  const double n_cycles = duration_s / cycle_period_s;
  check(std::abs(n_cycles - std::lround(n_cycles)) <= 1e-9 * (n_cycles + 1.0),
        "duration_s: must be an integer multiple of cycle_period_s");
  check(trials >= 1, "trials: must be >= 1");
  check(payload_bytes >= 1, "payload_bytes: must be >= 1");
  check(frame.total_prbs >= 1, "frame.total_prbs: must be >= 1");
  check(frame.total_prbs * numerology.prb_bandwidth_hz <=
            frame.channel_bandwidth_hz,
        "frame.total_prbs: total PRB bandwidth exceeds channel_bandwidth_hz");
  check(frame.ll_subframes_per_frame == 1 || frame.ll_subframes_per_frame == 2,
        "frame.ll_subframes_per_frame: must be 1 or 2");
  check(frame.frame_duration_s > 0, "frame.frame_duration_s: must be positive");
  check(frame.cycle_period_s == cycle_period_s &&
            frame.frame_duration_s == cycle_period_s,
        "cycle_period_s: one control cycle per frame requires "
        "cycle_period_s == frame.frame_duration_s");
  check(rho_prbs_per_block >= 1 && rho_prbs_per_block <= frame.total_prbs,
        "rho_prbs_per_block: must be in [1, frame.total_prbs]");
  check(pendulum.cart_mass_kg > 0 && pendulum.pole_mass_kg > 0 &&
            pendulum.pole_length_m > 0 && pendulum.gravity > 0,
        "pendulum: masses, length and gravity must be positive");
  check(pendulum.sample_period_s == cycle_period_s,
        "pendulum.sample_period_s: must equal cycle_period_s");
  check((lqr_state_weights.array() >= 0).all() &&
            lqr_state_weights.maxCoeff() > 0,
        "lqr.state_weights: must be nonnegative with at least one positive");
  check(lqr_input_weight > 0, "lqr.input_weight: must be positive");
  check(process_noise_variance >= 0,
        "process_noise_variance: must be nonnegative");
  check(init_angle_std_rad >= 0, "init_angle_std_rad: must be nonnegative");
  check(fallen_angle_rad > 0, "fallen_angle_rad: must be positive");
  check(counter_cap >= 1, "counter_cap: must be >= 1");
  check(channel.path_loss_exponent >= 0,
        "channel.path_loss_exponent: must be nonnegative");
}

void MetricsLog::write_csv(std::ostream& out) const {
  out << "# schema_version " << schema_version << "\n";
  out << "cycle,device,scheduled,gamma,counter,fallen,distance,lyapunov,"
         "x0,x1,x2,x3\n";
  char buf[512];
  for (const DeviceCycleRecord& r : records) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%d,%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.cycle, r.device, r.scheduled, r.gamma, r.counter, r.fallen,
                  r.distance, r.lyapunov, r.state(0), r.state(1), r.state(2),
                  r.state(3));
    out << buf;
  }
}

MetricsLog run_trial(const SimConfig& config, std::uint64_t seed,
                     const CycleObserver& observer, bool keep_records) {
  config.validate();

  const Eigen::MatrixXd Q = config.lqr_state_weights.asDiagonal();
  Eigen::MatrixXd R(1, 1);
  R << config.lqr_input_weight;
  const PlantModel model = pendulum_plant(config.pendulum, Q, R,
                                          config.process_noise_variance);
  const int p = model.state_dim();

  const BlockLayout layout =
      BlockLayout::make(config.numerology, config.frame,
                        config.rho_prbs_per_block);
  // Surfaces an impossible payload/slot combination before cycle 0.
  select_mcs(layout, config.numerology, config.mcs_table,
             config.payload_bits());

  // Drop-penalty weights, evaluated once; counters are capped at lookup.
  const Eigen::MatrixXd delta = model.A.transpose() * model.P * model.A -
                                model.Ac.transpose() * model.P * model.Ac;
  std::vector<double> weight_table(config.counter_cap + 1, 0.0);
  {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd acj = Eigen::MatrixXd::Identity(p, p);
    for (int l = 1; l <= config.counter_cap; ++l) {
      cov += acj * model.W * acj.transpose();
      acj = model.Ac * acj;
      weight_table[l] = (delta * cov).trace();
    }
  }

  const int m = config.devices;
  const double noise_std = std::sqrt(config.process_noise_variance);

  std::vector<DeviceRuntime> devices;
  devices.reserve(m);
  for (int i = 0; i < m; ++i) {
    devices.emplace_back(
        Rng(derive_seed(seed, kFading, i)), Rng(derive_seed(seed, kNoise, i)),
        Rng(derive_seed(seed, kDropCoin, i)));
    DeviceRuntime& dev = devices.back();

    Rng place(derive_seed(seed, kPlacement, i));
    const double radial = config.cell_radius_m * std::sqrt(place.uniform_open());
    place.uniform();  // angle; path loss only needs the radius
    dev.distance_m = radial;

    Rng init(derive_seed(seed, kInitState, i));
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(p);
    x0(2) = config.init_angle_std_rad * init.normal();
    dev.plant.x = x0;
    dev.link.last_rx = x0;
    dev.link.counter = 1;
    dev.estimate = model.Ac * x0;
  }

  MetricsLog log;
  log.devices = m;
  log.cycles = config.cycles();
  log.cycle_period_s = config.cycle_period_s;
  if (keep_records) log.records.reserve(log.cycles * m);

  Eigen::VectorXd distances(m);
  for (int i = 0; i < m; ++i) distances(i) = devices[i].distance_m;

  int rr_cursor = 0;
  const int b = config.frame.total_prbs;

  for (long k = 0; k < log.cycles; ++k) {
    // 1. channel states, sampled for every device to keep streams aligned
    Eigen::MatrixXd snr_all(m, b);
    for (int i = 0; i < m; ++i) {
      snr_all.row(i) = sample_channel_row(config.channel, distances(i), b,
                                          config.numerology.prb_bandwidth_hz,
                                          devices[i].fading)
                           .transpose();
    }

    std::vector<int> active_ids;
    for (int i = 0; i < m; ++i) {
      if (!devices[i].link.fallen) active_ids.push_back(i);
    }
    const int m_active = static_cast<int>(active_ids.size());

    Eigen::MatrixXd snr_active(m_active, b);
    Eigen::VectorXd weights(m_active);
    for (int row = 0; row < m_active; ++row) {
      const DeviceRuntime& dev = devices[active_ids[row]];
      snr_active.row(row) = snr_all.row(active_ids[row]);
      weights(row) =
          weight_table[std::min(dev.link.counter, config.counter_cap)];
    }

    // 2 + 3. block assignment and MCS
    const ScheduleOutcome outcome = schedule(
        config.policy, snr_active, active_ids, weights, layout,
        config.numerology, config.mcs_table, config.payload_bits(), m,
        rr_cursor);
    rr_cursor = outcome.next_rr_cursor;

    // 4. uplink outcomes; every device consumes its coin every cycle
    std::vector<std::uint8_t> scheduled(m, 0), gamma(m, 0);
    std::vector<double> coin(m);
    for (int i = 0; i < m; ++i) coin[i] = devices[i].coin.uniform();
    for (const Grant& grant : outcome.grants) {
      const Eigen::VectorXd h_block =
          snr_all.row(grant.device)
              .segment(grant.prb_start, grant.prb_end - grant.prb_start + 1)
              .transpose();
      const double q = per(config.mcs_table.entry(grant.mcs), h_block);
      scheduled[grant.device] = 1;
      gamma[grant.device] = coin[grant.device] >= q ? 1 : 0;
    }

    CycleTrace trace;
    const bool tracing = static_cast<bool>(observer);
    if (tracing) {
      trace.cycle = k;
      trace.outcome = outcome;
      trace.gamma = gamma;
      trace.states_pre.resize(p, m);
      trace.estimates_used.resize(p, m);
      for (int i = 0; i < m; ++i) {
        trace.counters_pre.push_back(devices[i].link.counter);
        trace.fallen_pre.push_back(devices[i].link.fallen ? 1 : 0);
        trace.states_pre.col(i) = devices[i].plant.x;
        trace.estimates_used.col(i) = devices[i].estimate;
      }
    }

    // 5 + 6. plants evolve, then counters and estimates update
    for (int i = 0; i < m; ++i) {
      DeviceRuntime& dev = devices[i];

      Eigen::VectorXd noise(p);
      for (int c = 0; c < p; ++c) noise(c) = noise_std * dev.noise.normal();

      const Eigen::VectorXd state_pre = dev.plant.x;
      const bool was_fallen = dev.link.fallen;

      if (keep_records) {
        DeviceCycleRecord rec;
        rec.cycle = static_cast<std::int32_t>(k);
        rec.device = i;
        rec.scheduled = scheduled[i];
        rec.gamma = gamma[i];
        rec.fallen = was_fallen ? 1 : 0;
        rec.counter = dev.link.counter;
        rec.distance = tip_distance(state_pre, config.pendulum.pole_length_m);
        rec.lyapunov = state_pre.dot(model.P * state_pre);
        rec.state = state_pre;
        log.records.push_back(rec);
      }
      dev.distance_sum +=
          tip_distance(state_pre, config.pendulum.pole_length_m);
      if (gamma[i]) ++dev.successes;

      if (was_fallen) continue;

      dev.plant = step_plant(model, dev.plant, gamma[i] != 0, dev.estimate,
                             noise);
      if (std::abs(dev.plant.x(2)) > config.fallen_angle_rad) {
        dev.link.fallen = true;  // frozen at the crossing state
      }
      dev.link = update_counter(dev.link, gamma[i] != 0, state_pre);
      dev.estimate = model.Ac * (gamma[i] ? state_pre : dev.estimate);
    }

    if (tracing) {
      for (int i = 0; i < m; ++i) {
        trace.counters_post.push_back(devices[i].link.counter);
      }
      observer(trace);
    }
  }

  log.per_device.resize(m);
  double fleet_distance = 0.0;
  double fleet_drops = 0.0;
  for (int i = 0; i < m; ++i) {
    DeviceAggregate& agg = log.per_device[i];
    agg.fallen = devices[i].link.fallen;
    if (log.cycles > 0) {
      agg.mean_distance = devices[i].distance_sum / log.cycles;
      agg.drop_rate =
          1.0 - static_cast<double>(devices[i].successes) / log.cycles;
    }
    fleet_distance += agg.mean_distance;
    fleet_drops += agg.drop_rate;
    if (agg.fallen) ++log.fallen_count;
  }
  log.fleet_mean_distance = m > 0 ? fleet_distance / m : 0.0;
  log.fleet_drop_rate = m > 0 ? fleet_drops / m : 0.0;
  return log;
}

ExperimentSummary run_experiment(const SimConfig& config) {
  ExperimentSummary summary;
  summary.policy = config.policy;
  summary.devices = config.devices;
  summary.trials = config.trials;
  summary.seed = config.seed;
  summary.duration_s = config.duration_s;

  for (int t = 0; t < config.trials; ++t) {
    const MetricsLog log =
        run_trial(config, config.seed + static_cast<std::uint64_t>(t), {},
                  /*keep_records=*/false);
    summary.fleet_mean_distance_per_trial.push_back(log.fleet_mean_distance);
    summary.fleet_drop_rate_per_trial.push_back(log.fleet_drop_rate);
    summary.fallen_per_trial.push_back(log.fallen_count);
  }

  const auto& xs = summary.fleet_mean_distance_per_trial;
  summary.mean_fleet_distance =
      std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) {
      ss += (x - summary.mean_fleet_distance) *
            (x - summary.mean_fleet_distance);
    }
    summary.std_fleet_distance = std::sqrt(ss / (xs.size() - 1));
  }
  return summary;
}

}  // namespace wcs
