#include "wcs/phy.hpp"

#include <cmath>

namespace wcs {

Numerology Numerology::from_scs(double scs_hz, int symbols_per_slot,
                                int overhead_symbols) {
  const bool standard = scs_hz == 15e3 || scs_hz == 30e3 || scs_hz == 60e3 ||
                        scs_hz == 120e3;
  if (!standard) {
    throw std::invalid_argument(
        "numerology: scs_hz must be one of 15, 30, 60 or 120 kHz");
  }
  if (symbols_per_slot < 1 || overhead_symbols < 0 ||
      overhead_symbols >= symbols_per_slot) {
    throw std::invalid_argument(
        "numerology: overhead_symbols must be in [0, symbols_per_slot)");
  }
  Numerology n;
  n.scs_hz = scs_hz;
  n.slots_per_subframe = static_cast<int>(scs_hz / 15e3);
  n.slot_duration_s = 1e-3 / n.slots_per_subframe;
  n.symbols_per_slot = symbols_per_slot;
  n.overhead_symbols = overhead_symbols;
  n.prb_bandwidth_hz = 12.0 * scs_hz;
  return n;
}

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw McsTableError("mcs table: no entries");
  for (int i = 0; i < static_cast<int>(entries_.size()); ++i) {
    const McsEntry& e = entries_[i];
    if (e.index != i) {
      throw McsTableError("mcs table: indices must be contiguous from 0, got " +
                          std::to_string(e.index) + " at position " +
                          std::to_string(i));
    }
    if (e.spectral_efficiency <= 0 || e.waterfall_slope <= 0) {
      throw McsTableError(
          "mcs table: spectral_efficiency and waterfall_slope must be "
          "positive at index " +
          std::to_string(i));
    }
    if (i > 0) {
      if (e.spectral_efficiency <= entries_[i - 1].spectral_efficiency) {
        throw McsTableError(
            "mcs table: spectral_efficiency must be strictly increasing at "
            "index " +
            std::to_string(i));
      }
      if (e.snr_threshold_db <= entries_[i - 1].snr_threshold_db) {
        throw McsTableError(
            "mcs table: snr_threshold_db must be strictly increasing at "
            "index " +
            std::to_string(i));
      }
    }
  }
}

McsTable McsTable::default_table() {
  std::vector<McsEntry> entries;
  const double eff[] = {0.2, 0.4, 0.8, 1.2, 1.8, 2.4, 3.2, 4.0};
  const double thr[] = {-4.0, -1.0, 2.0, 5.0, 8.0, 11.0, 15.0, 19.0};
  for (int i = 0; i < 8; ++i) {
    entries.push_back({i, eff[i], thr[i], 1.0});
  }
  return McsTable(std::move(entries));
}

double mean_snr_db(const ChannelModel& model, double distance_m,
                   double prb_bandwidth_hz) {
  const double path_loss_db =
      model.reference_loss_db +
      10.0 * model.path_loss_exponent * std::log10(distance_m);
  const double noise_dbm =
      model.noise_density_dbm_hz + 10.0 * std::log10(prb_bandwidth_hz);
  return model.tx_power_dbm - path_loss_db - noise_dbm;
}

Eigen::VectorXd sample_channel_row(const ChannelModel& model,
                                   double distance_m, int b,
                                   double prb_bandwidth_hz, Rng& rng) {
  if (distance_m <= 0) {
    throw std::invalid_argument("sample_channel: distance must be positive");
  }
  const double mean_linear =
      std::pow(10.0, mean_snr_db(model, distance_m, prb_bandwidth_hz) / 10.0);
  Eigen::VectorXd row(b);
  for (int j = 0; j < b; ++j) {
    row(j) = model.rayleigh_fading ? mean_linear * rng.exponential()
                                   : mean_linear;
  }
  return row;
}

Eigen::MatrixXd sample_channel(const ChannelModel& model,
                               const Eigen::VectorXd& distances, int b,
                               double prb_bandwidth_hz, std::span<Rng> rngs) {
  const int m = static_cast<int>(distances.size());
  if (static_cast<int>(rngs.size()) != m) {
    throw std::invalid_argument("sample_channel: one rng stream per device");
  }
  Eigen::MatrixXd H(m, b);
  for (int i = 0; i < m; ++i) {
    H.row(i) =
        sample_channel_row(model, distances(i), b, prb_bandwidth_hz, rngs[i])
            .transpose();
  }
  return H;
}

double eesm_effective_snr(const Eigen::VectorXd& h_block) {
  if (h_block.size() == 0) {
    throw std::invalid_argument("eesm: empty SNR block");
  }
  const double h_min = h_block.minCoeff();
  double acc = 0.0;
  for (int i = 0; i < h_block.size(); ++i) {
    acc += std::exp(-(h_block(i) - h_min));
  }
  return h_min - std::log(acc / static_cast<double>(h_block.size()));
}

double per(const McsEntry& mcs, const Eigen::VectorXd& h_block) {
  const double eff_db = 10.0 * std::log10(eesm_effective_snr(h_block));
  const double x = mcs.waterfall_slope * (eff_db - mcs.snr_threshold_db);
  return 1.0 / (1.0 + std::exp(x));
}

double tx_time(const McsEntry& mcs, double bandwidth_hz, int payload_bits,
               const Numerology& numerology) {
  if (bandwidth_hz <= 0 || payload_bits <= 0) {
    throw std::invalid_argument("tx_time: arguments must be positive");
  }
  return payload_bits / (mcs.spectral_efficiency * bandwidth_hz *
                         numerology.usable_fraction());
}

}  // namespace wcs
