#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wcs/rng.hpp"

namespace wcs {

/// 5G numerology: slot count and PRB width follow from the subcarrier
/// spacing (1 ms subframe split into scs/15kHz slots, PRB = 12 subcarriers).
struct Numerology {
  double scs_hz = 30e3;
  int slots_per_subframe = 2;
  double slot_duration_s = 0.5e-3;
  int symbols_per_slot = 14;
  int overhead_symbols = 2;
  double prb_bandwidth_hz = 12 * 30e3;

  double usable_fraction() const {
    return static_cast<double>(symbols_per_slot - overhead_symbols) /
           symbols_per_slot;
  }

  /// Builds from a standard subcarrier spacing (15/30/60/120 kHz).
  static Numerology from_scs(double scs_hz, int symbols_per_slot = 14,
                             int overhead_symbols = 2);
};

struct FrameConfig {
  double channel_bandwidth_hz = 20e6;
  int total_prbs = 51;  // guard-band-adjusted for 20 MHz at 30 kHz SCS
  int ll_subframes_per_frame = 1;
  double frame_duration_s = 10e-3;
  double cycle_period_s = 10e-3;
};

struct McsEntry {
  int index = 0;
  double spectral_efficiency = 0.0;  // bit/s/Hz
  double snr_threshold_db = 0.0;     // effective SNR at which PER = 0.5
  double waterfall_slope = 1.0;      // logistic steepness, 1/dB
};

struct McsTableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ordered MCS entries; construction enforces contiguous indices and strictly
/// increasing spectral efficiency and SNR threshold.
class McsTable {
 public:
  explicit McsTable(std::vector<McsEntry> entries);

  static McsTable default_table();

  const McsEntry& entry(int mu) const { return entries_.at(mu); }
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<McsEntry>& entries() const { return entries_; }

 private:
  std::vector<McsEntry> entries_;
};

/// Distance-based path loss plus optional Rayleigh block fading.
struct ChannelModel {
  double path_loss_exponent = 3.5;
  double reference_loss_db = 67.0;  // at 1 m
  double tx_power_dbm = 23.0;
  double noise_density_dbm_hz = -174.0;
  bool rayleigh_fading = true;
};

/// Mean per-PRB SNR in dB at the given distance.
double mean_snr_db(const ChannelModel& model, double distance_m,
                   double prb_bandwidth_hz);

/// Linear per-PRB SNRs for one device over b PRBs; fading draws are
/// unit-mean exponential (Rayleigh power), one per PRB.
Eigen::VectorXd sample_channel_row(const ChannelModel& model,
                                   double distance_m, int b,
                                   double prb_bandwidth_hz, Rng& rng);

/// Stacks per-device rows into an m x b matrix; one Rng stream per device so
/// draws stay aligned no matter what the scheduler does elsewhere.
Eigen::MatrixXd sample_channel(const ChannelModel& model,
                               const Eigen::VectorXd& distances, int b,
                               double prb_bandwidth_hz, std::span<Rng> rngs);

/// Exponential effective SNR mapping (beta = 1) of linear per-PRB SNRs:
/// -ln(mean exp(-h)). Equals h itself for a constant vector.
double eesm_effective_snr(const Eigen::VectorXd& h_block);

/// Packet error rate of one transmission: logistic waterfall in the EESM
/// effective SNR, centered on the entry's threshold.
double per(const McsEntry& mcs, const Eigen::VectorXd& h_block);

/// Airtime of one transmission attempt at the given MCS and bandwidth.
double tx_time(const McsEntry& mcs, double bandwidth_hz, int payload_bits,
               const Numerology& numerology);

}  // namespace wcs
