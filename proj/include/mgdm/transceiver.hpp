#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mgdm/waveform.hpp"

namespace mgdm {

// Transmitter-side electrical/optical parameters.
struct TxSpec {
  double bit_rate = 28e9;
  int samples_per_bit = 4;         // simulation oversampling, >= 4
  int prbs_order = 15;
  std::array<int, 4> port_delay_bits = {0, 1021, 2711, 5003};  // pairwise distinct
  double rise_time_bits = 0.2;     // raised-cosine edge length, fraction of a bit
  double extinction_db = 13.0;     // P1 / P0

  void validate() const;
  long prbs_period() const { return (1L << prbs_order) - 1; }
};

// Sampling-scope capture parameters.
struct CaptureSpec {
  double scope_rate = 80e9;        // 80e9 single-channel, 40e9 four-channel
  long total_samples = 1048576;
  double electrical_noise_sigma = 0.02;  // std relative to unit mark level

  void validate() const;
};

// Per-captured-sequence error bookkeeping.
struct SequenceReport {
  int sequence_index = 0;
  long bits_compared = 0;
  long error_count = 0;
  std::vector<long> error_positions;  // sorted, unique bit indices
  double ber = 0.0;
};

// One period of the maximal-length PRBS from the Fibonacci LFSR with taps
// (15, 14). Throws on a zero seed.
std::vector<std::uint8_t> prbs15(std::uint32_t seed);
std::vector<std::uint8_t> prbs_sequence(int order, std::uint32_t seed);

// NRZ OOK optical field: amplitude sqrt(P1) / sqrt(P0) with raised-cosine
// edges, constant optical phase, samples_per_bit samples per bit.
Waveform ook_modulate(const std::vector<std::uint8_t>& bits, const TxSpec& tx);

// Four circularly delayed copies (delay = port_delay_bits[i] bits).
std::array<Waveform, 4> decorrelate_ports(const Waveform& w, const TxSpec& tx);

// Square-law detection: |E|^2 plus additive Gaussian receiver noise.
// Destroys optical phase: a global phase rotation of E leaves the output
// unchanged (same seed).
RealWaveform photodetect(const Waveform& field, const CaptureSpec& cap, std::uint64_t seed);

// Band-limited rational resampling to scope_rate; exactly total_samples out.
RealWaveform scope_sample(const RealWaveform& w, const CaptureSpec& cap);

// Bits recoverable from one capture: raw = floor(total_samples * bit_rate /
// scope_rate), trimmed to usable = (floor(raw / period) - 1) * period.
long raw_bits(const CaptureSpec& cap, const TxSpec& tx);
long usable_bits(const CaptureSpec& cap, const TxSpec& tx);

struct SyncError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SyncResult {
  Eigen::VectorXd soft;   // exactly usable_bits aligned soft values, 1/bit
  long bit_offset = 0;    // PRBS phase: soft[i] carries reference[(bit_offset + i) % period]
  long start_bit = 0;     // absolute bit index of soft[0] in the raw capture
  bool inverted = false;
  double correlation = 0.0;  // normalized sync-peak height
};

// Re-samples a capture to an integer oversampling of the bit rate, picks the
// eye-opening-maximizing phase, and locates PRBS alignment and polarity by
// circular cross-correlation. Throws SyncError when the correlation peak is
// below the significance threshold (0.15 normalized).
SyncResult resample_sync(const RealWaveform& capture, const TxSpec& tx,
                         const CaptureSpec& cap, const std::vector<std::uint8_t>& reference);

// Histogram-midpoint threshold (two-cluster split), hard decisions, report.
SequenceReport decide_and_count(const Eigen::VectorXd& soft,
                                const std::vector<std::uint8_t>& reference_bits,
                                int sequence_index);

// Eye-diagram fold: (phase_in_bits in [0, 2), amplitude) pairs from a capture
// resampled to `oversample` points per bit.
std::vector<std::pair<double, double>> eye_fold(const RealWaveform& capture, const TxSpec& tx,
                                                int oversample = 16);

}  // namespace mgdm
