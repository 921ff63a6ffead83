#include "mgdm/transceiver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <set>

#include "mgdm/fft.hpp"
#include "mgdm/resample.hpp"
#include "mgdm/rng.hpp"

namespace mgdm {

namespace {
constexpr int kSyncOversample = 4;
constexpr long kSyncGuardBits = 16;   // keeps resampler edge effects out of the counted window
constexpr double kSyncThreshold = 0.15;
}  // namespace

void TxSpec::validate() const {
  if (!(bit_rate > 0)) throw std::invalid_argument("tx.bit_rate must be positive");
  if (samples_per_bit < 4) throw std::invalid_argument("tx.samples_per_bit must be >= 4");
  if (prbs_order != 7 && prbs_order != 15)
    throw std::invalid_argument("tx.prbs_order must be 7 or 15");
  std::set<int> delays(port_delay_bits.begin(), port_delay_bits.end());
  if (delays.size() != port_delay_bits.size())
    throw std::invalid_argument("tx.port_delay_bits must be pairwise distinct");
  if (!(rise_time_bits >= 0 && rise_time_bits <= 1))
    throw std::invalid_argument("tx.rise_time_bits must lie in [0, 1]");
  if (!(extinction_db > 0)) throw std::invalid_argument("tx.extinction_db must be positive");
}

void CaptureSpec::validate() const {
  if (!(scope_rate > 0)) throw std::invalid_argument("capture.scope_rate must be positive");
  if (total_samples <= 0) throw std::invalid_argument("capture.total_samples must be positive");
  if (!(electrical_noise_sigma >= 0))
    throw std::invalid_argument("capture.electrical_noise_sigma must be >= 0");
}

std::vector<std::uint8_t> prbs_sequence(int order, std::uint32_t seed) {
  if (order != 7 && order != 15) throw std::invalid_argument("unsupported PRBS order");
  const std::uint32_t mask = (1u << order) - 1;
  if ((seed & mask) == 0) throw std::invalid_argument("PRBS seed must be nonzero");
  // Fibonacci LFSR, taps (order, order-1)
  std::uint32_t state = seed & mask;
  std::vector<std::uint8_t> bits(mask);
  for (std::uint32_t i = 0; i < mask; ++i) {
    const std::uint8_t out = (state >> (order - 1)) & 1u;
    const std::uint32_t fb = ((state >> (order - 1)) ^ (state >> (order - 2))) & 1u;
    state = ((state << 1) | fb) & mask;
    bits[i] = out;
  }
  return bits;
}

std::vector<std::uint8_t> prbs15(std::uint32_t seed) { return prbs_sequence(15, seed); }

Waveform ook_modulate(const std::vector<std::uint8_t>& bits, const TxSpec& tx) {
  tx.validate();
  if (bits.empty()) throw std::invalid_argument("ook_modulate: empty bit sequence");
  const double a1 = 1.0;
  const double a0 = std::pow(10.0, -tx.extinction_db / 20.0);
  const int spb = tx.samples_per_bit;
  const double rise = tx.rise_time_bits;

  Waveform w;
  w.rate = tx.bit_rate * spb;
  w.samples.resize(static_cast<Eigen::Index>(bits.size()) * spb);
  for (std::size_t n = 0; n < bits.size(); ++n) {
    const double cur = bits[n] ? a1 : a0;
    const double prev = (n > 0 && bits[n - 1]) ? a1 : (n > 0 ? a0 : cur);
    for (int s = 0; s < spb; ++s) {
      const double t = (s + 0.5) / spb;
      double amp = cur;
      if (rise > 0 && t < rise && cur != prev)
        amp = prev + (cur - prev) * 0.5 * (1.0 - std::cos(std::numbers::pi * t / rise));
      w.samples[static_cast<Eigen::Index>(n) * spb + s] = amp;
    }
  }
  return w;
}

std::array<Waveform, 4> decorrelate_ports(const Waveform& w, const TxSpec& tx) {
  tx.validate();
  const Eigen::Index n = w.samples.size();
  std::array<Waveform, 4> out;
  for (int p = 0; p < 4; ++p) {
    const long shift =
        ((long(tx.port_delay_bits[p]) * tx.samples_per_bit) % n + n) % n;
    out[p].rate = w.rate;
    out[p].samples.resize(n);
    // circular delay by `shift` samples
    out[p].samples.tail(n - shift) = w.samples.head(n - shift);
    out[p].samples.head(shift) = w.samples.tail(shift);
  }
  return out;
}

RealWaveform photodetect(const Waveform& field, const CaptureSpec& cap, std::uint64_t seed) {
  cap.validate();
  RealWaveform out;
  out.rate = field.rate;
  out.samples = field.samples.cwiseAbs2();
  if (cap.electrical_noise_sigma > 0) {
    auto rng = make_engine(derive_seed(seed, {stream::kElectricalNoise}));
    std::normal_distribution<double> n(0.0, cap.electrical_noise_sigma);
    for (Eigen::Index i = 0; i < out.samples.size(); ++i) out.samples[i] += n(rng);
  }
  return out;
}

RealWaveform scope_sample(const RealWaveform& w, const CaptureSpec& cap) {
  cap.validate();
  RealWaveform out;
  out.rate = cap.scope_rate;
  out.samples = resample(w.samples, w.rate, cap.scope_rate, cap.total_samples);
  return out;
}

long raw_bits(const CaptureSpec& cap, const TxSpec& tx) {
  const auto br = static_cast<long long>(std::llround(tx.bit_rate));
  const auto sr = static_cast<long long>(std::llround(cap.scope_rate));
  if (br > 0 && sr > 0 && double(br) == tx.bit_rate && double(sr) == cap.scope_rate)
    return static_cast<long>(static_cast<long long>(cap.total_samples) * br / sr);
  return static_cast<long>(std::floor(double(cap.total_samples) * tx.bit_rate / cap.scope_rate));
}

long usable_bits(const CaptureSpec& cap, const TxSpec& tx) {
  const long raw = raw_bits(cap, tx);
  const long period = tx.prbs_period();
  if (raw / period < 2)
    throw std::invalid_argument("capture shorter than two PRBS periods");
  return (raw / period - 1) * period;
}

SyncResult resample_sync(const RealWaveform& capture, const TxSpec& tx,
                         const CaptureSpec& cap, const std::vector<std::uint8_t>& reference) {
  tx.validate();
  cap.validate();
  const long period = tx.prbs_period();
  if (static_cast<long>(reference.size()) != period)
    throw std::invalid_argument("resample_sync: reference must be one PRBS period");
  const long raw = raw_bits(cap, tx);
  const long usable = usable_bits(cap, tx);

  // integer oversampling of the bit rate
  const int os = kSyncOversample;
  const Eigen::Index n_os = static_cast<Eigen::Index>(raw) * os;
  const Eigen::VectorXd y = resample(capture.samples, cap.scope_rate, os * tx.bit_rate, n_os);

  // sampling phase with the widest eye: maximum mean distance from threshold
  const double mean = y.mean();
  int best_phase = 0;
  double best_metric = -1.0;
  for (int p = 0; p < os; ++p) {
    double acc = 0.0;
    for (long i = 0; i < raw; ++i) acc += std::abs(y[i * os + p] - mean);
    if (acc > best_metric) {
      best_metric = acc;
      best_phase = p;
    }
  }
  Eigen::VectorXd soft(raw);
  for (long i = 0; i < raw; ++i) soft[i] = y[i * os + best_phase];

  // circular correlation of one period against the +/-1-mapped reference
  const long start = kSyncGuardBits;
  Eigen::VectorXcd w(period), r(period);
  const double wmean = soft.segment(start, period).mean();
  for (long i = 0; i < period; ++i) {
    w[i] = soft[start + i] - wmean;
    r[i] = reference[i] ? 1.0 : -1.0;
  }
  const Eigen::VectorXcd corr =
      Fft::inverse(Fft::forward(w).conjugate().cwiseProduct(Fft::forward(r)));
  long peak = 0;
  double peak_val = 0.0;
  for (long o = 0; o < period; ++o) {
    const double v = std::abs(corr[o].real());
    if (v > peak_val) {
      peak_val = v;
      peak = o;
    }
  }
  const double norm = w.norm() * r.norm();
  const double significance = (norm > 0) ? peak_val / norm : 0.0;
  if (significance < kSyncThreshold)
    throw SyncError("synchronization failed: correlation peak " +
                    std::to_string(significance) + " below threshold");

  SyncResult res;
  res.inverted = corr[peak].real() < 0.0;
  res.correlation = significance;
  res.bit_offset = peak % period;
  res.start_bit = start;
  res.soft = soft.segment(start, usable);
  return res;
}

SequenceReport decide_and_count(const Eigen::VectorXd& soft,
                                const std::vector<std::uint8_t>& reference_bits,
                                int sequence_index) {
  if (soft.size() != static_cast<Eigen::Index>(reference_bits.size()))
    throw std::invalid_argument("decide_and_count: length mismatch after alignment");

  // two-cluster split of the soft-value histogram
  double th = soft.mean();
  for (int iter = 0; iter < 64; ++iter) {
    double s0 = 0, s1 = 0;
    long c0 = 0, c1 = 0;
    for (Eigen::Index i = 0; i < soft.size(); ++i) {
      if (soft[i] > th) { s1 += soft[i]; ++c1; } else { s0 += soft[i]; ++c0; }
    }
    if (c0 == 0 || c1 == 0) break;
    const double next = 0.5 * (s0 / c0 + s1 / c1);
    if (std::abs(next - th) < 1e-12 * (1.0 + std::abs(th))) { th = next; break; }
    th = next;
  }

  SequenceReport rep;
  rep.sequence_index = sequence_index;
  rep.bits_compared = soft.size();
  for (Eigen::Index i = 0; i < soft.size(); ++i) {
    const bool decision = soft[i] > th;
    if (decision != (reference_bits[i] != 0)) {
      ++rep.error_count;
      rep.error_positions.push_back(i);
    }
  }
  rep.ber = rep.bits_compared ? double(rep.error_count) / double(rep.bits_compared) : 0.0;
  return rep;
}

std::vector<std::pair<double, double>> eye_fold(const RealWaveform& capture, const TxSpec& tx,
                                                int oversample) {
  const double out_rate = oversample * tx.bit_rate;
  const auto n_out =
      static_cast<Eigen::Index>(std::floor(capture.samples.size() / capture.rate * out_rate));
  const Eigen::VectorXd y = resample(capture.samples, capture.rate, out_rate, n_out);
  std::vector<std::pair<double, double>> pts;
  pts.reserve(n_out);
  for (Eigen::Index i = 0; i < n_out; ++i)
    pts.emplace_back(double(i % (2 * oversample)) / oversample, y[i]);
  return pts;
}

}  // namespace mgdm
