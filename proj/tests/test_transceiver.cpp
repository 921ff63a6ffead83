#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mgdm/fft.hpp"
#include "mgdm/transceiver.hpp"

using namespace mgdm;

namespace {

const TxSpec kTx{};        // 28 Gbit/s, 4 samples/bit, PRBS-15
const CaptureSpec kCap{};  // 80 GSa/s, 2^20 samples

CaptureSpec quiet_cap(double rate = 80e9) {
  CaptureSpec c;
  c.scope_rate = rate;
  c.electrical_noise_sigma = 0.0;
  return c;
}

}  // namespace

TEST_CASE("PRBS-15 fundamentals") {
  const auto bits = prbs15(1);
  REQUIRE(bits.size() == 32767);
  long ones = 0;
  for (auto b : bits) ones += b;
  CHECK(ones == 16384);  // maximal-length balance: 2^14 marks

  CHECK_THROWS_AS(prbs15(0), std::invalid_argument);
  CHECK_THROWS_AS(prbs_sequence(9, 1), std::invalid_argument);

  const auto p7 = prbs_sequence(7, 1);
  REQUIRE(p7.size() == 127);
  long ones7 = 0;
  for (auto b : p7) ones7 += b;
  CHECK(ones7 == 64);

  // a different nonzero seed yields a circular shift of the same m-sequence
  const auto other = prbs15(0x5a5a);
  bool matched = false;
  for (long s = 0; s < 32767 && !matched; ++s) {
    bool ok = true;
    for (long i = 0; i < 200; ++i)
      if (other[i] != bits[(i + s) % 32767]) { ok = false; break; }
    if (!ok) continue;
    matched = true;
    for (long i = 0; i < 32767; ++i) REQUIRE(other[i] == bits[(i + s) % 32767]);
  }
  CHECK(matched);
}

TEST_CASE("PRBS-15 circular autocorrelation is -1 at every nonzero lag") {
  const auto bits = prbs15(1);
  const long n = 32767;
  Eigen::VectorXcd x(n);
  for (long i = 0; i < n; ++i) x[i] = bits[i] ? 1.0 : -1.0;
  const Eigen::VectorXcd spec = Fft::forward(x);
  const Eigen::VectorXcd ac = Fft::inverse(spec.cwiseProduct(spec.conjugate()));
  CHECK(std::abs(ac[0].real() - double(n)) < 1e-6);
  for (long lag = 1; lag < n; ++lag) CHECK(std::abs(ac[lag].real() + 1.0) < 1e-6);
}

TEST_CASE("OOK modulation") {
  const double a0 = std::pow(10.0, -13.0 / 20.0);

  SUBCASE("steady-state levels and sizes") {
    const std::vector<std::uint8_t> bits = {1, 1, 1, 0, 0, 0, 1};
    const Waveform w = ook_modulate(bits, kTx);
    CHECK(w.rate == 112e9);
    REQUIRE(w.samples.size() == 28);
    CHECK(std::abs(w.samples[1]) == doctest::Approx(1.0));   // mid-mark
    CHECK(std::abs(w.samples[17]) == doctest::Approx(a0));   // mid-space
    // last sample of each bit has finished its edge
    CHECK(std::abs(w.samples[15]) == doctest::Approx(a0));
  }

  SUBCASE("mean optical power of the PRBS pattern") {
    const Waveform w = ook_modulate(prbs15(1), kTx);
    const double p = w.samples.squaredNorm() / w.samples.size();
    const double expect = (16384.0 * 1.0 + 16383.0 * a0 * a0) / 32767.0;
    CHECK(p == doctest::Approx(expect).epsilon(0.02));
  }

  SUBCASE("constant patterns give constant fields") {
    const Waveform ones = ook_modulate(std::vector<std::uint8_t>(64, 1), kTx);
    for (Eigen::Index i = 0; i < ones.samples.size(); ++i)
      CHECK(std::abs(ones.samples[i]) == doctest::Approx(1.0));
    const Waveform zeros = ook_modulate(std::vector<std::uint8_t>(64, 0), kTx);
    for (Eigen::Index i = 0; i < zeros.samples.size(); ++i)
      CHECK(std::abs(zeros.samples[i]) == doctest::Approx(a0));
  }

  SUBCASE("101010... concentrates power at half the bit rate") {
    std::vector<std::uint8_t> alt(256);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2;
    const Waveform w = ook_modulate(alt, kTx);
    Eigen::VectorXcd spec = Fft::forward(w.samples);
    const Eigen::Index n = spec.size();
    Eigen::Index best = 1;
    for (Eigen::Index k = 1; k <= n / 2; ++k)
      if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
    // tone at bit_rate / 2 = sample_rate / 8
    CHECK(best == n / 8);
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(ook_modulate({}, kTx), std::invalid_argument);
    TxSpec bad = kTx;
    bad.samples_per_bit = 2;
    CHECK_THROWS_AS(ook_modulate({1, 0}, bad), std::invalid_argument);
    bad = kTx;
    bad.port_delay_bits = {0, 5, 5, 9};
    CHECK_THROWS_AS(ook_modulate({1, 0}, bad), std::invalid_argument);
  }
}

TEST_CASE("port decorrelation is a circular bit delay") {
  const Waveform w = ook_modulate(prbs_sequence(7, 1), kTx);
  const auto ports = decorrelate_ports(w, kTx);
  const Eigen::Index n = w.samples.size();
  CHECK(ports[0].samples == w.samples);  // delay 0
  for (int p = 1; p < 4; ++p) {
    const long shift = (long(kTx.port_delay_bits[p]) * kTx.samples_per_bit) % n;
    for (Eigen::Index i = 0; i < n; ++i)
      CHECK(ports[p].samples[(i + shift) % n] == w.samples[i]);
  }

  // a whole-period delay is the identity
  TxSpec full = kTx;
  full.port_delay_bits = {0, 127, 254, 381};
  const auto wrap = decorrelate_ports(w, full);
  for (int p = 0; p < 4; ++p) CHECK(wrap[p].samples == w.samples);
}

TEST_CASE("photodetection") {
  Waveform field;
  field.rate = 112e9;
  field.samples.resize(4096);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (auto& s : field.samples) s = std::complex<double>(nd(rng), nd(rng));

  SUBCASE("square law, no noise") {
    const RealWaveform out = photodetect(field, quiet_cap(), 5);
    for (Eigen::Index i = 0; i < out.samples.size(); ++i)
      CHECK(out.samples[i] == std::norm(field.samples[i]));
  }

  SUBCASE("global optical phase is destroyed") {
    const RealWaveform a = photodetect(field, kCap, 5);
    Waveform rotated = field;
    rotated.samples *= std::polar(1.0, 1.234567);
    const RealWaveform b = photodetect(rotated, kCap, 5);
    double max_rel = 0.0;
    for (Eigen::Index i = 0; i < a.samples.size(); ++i)
      max_rel = std::max(max_rel, std::abs(a.samples[i] - b.samples[i]) /
                                      (1.0 + std::abs(a.samples[i])));
    CHECK(max_rel < 1e-13);
  }

  SUBCASE("noise statistics and determinism") {
    Waveform dark;
    dark.rate = 112e9;
    dark.samples = Eigen::VectorXcd::Zero(200000);
    CaptureSpec cap = kCap;
    cap.electrical_noise_sigma = 0.1;
    const RealWaveform n1 = photodetect(dark, cap, 5);
    const double mean = n1.samples.mean();
    const double var = (n1.samples.array() - mean).square().mean();
    CHECK(std::sqrt(var) == doctest::Approx(0.1).epsilon(0.05));
    CHECK(std::abs(mean) < 1e-3);

    const RealWaveform n2 = photodetect(dark, cap, 5);
    CHECK(n1.samples == n2.samples);
    const RealWaveform n3 = photodetect(dark, cap, 6);
    CHECK(n1.samples != n3.samples);
  }
}

TEST_CASE("scope resampling") {
  SUBCASE("equal rates pass through exactly") {
    RealWaveform w;
    w.rate = 80e9;
    w.samples = Eigen::VectorXd::Random(5000);
    CaptureSpec cap = quiet_cap(80e9);
    cap.total_samples = 5000;
    const RealWaveform out = scope_sample(w, cap);
    CHECK(out.samples == w.samples);
  }

  SUBCASE("sinusoid survives a 80 -> 112 GSa/s conversion") {
    const double f = 3.5e9, fs_in = 80e9, fs_out = 112e9;
    RealWaveform w;
    w.rate = fs_in;
    w.samples.resize(8000);
    for (Eigen::Index i = 0; i < w.samples.size(); ++i)
      w.samples[i] = std::sin(2.0 * std::numbers::pi * f * i / fs_in);
    CaptureSpec cap = quiet_cap(fs_out);
    cap.total_samples = 11000;
    const RealWaveform out = scope_sample(w, cap);
    for (Eigen::Index i = 200; i < 10800; ++i)
      CHECK(out.samples[i] ==
            doctest::Approx(std::sin(2.0 * std::numbers::pi * f * i / fs_out)).epsilon(1e-3));
  }
}

TEST_CASE("bit budget of one capture") {
  CHECK(raw_bits(kCap, kTx) == 367001);
  CHECK(usable_bits(kCap, kTx) == 327670);  // 10 whole PRBS periods

  CaptureSpec four = kCap;
  four.scope_rate = 40e9;
  CHECK(raw_bits(four, kTx) == 734003);
  CHECK(usable_bits(four, kTx) == 688107);  // 21 whole periods

  CaptureSpec tiny = kCap;
  tiny.total_samples = 1000;
  CHECK_THROWS_AS(usable_bits(tiny, kTx), std::invalid_argument);
}

TEST_CASE("loopback: modulate, capture, synchronize, count") {
  const auto pattern = prbs15(1);
  const long period = 32767;
  const long usable = usable_bits(kCap, kTx);
  const long n_bits = raw_bits(kCap, kTx) / period + 2;  // cover the capture
  std::vector<std::uint8_t> bits(n_bits * period);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = pattern[i % period];

  const Waveform tx_wave = ook_modulate(bits, kTx);

  SUBCASE("noiseless direct path decodes error-free") {
    const RealWaveform det = photodetect(tx_wave, quiet_cap(), 1);
    const RealWaveform capture = scope_sample(det, kCap);
    const SyncResult sync = resample_sync(capture, kTx, kCap, pattern);
    CHECK_FALSE(sync.inverted);
    CHECK(sync.correlation > 0.9);
    CHECK(sync.soft.size() == usable);
    CHECK(sync.bit_offset == sync.start_bit % period);

    std::vector<std::uint8_t> ref(usable);
    for (long i = 0; i < usable; ++i) ref[i] = pattern[(sync.bit_offset + i) % period];
    const SequenceReport rep = decide_and_count(sync.soft, ref, 0);
    CHECK(rep.bits_compared == usable);
    CHECK(rep.error_count == 0);
    CHECK(rep.ber == 0.0);
  }

  SUBCASE("receiver noise at the default level stays error-free") {
    const RealWaveform det = photodetect(tx_wave, kCap, 1);
    const RealWaveform capture = scope_sample(det, kCap);
    const SyncResult sync = resample_sync(capture, kTx, kCap, pattern);
    std::vector<std::uint8_t> ref(usable);
    for (long i = 0; i < usable; ++i) ref[i] = pattern[(sync.bit_offset + i) % period];
    CHECK(decide_and_count(sync.soft, ref, 0).error_count == 0);
  }

  SUBCASE("a known injected delay shows up in the recovered PRBS phase") {
    const auto ports = decorrelate_ports(tx_wave, kTx);
    const int port = 1;  // 1021-bit circular delay
    const RealWaveform det = photodetect(ports[port], quiet_cap(), 1);
    const RealWaveform capture = scope_sample(det, kCap);
    const SyncResult sync = resample_sync(capture, kTx, kCap, pattern);
    const long expect =
        ((sync.start_bit - kTx.port_delay_bits[port]) % period + period) % period;
    CHECK(sync.bit_offset == expect);
  }

  SUBCASE("inverted data is flagged") {
    std::vector<std::uint8_t> flipped(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) flipped[i] = 1 - bits[i];
    const RealWaveform det = photodetect(ook_modulate(flipped, kTx), quiet_cap(), 1);
    const SyncResult sync = resample_sync(scope_sample(det, kCap), kTx, kCap, pattern);
    CHECK(sync.inverted);
  }

  SUBCASE("unsyncable input throws") {
    RealWaveform flat;
    flat.rate = 80e9;
    flat.samples = Eigen::VectorXd::Constant(kCap.total_samples, 0.5);
    CHECK_THROWS_AS(resample_sync(flat, kTx, kCap, pattern), SyncError);
  }
}

TEST_CASE("decision and error counting on synthetic soft values") {
  const long n = 10000;
  std::vector<std::uint8_t> ref(n);
  std::mt19937_64 rng(12);
  Eigen::VectorXd soft(n);
  for (long i = 0; i < n; ++i) {
    ref[i] = (rng() >> 40) & 1;
    soft[i] = ref[i] ? 1.0 : 0.05;
  }

  SequenceReport clean = decide_and_count(soft, ref, 3);
  CHECK(clean.sequence_index == 3);
  CHECK(clean.error_count == 0);

  // flip a handful of decisions past the threshold
  const std::vector<long> flips = {17, 200, 4096, 9999};
  for (long i : flips) soft[i] = ref[i] ? 0.05 : 1.0;
  SequenceReport dirty = decide_and_count(soft, ref, 4);
  CHECK(dirty.error_count == 4);
  CHECK(dirty.ber == doctest::Approx(4.0 / n));
  REQUIRE(dirty.error_positions.size() == 4);
  for (std::size_t k = 0; k < flips.size(); ++k)
    CHECK(dirty.error_positions[k] == flips[k]);

  CHECK_THROWS_AS(decide_and_count(soft.head(10), ref, 0), std::invalid_argument);
}

TEST_CASE("eye fold covers two unit intervals") {
  const Waveform w = ook_modulate(prbs_sequence(7, 1), kTx);
  RealWaveform det;
  det.rate = w.rate;
  det.samples = w.samples.cwiseAbs2();
  const auto pts = eye_fold(det, kTx, 16);
  REQUIRE(!pts.empty());
  double lo = 1e9, hi = -1e9;
  for (const auto& [phase, amp] : pts) {
    CHECK(phase >= 0.0);
    CHECK(phase < 2.0);
    lo = std::min(lo, amp);
    hi = std::max(hi, amp);
  }
  CHECK(hi > 0.8);   // marks near unit power
  CHECK(lo < 0.15);  // spaces near the extinction floor
}
