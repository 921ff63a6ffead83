#include "mgdm/runner.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mgdm/rng.hpp"

namespace mgdm {

namespace {

constexpr std::uint32_t kPatternSeed = 0x7A21;  // pattern-generator LFSR state
constexpr int kUniformityBins = 10;

// seed streams local to the runner
constexpr std::uint64_t kChanSingle = 0xC0, kChanFour = 0xC1;
constexpr std::uint64_t kOptNoise = 0xA0, kElecNoise = 0xE0;

struct Resolved {
  RunConfig cfg;
  ModeBasis basis;
  TransferMatrix mux;
  TransferMatrix demux;
  std::vector<std::uint8_t> prbs;
  long period = 0;
  long raw = 0;
  long usable = 0;
  long periods = 0;           // simulated PRBS periods per sequence
  double tx_mean_power = 0.0; // receiver leveling target
  std::array<Waveform, 4> port_waves;
};

Resolved resolve(const RunConfig& input, bool four_channel) {
  RunConfig c = input;
  c.validate();
  if (c.capture.scope_rate == 0.0) c.capture.scope_rate = four_channel ? 40e9 : 80e9;
  if (c.sequences == 0) c.sequences = four_channel ? 30 : 20;
  if (c.mux.ports.empty())
    for (int m : c.channels) c.mux.ports.push_back(default_port_mode(m));
  c.capture.validate();

  Resolved r;
  r.cfg = c;
  r.basis = ModeBasis::make(c.fiber, c.channels);
  r.mux = build_mux(c.mux, r.basis);
  MuxSpec demux_spec = c.mux;
  demux_spec.seed = derive_seed(c.mux.seed, {stream::kDemuxLeakage});
  r.demux = build_demux(demux_spec, r.basis);

  r.prbs = prbs_sequence(c.tx.prbs_order, kPatternSeed);
  r.period = c.tx.prbs_period();
  r.raw = raw_bits(c.capture, c.tx);
  r.usable = usable_bits(c.capture, c.tx);
  r.periods = (r.raw + 2 + r.period - 1) / r.period;

  std::vector<std::uint8_t> data;
  data.reserve(r.periods * r.period);
  for (long p = 0; p < r.periods; ++p) data.insert(data.end(), r.prbs.begin(), r.prbs.end());
  const Waveform tx_wave = ook_modulate(data, c.tx);
  r.tx_mean_power = tx_wave.samples.squaredNorm() / double(tx_wave.samples.size());
  r.port_waves = decorrelate_ports(tx_wave, c.tx);
  return r;
}

struct SeqOutcome {
  SequenceReport report;
  double q = 0.0;
};

// receiver chain for one demux port: EDFA leveling, photodiode, scope,
// re-sampling/synchronization, decisions
SeqOutcome process_port(Eigen::VectorXcd port_field, const Resolved& r, int seq,
                        std::uint64_t pd_seed) {
  const double power = port_field.squaredNorm() / double(port_field.size());
  if (power > 0.0) port_field *= std::sqrt(r.tx_mean_power / power);

  const Waveform w{std::move(port_field), r.cfg.tx.bit_rate * r.cfg.tx.samples_per_bit};
  const RealWaveform elec = photodetect(w, r.cfg.capture, pd_seed);
  const RealWaveform capt = scope_sample(elec, r.cfg.capture);
  const SyncResult sync = resample_sync(capt, r.cfg.tx, r.cfg.capture, r.prbs);

  std::vector<std::uint8_t> ref(sync.soft.size());
  for (Eigen::Index i = 0; i < sync.soft.size(); ++i) {
    const std::uint8_t bit = r.prbs[(sync.bit_offset + i) % r.period];
    ref[i] = sync.inverted ? (1 - bit) : bit;
  }

  SeqOutcome out;
  out.report = decide_and_count(sync.soft, ref, seq);

  // genie-aided Q estimate from the reference split
  double s1 = 0, s0 = 0, ss1 = 0, ss0 = 0;
  long c1 = 0, c0 = 0;
  for (Eigen::Index i = 0; i < sync.soft.size(); ++i) {
    if (ref[i]) { s1 += sync.soft[i]; ss1 += sync.soft[i] * sync.soft[i]; ++c1; }
    else { s0 += sync.soft[i]; ss0 += sync.soft[i] * sync.soft[i]; ++c0; }
  }
  if (c1 > 1 && c0 > 1) {
    const double m1 = s1 / c1, m0 = s0 / c0;
    const double sd1 = std::sqrt(std::max(0.0, ss1 / c1 - m1 * m1));
    const double sd0 = std::sqrt(std::max(0.0, ss0 / c0 - m0 * m0));
    if (sd1 + sd0 > 0) out.q = (m1 - m0) / (sd1 + sd0);
  }
  return out;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0)
    workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 2u));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ChannelRunResult finalize_channel(int group, std::vector<SeqOutcome> outcomes) {
  ChannelRunResult res;
  res.group = group;
  std::vector<SequenceReport> reports;
  for (auto& o : outcomes) {
    reports.push_back(std::move(o.report));
    res.q_estimates.push_back(o.q);
  }
  res.stats = ber_stats(std::move(reports));
  std::vector<double> qs = res.q_estimates;
  std::sort(qs.begin(), qs.end());
  if (!qs.empty()) res.median_q = qs[qs.size() / 2];
  return res;
}

// one single-channel block: the chosen group's transmitter alone
SeqOutcome run_single_sequence(const Resolved& r, int channel_idx, int seq,
                               RealWaveform* capture_out) {
  const RunConfig& c = r.cfg;
  const int group = c.channels[channel_idx];
  const int n = r.basis.size();
  const double rate = c.tx.bit_rate * c.tx.samples_per_bit;

  std::vector<Waveform> mode_in(n);
  for (int k = 0; k < n; ++k) {
    mode_in[k].rate = rate;
    if (r.mux.m(k, channel_idx) != std::complex<double>(0.0))
      mode_in[k].samples = r.mux.m(k, channel_idx) * r.port_waves[channel_idx % 4].samples;
    else
      mode_in[k].samples = Eigen::VectorXcd::Zero(r.port_waves[channel_idx % 4].samples.size());
  }

  CrosstalkSpec chan_spec = c.crosstalk;
  chan_spec.seed = derive_seed(c.crosstalk.seed, {kChanSingle, std::uint64_t(group)});
  const ChannelRealization chan = draw_block_channel(chan_spec, c.fiber, r.basis, seq);

  std::vector<Waveform> mode_out = propagate(mode_in, chan, r.basis);
  mode_in.clear();
  mode_out = add_optical_noise(std::move(mode_out), c.osnr_db,
                               derive_seed(c.master_seed, {kOptNoise, std::uint64_t(group),
                                                           std::uint64_t(seq)}));

  Eigen::VectorXcd port = Eigen::VectorXcd::Zero(mode_out[0].samples.size());
  for (int k = 0; k < n; ++k)
    if (r.demux.m(channel_idx, k) != std::complex<double>(0.0))
      port += r.demux.m(channel_idx, k) * mode_out[k].samples;
  mode_out.clear();

  const std::uint64_t pd_seed =
      derive_seed(c.master_seed, {kElecNoise, std::uint64_t(group), std::uint64_t(seq)});
  if (capture_out) {
    Eigen::VectorXcd port_copy = port;
    const double power = port_copy.squaredNorm() / double(port_copy.size());
    if (power > 0.0) port_copy *= std::sqrt(r.tx_mean_power / power);
    const Waveform w{std::move(port_copy), rate};
    *capture_out = scope_sample(photodetect(w, c.capture, pd_seed), c.capture);
  }
  return process_port(std::move(port), r, seq, pd_seed);
}

// one four-channel block: all transmitters simultaneously, one fiber draw
std::vector<SeqOutcome> run_four_sequence(const Resolved& r, int seq) {
  const RunConfig& c = r.cfg;
  const int n = r.basis.size();
  const int n_ch = static_cast<int>(c.channels.size());
  const double rate = c.tx.bit_rate * c.tx.samples_per_bit;
  const Eigen::Index len = r.port_waves[0].samples.size();

  std::vector<Waveform> mode_in(n);
  for (int k = 0; k < n; ++k) {
    mode_in[k].rate = rate;
    mode_in[k].samples = Eigen::VectorXcd::Zero(len);
    for (int p = 0; p < n_ch; ++p)
      if (r.mux.m(k, p) != std::complex<double>(0.0))
        mode_in[k].samples += r.mux.m(k, p) * r.port_waves[p % 4].samples;
  }

  CrosstalkSpec chan_spec = c.crosstalk;
  chan_spec.seed = derive_seed(c.crosstalk.seed, {kChanFour});
  const ChannelRealization chan = draw_block_channel(chan_spec, c.fiber, r.basis, seq);

  std::vector<Waveform> mode_out = propagate(mode_in, chan, r.basis);
  mode_in.clear();
  mode_out = add_optical_noise(std::move(mode_out), c.osnr_db,
                               derive_seed(c.master_seed, {kOptNoise, std::uint64_t(seq)}));

  std::vector<SeqOutcome> outcomes(n_ch);
  for (int p = 0; p < n_ch; ++p) {
    Eigen::VectorXcd port = Eigen::VectorXcd::Zero(len);
    for (int k = 0; k < n; ++k)
      if (r.demux.m(p, k) != std::complex<double>(0.0))
        port += r.demux.m(p, k) * mode_out[k].samples;
    const std::uint64_t pd_seed = derive_seed(
        c.master_seed, {kElecNoise, std::uint64_t(c.channels[p]), std::uint64_t(seq)});
    outcomes[p] = process_port(std::move(port), r, seq, pd_seed);
  }
  return outcomes;
}

}  // namespace

RunResult run_single_channel(const RunConfig& config, int workers) {
  const Resolved r = resolve(config, /*four_channel=*/false);
  RunResult result;
  result.resolved = r.cfg;
  for (std::size_t ci = 0; ci < r.cfg.channels.size(); ++ci) {
    std::vector<SeqOutcome> outcomes(r.cfg.sequences);
    parallel_for(r.cfg.sequences, workers, [&](int seq) {
      outcomes[seq] = run_single_sequence(r, static_cast<int>(ci), seq, nullptr);
    });
    result.channels.push_back(finalize_channel(r.cfg.channels[ci], std::move(outcomes)));
  }
  return result;
}

RunResult run_four_channel(const RunConfig& config, int workers) {
  const Resolved r = resolve(config, /*four_channel=*/true);
  const int n_ch = static_cast<int>(r.cfg.channels.size());
  std::vector<std::vector<SeqOutcome>> by_seq(r.cfg.sequences);
  parallel_for(r.cfg.sequences, workers, [&](int seq) { by_seq[seq] = run_four_sequence(r, seq); });

  RunResult result;
  result.resolved = r.cfg;
  for (int p = 0; p < n_ch; ++p) {
    std::vector<SeqOutcome> outcomes;
    for (auto& seq_outcomes : by_seq) outcomes.push_back(seq_outcomes[p]);
    result.channels.push_back(finalize_channel(r.cfg.channels[p], std::move(outcomes)));
  }
  return result;
}

std::vector<SweepPoint> sweep_crosstalk(const RunConfig& config,
                                        const std::vector<double>& xt_grid_db, int workers) {
  if (xt_grid_db.empty()) throw ConfigError("sweep: crosstalk grid must be nonempty");
  std::vector<SweepPoint> points;
  for (double xt : xt_grid_db) {
    RunConfig c = config;
    c.crosstalk.xt_db = xt;
    std::uint64_t bits;
    std::memcpy(&bits, &xt, sizeof(bits));
    c.crosstalk.seed = derive_seed(config.crosstalk.seed, {bits});
    const RunResult res = run_four_channel(c, workers);
    for (const ChannelRunResult& ch : res.channels)
      points.push_back({xt, ch.group, ch.stats.average_ber});
  }
  return points;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

void write_outputs(const RunResult& result, const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);

  {
    std::ofstream seq(outdir / "sequences.csv");
    seq << "channel,sequence_index,bits,errors,ber,uniformity_p\n";
    for (const ChannelRunResult& ch : result.channels) {
      for (const SequenceReport& rep : ch.stats.reports) {
        const UniformityResult u = uniformity_test(rep, kUniformityBins);
        seq << ch.group << ',' << rep.sequence_index << ',' << rep.bits_compared << ','
            << rep.error_count << ',' << fmt("%.6e", rep.ber) << ','
            << (u.applicable ? fmt("%.4e", u.p_value) : std::string("na")) << '\n';
      }
    }
  }

  {
    std::ofstream hist(outdir / "histogram.csv");
    hist << "channel,bin_low,bin_high,count\n";
    for (const ChannelRunResult& ch : result.channels)
      for (const HistogramBin& b : ch.stats.histogram)
        hist << ch.group << ',' << fmt("%.6e", b.lo) << ',' << fmt("%.6e", b.hi) << ','
             << b.count << '\n';
  }

  {
    nlohmann::json j;
    const FecSpec& fec = result.resolved.fec;
    j["fec"] = {{"n", fec.n}, {"k", fec.k}, {"b", fec.b}, {"t", fec.t()},
                {"overhead", overhead(fec)}};
    j["net_bit_rate"] = net_bit_rate(static_cast<int>(result.channels.size()),
                                     result.resolved.tx.bit_rate, overhead(fec));
    for (const ChannelRunResult& ch : result.channels) {
      double max_ber = 0.0;
      for (const SequenceReport& rep : ch.stats.reports) max_ber = std::max(max_ber, rep.ber);
      const double bound = post_fec_bound(std::min(0.5, max_ber), fec);
      j["channels"][std::to_string(ch.group)] = {
          {"average_ber", ch.stats.average_ber},
          {"total_bits", ch.stats.total_bits},
          {"total_errors", ch.stats.total_errors},
          {"max_sequence_ber", max_ber},
          {"median_q", ch.median_q},
          {"post_fec_bound", bound},
          {"fec_pass", bound < 1e-12},
      };
    }
    std::ofstream out(outdir / "summary.json");
    out << j.dump(2) << '\n';
  }
}

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::filesystem::path& file) {
  std::ofstream out(file);
  out << "xt_db,channel,average_ber\n";
  for (const SweepPoint& p : points)
    out << fmt("%.6g", p.xt_db) << ',' << p.group << ',' << fmt("%.6e", p.average_ber) << '\n';
}

void write_eye_csv(const RunConfig& config, int group, const std::filesystem::path& file) {
  const Resolved r = resolve(config, /*four_channel=*/false);
  const auto it = std::find(r.cfg.channels.begin(), r.cfg.channels.end(), group);
  if (it == r.cfg.channels.end())
    throw ConfigError("eye: group " + std::to_string(group) + " is not among the channels");
  const int idx = static_cast<int>(it - r.cfg.channels.begin());

  RealWaveform capture;
  run_single_sequence(r, idx, 0, &capture);
  const auto pts = eye_fold(capture, r.cfg.tx);
  std::ofstream out(file);
  out << "phase_in_bits,amplitude\n";
  for (const auto& [phase, amp] : pts)
    out << fmt("%.6f", phase) << ',' << fmt("%.8e", amp) << '\n';
}

void save_capture(const std::filesystem::path& file, const RealWaveform& w, std::uint64_t seed) {
  nlohmann::json header = {{"rate", w.rate}, {"length", w.samples.size()}, {"seed", seed}};
  std::ofstream out(file, std::ios::binary);
  out << header.dump() << '\n';
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    const float v = static_cast<float>(w.samples[i]);
    static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
}

RealWaveform load_capture(const std::filesystem::path& file, std::uint64_t* seed) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open capture file: " + file.string());
  std::string line;
  std::getline(in, line);
  const nlohmann::json header = nlohmann::json::parse(line);
  RealWaveform w;
  w.rate = header.at("rate").get<double>();
  const auto length = header.at("length").get<Eigen::Index>();
  if (seed) *seed = header.at("seed").get<std::uint64_t>();
  w.samples.resize(length);
  for (Eigen::Index i = 0; i < length; ++i) {
    float v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    w.samples[i] = v;
  }
  if (!in) throw std::runtime_error("truncated capture file: " + file.string());
  return w;
}

std::string format_mode_table(const FiberSpec& fiber, const std::vector<int>& orders) {
  std::ostringstream out;
  out << "group,mode,beta_rad_per_m,delay_ns_per_km\n";
  for (int m : orders) {
    const ModeGroup g = enumerate_group(m);
    for (const LpMode& mode : g.members) {
      out << m << ',' << to_string(mode) << ','
          << fmt("%.6f", propagation_constant(mode, fiber)) << ','
          << fmt("%.9f", group_delay(m, fiber) * 1e3 * 1e9) << '\n';
    }
  }
  return out.str();
}

}  // namespace mgdm
