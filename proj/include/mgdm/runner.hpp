#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mgdm/analysis.hpp"
#include "mgdm/config.hpp"

namespace mgdm {

struct ChannelRunResult {
  int group = 0;
  RunStatistics stats;
  std::vector<double> q_estimates;  // per sequence, ordered by sequence_index
  double median_q = 0.0;
};

struct RunResult {
  RunConfig resolved;  // config with per-experiment defaults filled in
  std::vector<ChannelRunResult> channels;
};

// Experiment 1: one transmitter at a time, each chosen group in turn,
// scope at 80 GSa/s unless overridden.
RunResult run_single_channel(const RunConfig& config, int workers = 0);

// Experiment 2: all transmitters simultaneously over independently drawn
// channel blocks, scope at 40 GSa/s unless overridden.
RunResult run_four_channel(const RunConfig& config, int workers = 0);

// Per-grid-point four-channel runs with seeds derived from the crosstalk
// value, so nested grids agree on shared points.
struct SweepPoint {
  double xt_db = 0.0;
  int group = 0;
  double average_ber = 0.0;
};
std::vector<SweepPoint> sweep_crosstalk(const RunConfig& config,
                                        const std::vector<double>& xt_grid_db,
                                        int workers = 0);

// Output files: sequences.csv, histogram.csv, summary.json. Byte-identical
// for identical configs regardless of worker count.
void write_outputs(const RunResult& result, const std::filesystem::path& outdir);
void write_sweep_csv(const std::vector<SweepPoint>& points, const std::filesystem::path& file);

// Eye-diagram CSV (phase_in_bits, amplitude) for one single-channel sequence
// of the given group.
void write_eye_csv(const RunConfig& config, int group, const std::filesystem::path& file);

// Capture block storage: one-line JSON header (rate, length, seed) followed
// by little-endian float32 samples.
void save_capture(const std::filesystem::path& file, const RealWaveform& w, std::uint64_t seed);
RealWaveform load_capture(const std::filesystem::path& file, std::uint64_t* seed = nullptr);

// Mode table for the `modes` subcommand: group order, mode, beta, delay/km.
std::string format_mode_table(const FiberSpec& fiber, const std::vector<int>& orders);

}  // namespace mgdm
