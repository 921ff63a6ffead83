#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "mgdm/mode_catalog.hpp"
#include "mgdm/mux_demux.hpp"
#include "mgdm/waveform.hpp"

namespace mgdm {

// Inter-group crosstalk statistics of the fiber plus mux/demux misalignment.
// Coupling is constant within one captured block and drifts between blocks.
struct CrosstalkSpec {
  double xt_db = -15.0;       // mean off-group power per excited group [dB <= 0]
  double drift_sigma = 1e3;   // per-block perturbation scale; large ~ full redraw
  bool random_walk = false;   // correlate blocks as a random walk instead
  std::uint64_t seed = 2;

  void validate() const;
};

// One block-constant fiber realization: unitary N x N mode map and absolute
// per-group delays. Deterministic in (spec.seed, block_index).
struct ChannelRealization {
  int block_index = 0;
  TransferMatrix H;                 // energy-conserving (unitary)
  std::map<int, double> group_delay_s;  // absolute delay per group order [s]
};

ChannelRealization draw_block_channel(const CrosstalkSpec& spec, const FiberSpec& fiber,
                                      const ModeBasis& basis, int block_index);

// Per-group fractional delay (frequency domain, circular) followed by the
// sample-wise mode mixing H. One waveform per basis mode, common rate.
std::vector<Waveform> propagate(const std::vector<Waveform>& modes,
                                const ChannelRealization& real, const ModeBasis& basis);

// Circular complex Gaussian noise per mode; variance set so mean signal power
// over mean noise power equals 10^(osnr_db/10). osnr_db = +inf is a no-op.
std::vector<Waveform> add_optical_noise(std::vector<Waveform> modes, double osnr_db,
                                        std::uint64_t seed);

}  // namespace mgdm
