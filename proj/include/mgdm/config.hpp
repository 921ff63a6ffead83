#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgdm/channel.hpp"
#include "mgdm/fec_budget.hpp"
#include "mgdm/mode_catalog.hpp"
#include "mgdm/mux_demux.hpp"
#include "mgdm/transceiver.hpp"

namespace mgdm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Whole-run configuration; mirrored one-to-one by the JSON run-config schema.
// scope_rate = 0 and sequences = 0 mean "per-experiment default" (80 GSa/s /
// 20 sequences single-channel, 40 GSa/s / 30 sequences four-channel).
// An empty mux.ports list selects the default mode per chosen group.
struct RunConfig {
  FiberSpec fiber;
  MuxSpec mux;
  CrosstalkSpec crosstalk;
  TxSpec tx;
  CaptureSpec capture;
  FecSpec fec;
  std::vector<int> channels = {3, 4, 5, 6};
  int sequences = 0;
  std::uint64_t master_seed = 1;
  double osnr_db = std::numeric_limits<double>::infinity();

  RunConfig() { capture.scope_rate = 0.0; }

  void validate() const;  // throws ConfigError naming the offending field
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& file);
std::string serialize_config(const RunConfig& config);

// Default demux/mux mode selection per group ("the strongest mode").
LpMode default_port_mode(int group_order);

}  // namespace mgdm
