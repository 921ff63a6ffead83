#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mgdm/mode_catalog.hpp"

namespace mgdm {

// Spatial multiplexer / de-multiplexer model: one SMF port per mode group,
// finite suppression of unwanted-mode leakage, per-port insertion loss.
struct MuxSpec {
  std::vector<LpMode> ports;          // target mode per port, distinct groups
  double selectivity_db = 20.0;       // leakage suppression; may be +inf
  double insertion_loss_db = 5.0;
  std::uint64_t seed = 1;             // leakage-phase randomization

  void validate() const;
};

// Complex linear map with labeled ends. Passive: largest singular value <= 1.
struct TransferMatrix {
  Eigen::MatrixXcd m;
  std::vector<std::string> in_labels;
  std::vector<std::string> out_labels;
};

using ModeVector = Eigen::VectorXcd;

// Port -> mode map (N x P). Column i carries amplitude 10^(-IL/20) on its
// target mode and seeded-phase leakage on every other basis mode.
TransferMatrix build_mux(const MuxSpec& spec, const ModeBasis& basis);

// Mode -> port map: conjugate transpose of the mux built from the same spec.
// Each port projects the fiber mode vector onto its selected mode (the SMF
// modal filter), plus leakage terms.
TransferMatrix build_demux(const MuxSpec& spec, const ModeBasis& basis);

Eigen::VectorXcd apply_transfer(const TransferMatrix& t, const Eigen::VectorXcd& v);

}  // namespace mgdm
