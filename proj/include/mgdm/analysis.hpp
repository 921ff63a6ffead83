#pragma once

#include <vector>

#include "mgdm/transceiver.hpp"

namespace mgdm {

// Survival function of the chi-square distribution with `dof` degrees of
// freedom (regularized upper incomplete gamma).
double chi_square_sf(double x, int dof);

struct UniformityResult {
  bool applicable = false;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson chi-square test of the error positions against a uniform spread
// over `bins` equal intervals of the sequence. Not applicable below
// 5 expected errors per bin.
UniformityResult uniformity_test(const SequenceReport& report, int bins);

struct HistogramBin {
  double lo = 0.0;  // lo == hi == 0 marks the dedicated zero-error bin
  double hi = 0.0;
  int count = 0;
};

// Cross-sequence statistics for one channel.
struct RunStatistics {
  std::vector<SequenceReport> reports;    // ordered by sequence_index
  std::vector<double> ber_trace;
  std::vector<HistogramBin> histogram;    // log-spaced over [1e-8, 1e-2] + zero bin
  long total_bits = 0;
  long total_errors = 0;
  double average_ber = 0.0;               // total errors / total bits (weighted)
};

RunStatistics ber_stats(std::vector<SequenceReport> reports);

}  // namespace mgdm
