#include "mgdm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgdm {

namespace {

// Regularized incomplete gamma functions, series / continued fraction split.
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum, ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_sf(double x, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_sf: dof must be positive");
  if (x <= 0.0) return 1.0;
  const double a = 0.5 * dof, hx = 0.5 * x;
  return (hx < a + 1.0) ? 1.0 - gamma_p_series(a, hx) : gamma_q_contfrac(a, hx);
}

UniformityResult uniformity_test(const SequenceReport& report, int bins) {
  if (bins < 2) throw std::invalid_argument("uniformity_test: need at least 2 bins");
  UniformityResult res;
  if (report.error_count < 5L * bins) return res;  // not applicable

  std::vector<long> counts(bins, 0);
  for (long pos : report.error_positions) {
    auto b = static_cast<int>(double(pos) * bins / double(report.bits_compared));
    counts[std::clamp(b, 0, bins - 1)]++;
  }
  const double expected = double(report.error_count) / bins;
  double chi2 = 0.0;
  for (long c : counts) chi2 += (c - expected) * (c - expected) / expected;

  res.applicable = true;
  res.chi2 = chi2;
  res.dof = bins - 1;
  res.p_value = chi_square_sf(chi2, bins - 1);
  return res;
}

RunStatistics ber_stats(std::vector<SequenceReport> reports) {
  if (reports.empty()) throw std::invalid_argument("ber_stats: empty input");
  std::sort(reports.begin(), reports.end(),
            [](const SequenceReport& a, const SequenceReport& b) {
              return a.sequence_index < b.sequence_index;
            });

  RunStatistics stats;
  for (const SequenceReport& r : reports) {
    stats.ber_trace.push_back(r.ber);
    stats.total_bits += r.bits_compared;
    stats.total_errors += r.error_count;
  }
  stats.average_ber = stats.total_bits ? double(stats.total_errors) / double(stats.total_bits) : 0.0;

  // zero-error bin plus two log-spaced bins per decade over [1e-8, 1e-2];
  // out-of-range nonzero BERs are clamped into the edge bins
  constexpr double kLo = 1e-8, kHi = 1e-2;
  constexpr int kBins = 12;
  stats.histogram.push_back({0.0, 0.0, 0});
  for (int i = 0; i < kBins; ++i) {
    const double lo = kLo * std::pow(kHi / kLo, double(i) / kBins);
    const double hi = kLo * std::pow(kHi / kLo, double(i + 1) / kBins);
    stats.histogram.push_back({lo, hi, 0});
  }
  for (const SequenceReport& r : reports) {
    if (r.error_count == 0) {
      stats.histogram[0].count++;
      continue;
    }
    const double b = std::clamp(r.ber, kLo, std::nextafter(kHi, 0.0));
    auto idx = 1 + static_cast<int>(std::floor(std::log(b / kLo) / std::log(kHi / kLo) * kBins));
    stats.histogram[std::clamp<int>(idx, 1, kBins)].count++;
  }

  stats.reports = std::move(reports);
  return stats;
}

}  // namespace mgdm
