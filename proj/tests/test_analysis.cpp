#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mgdm/analysis.hpp"

using namespace mgdm;

namespace {

// closed forms independent of the incomplete-gamma implementation
double sf_even_dof(double x, int dof) {
  // Q(a, x/2) with integer a = dof/2: Poisson tail
  const int a = dof / 2;
  double term = 1.0, sum = 1.0;
  for (int j = 1; j < a; ++j) {
    term *= (x / 2.0) / j;
    sum += term;
  }
  return std::exp(-x / 2.0) * sum;
}

SequenceReport make_report(long bits, std::vector<long> positions, int index = 0) {
  SequenceReport r;
  r.sequence_index = index;
  r.bits_compared = bits;
  r.error_count = static_cast<long>(positions.size());
  std::sort(positions.begin(), positions.end());
  r.error_positions = std::move(positions);
  r.ber = bits ? double(r.error_count) / double(bits) : 0.0;
  return r;
}

}  // namespace

TEST_CASE("chi-square survival function against closed forms") {
  for (int dof : {2, 4, 10, 24})
    for (double x : {0.5, 1.0, 3.0, 9.0, 20.0, 60.0})
      CHECK(chi_square_sf(x, dof) == doctest::Approx(sf_even_dof(x, dof)).epsilon(1e-12));

  // odd dof via the error function
  for (double x : {0.2, 1.0, 4.0, 12.0})
    CHECK(chi_square_sf(x, 1) == doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-12));
  for (double x : {0.2, 1.0, 4.0, 12.0}) {
    const double oracle = std::erfc(std::sqrt(x / 2.0)) +
                          std::sqrt(2.0 * x / std::acos(-1.0)) * std::exp(-x / 2.0);
    CHECK(chi_square_sf(x, 3) == doctest::Approx(oracle).epsilon(1e-12));
  }

  CHECK(chi_square_sf(0.0, 5) == 1.0);
  CHECK(chi_square_sf(-3.0, 5) == 1.0);
  CHECK(chi_square_sf(1e4, 9) < 1e-300);
  for (double x = 1.0; x < 40.0; x += 1.0)
    CHECK(chi_square_sf(x + 1.0, 7) < chi_square_sf(x, 7));
  CHECK_THROWS_AS(chi_square_sf(1.0, 0), std::invalid_argument);
}

TEST_CASE("uniformity test applicability") {
  CHECK_FALSE(uniformity_test(make_report(1000, {}), 10).applicable);
  CHECK_FALSE(uniformity_test(make_report(1000, {1, 2, 3}), 10).applicable);

  // exactly 5 errors per bin is the applicability floor
  std::vector<long> pos;
  for (long i = 0; i < 50; ++i) pos.push_back(i * 20);
  CHECK(uniformity_test(make_report(1000, pos), 10).applicable);
  pos.pop_back();
  CHECK_FALSE(uniformity_test(make_report(1000, pos), 10).applicable);

  CHECK_THROWS_AS(uniformity_test(make_report(1000, pos), 1), std::invalid_argument);
}

TEST_CASE("uniformity test verdicts") {
  SUBCASE("perfectly even spread scores chi2 = 0") {
    std::vector<long> pos;
    for (long i = 0; i < 100; ++i) pos.push_back(i * 100 + 37);  // 10 per decile
    const UniformityResult r = uniformity_test(make_report(10000, pos), 10);
    REQUIRE(r.applicable);
    CHECK(r.dof == 9);
    CHECK(r.chi2 == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
  }

  SUBCASE("a burst in one decile is rejected decisively") {
    std::vector<long> pos;
    for (long i = 0; i < 100; ++i) pos.push_back(i);  // all in the first decile
    const UniformityResult r = uniformity_test(make_report(10000, pos), 10);
    REQUIRE(r.applicable);
    // n errors all in one of b bins: chi2 = n (b - 1)
    CHECK(r.chi2 == doctest::Approx(900.0));
    CHECK(r.p_value < 1e-12);
  }

  SUBCASE("Monte Carlo null calibration") {
    std::mt19937_64 rng(17);
    const long bits = 32767;
    int pass = 0, trials = 500;
    double p_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      std::uniform_int_distribution<long> u(0, bits - 1);
      std::vector<long> pos(200);
      for (auto& p : pos) p = u(rng);
      const UniformityResult r = uniformity_test(make_report(bits, pos), 10);
      REQUIRE(r.applicable);
      p_sum += r.p_value;
      if (r.p_value > 0.01) ++pass;
    }
    // under the null, p > 0.01 should hold ~99% of the time
    CHECK(double(pass) / trials >= 0.97);
    CHECK(p_sum / trials == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("cross-sequence BER statistics") {
  SUBCASE("weighted average, not mean of per-sequence BERs") {
    std::vector<SequenceReport> reps;
    reps.push_back(make_report(100000, std::vector<long>(3, 0), 0));
    reps.push_back(make_report(50000, std::vector<long>(7, 0), 1));
    std::sort(reps[0].error_positions.begin(), reps[0].error_positions.end());
    const RunStatistics s = ber_stats(reps);
    CHECK(s.total_bits == 150000);
    CHECK(s.total_errors == 10);
    CHECK(s.average_ber == doctest::Approx(10.0 / 150000.0).epsilon(1e-15));
    // naive mean of (3e-5, 1.4e-4) would be 8.5e-5, not 6.67e-5
    CHECK(std::abs(s.average_ber - 0.5 * (3e-5 + 1.4e-4)) > 1e-5);
  }

  SUBCASE("input order does not matter") {
    std::vector<SequenceReport> a, b;
    for (int i = 0; i < 6; ++i)
      a.push_back(make_report(1000, std::vector<long>(i, 0), i));
    b = {a[4], a[0], a[5], a[2], a[1], a[3]};
    const RunStatistics sa = ber_stats(a), sb = ber_stats(b);
    CHECK(sa.ber_trace == sb.ber_trace);
    for (std::size_t i = 0; i < sa.reports.size(); ++i)
      CHECK(sa.reports[i].sequence_index == int(i));
  }

  SUBCASE("histogram binning") {
    std::vector<SequenceReport> reps;
    reps.push_back(make_report(100000, {}, 0));                             // zero bin
    reps.push_back(make_report(100000, {}, 1));                             // zero bin
    reps.push_back(make_report(100000, std::vector<long>(1, 5), 2));        // 1e-5
    reps.push_back(make_report(10, std::vector<long>(5, 1), 3));            // 0.5, clamps high
    reps.push_back(make_report(1000000000, std::vector<long>(1, 9), 4));    // 1e-9, clamps low
    const RunStatistics s = ber_stats(reps);
    REQUIRE(s.histogram.size() == 13);  // zero bin + 2 bins/decade over 6 decades
    CHECK(s.histogram[0].count == 2);
    long total = 0;
    for (const auto& bin : s.histogram) total += bin.count;
    CHECK(total == 5);
    CHECK(s.histogram[1].count == 1);    // clamped from below
    CHECK(s.histogram[12].count == 1);   // clamped from above
    CHECK(s.histogram[7].lo == doctest::Approx(1e-5));
    CHECK(s.histogram[7].count == 1);
    // edges tile [1e-8, 1e-2] without gaps
    for (int i = 1; i < 12; ++i)
      CHECK(s.histogram[i].hi == doctest::Approx(s.histogram[i + 1].lo));
  }

  CHECK_THROWS_AS(ber_stats({}), std::invalid_argument);
}
