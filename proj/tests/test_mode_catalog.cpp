#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "mgdm/mode_catalog.hpp"

using namespace mgdm;

namespace {
const FiberSpec kFiber{};  // defaults: a=25um, n1=1.47, delta=0.01, 1550nm
}

TEST_CASE("group order formula") {
  CHECK(group_order(0, 2) == 5);  // LP02 sits in MG5
  CHECK(group_order(2, 1) == 5);  // LP21 as well
  CHECK(group_order(0, 1) == 3);
  CHECK_THROWS_AS(group_order(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(group_order(-1, 1), std::invalid_argument);
}

TEST_CASE("group enumeration") {
  const ModeGroup mg5 = enumerate_group(5);
  REQUIRE(mg5.members.size() == 3);
  CHECK(to_string(mg5.members[0]) == "LP02");
  CHECK(to_string(mg5.members[1]) == "LP21a");
  CHECK(to_string(mg5.members[2]) == "LP21b");

  const ModeGroup mg3 = enumerate_group(3);
  REQUIRE(mg3.members.size() == 1);
  CHECK(to_string(mg3.members[0]) == "LP01");

  const ModeGroup mg6 = enumerate_group(6);
  REQUIRE(mg6.members.size() == 4);
  CHECK(to_string(mg6.members[0]) == "LP12a");
  CHECK(to_string(mg6.members[1]) == "LP12b");
  CHECK(to_string(mg6.members[2]) == "LP31a");
  CHECK(to_string(mg6.members[3]) == "LP31b");

  CHECK_THROWS_AS(enumerate_group(2), std::invalid_argument);
}

TEST_CASE("group size is m - 2 for m in 3..12") {
  for (int m = 3; m <= 12; ++m)
    CHECK(enumerate_group(m).members.size() == static_cast<std::size_t>(m - 2));
}

TEST_CASE("mode name round trip") {
  for (int m = 3; m <= 8; ++m)
    for (const LpMode& mode : enumerate_group(m).members)
      CHECK(parse_mode(to_string(mode)) == mode);
  CHECK_THROWS_AS(parse_mode("LP00"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mode("LP01b"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mode("xyz"), std::invalid_argument);
}

TEST_CASE("propagation constant") {
  // independent high-precision evaluation of the closed form
  CHECK(propagation_constant(3, kFiber) == doctest::Approx(5953232.3301058454).epsilon(1e-12));
  CHECK(propagation_constant(6, kFiber) == doctest::Approx(5936221.3300523211).epsilon(1e-12));

  const double n1k = kFiber.n1 * 2.0 * std::numbers::pi / kFiber.lambda;
  for (int m = 3; m <= 8; ++m) CHECK(propagation_constant(m, kFiber) < n1k);

  // all members of one group share the identical value, bit for bit
  const double b_lp02 = propagation_constant(parse_mode("LP02"), kFiber);
  const double b_lp21a = propagation_constant(parse_mode("LP21a"), kFiber);
  CHECK(b_lp02 == b_lp21a);

  FiberSpec step = kFiber;
  step.alpha = 1.8;
  CHECK_THROWS_AS(propagation_constant(3, step), std::invalid_argument);

  FiberSpec tiny = kFiber;
  tiny.a = 0.5e-6;  // not guided for high orders
  CHECK_THROWS_AS(propagation_constant(20, tiny), std::domain_error);
}

TEST_CASE("beta-squared spacing is constant in m") {
  const double expected = 67417165616.44179;  // 2 n1 k sqrt(2 delta) / a
  for (int m = 3; m <= 10; ++m) {
    const double b0 = propagation_constant(m, kFiber);
    const double b1 = propagation_constant(m + 1, kFiber);
    CHECK(b0 * b0 - b1 * b1 == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("group delay") {
  // finite-difference oracle on beta(omega)
  const double omega0 = 2.0 * std::numbers::pi * kSpeedOfLight / kFiber.lambda;
  for (int m = 3; m <= 6; ++m) {
    const double h = omega0 * 1e-6;
    FiberSpec up = kFiber, dn = kFiber;
    up.lambda = 2.0 * std::numbers::pi * kSpeedOfLight / (omega0 + h);
    dn.lambda = 2.0 * std::numbers::pi * kSpeedOfLight / (omega0 - h);
    const double fd = (propagation_constant(m, up) - propagation_constant(m, dn)) / (2.0 * h);
    CHECK(group_delay(m, kFiber) == doctest::Approx(fd).epsilon(1e-6));
  }

  // monotone in m; equal within one group
  CHECK(group_delay(3, kFiber) < group_delay(6, kFiber));
  CHECK(group_delay(3, kFiber) == doctest::Approx(4.9033944130725071e-9).epsilon(1e-12));
  CHECK(group_delay(group_order(parse_mode("LP02")), kFiber) ==
        group_delay(group_order(parse_mode("LP21b")), kFiber));
}

TEST_CASE("mode fields") {
  const LpMode lp01 = parse_mode("LP01");
  CHECK(mode_field(lp01, kFiber, 0.0, 0.0) > 0.0);
  // on-axis maximum of |psi| for the fundamental
  for (double r : {1e-6, 3e-6, 10e-6})
    CHECK(std::abs(mode_field(lp01, kFiber, r, 0.3)) < mode_field(lp01, kFiber, 0.0, 0.0));

  for (const char* name : {"LP11a", "LP21b", "LP31a"})
    CHECK(mode_field(parse_mode(name), kFiber, 0.0, 0.7) == 0.0);
}

TEST_CASE("quadrature normalization and orthogonality") {
  const PolarGrid grid = PolarGrid::make(kFiber);
  const Eigen::MatrixXcd f01 = sample_mode(parse_mode("LP01"), kFiber, grid).cast<std::complex<double>>();
  const Eigen::MatrixXcd f11 = sample_mode(parse_mode("LP11a"), kFiber, grid).cast<std::complex<double>>();

  CHECK(std::abs(overlap(f01, f01, grid) - 1.0) < 1e-6);
  CHECK(std::abs(overlap(f01, f11, grid)) < 1e-6);
  // conjugate symmetry
  CHECK(std::abs(overlap(f01, f11, grid) - std::conj(overlap(f11, f01, grid))) < 1e-12);

  const PolarGrid other = PolarGrid::make(kFiber, 64, 128);
  const Eigen::MatrixXcd g01 = sample_mode(parse_mode("LP01"), kFiber, other).cast<std::complex<double>>();
  CHECK_THROWS_AS(overlap(f01, g01, grid), std::invalid_argument);
}

TEST_CASE("Gram matrix of the MG3..MG6 basis is the identity") {
  const ModeBasis basis = ModeBasis::make(kFiber, {3, 4, 5, 6});
  REQUIRE(basis.size() == 10);
  const PolarGrid grid = PolarGrid::make(kFiber);
  std::vector<Eigen::MatrixXcd> fields;
  for (const LpMode& mode : basis.modes)
    fields.push_back(sample_mode(mode, kFiber, grid).cast<std::complex<double>>());
  double max_dev = 0.0;
  for (int i = 0; i < basis.size(); ++i)
    for (int j = 0; j < basis.size(); ++j) {
      const std::complex<double> o = overlap(fields[i], fields[j], grid);
      max_dev = std::max(max_dev, std::abs(o - (i == j ? 1.0 : 0.0)));
    }
  CHECK(max_dev < 1e-6);
}

TEST_CASE("mode basis indexing is a bijection") {
  const ModeBasis basis = ModeBasis::make(kFiber, {3, 4, 5, 6});
  for (int i = 0; i < basis.size(); ++i) CHECK(basis.index_of(basis.modes[i]) == i);
  CHECK(basis.index_of(parse_mode("LP41a")) == -1);
  CHECK_THROWS_AS(ModeBasis::make(kFiber, {3, 3}), std::invalid_argument);
}

TEST_CASE("fiber validation") {
  FiberSpec bad = kFiber;
  bad.delta = 0.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = kFiber;
  bad.a = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
