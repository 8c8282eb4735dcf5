#include <doctest.h>

#include <cmath>
#include <sstream>

#include "twolaw/bounds.hpp"
#include "twolaw/errors.hpp"

using namespace twolaw;

TEST_CASE("thermal wavelength and its inversion") {
  // Neutron with lambda0 = 243 angstrom implies T0 ~ 7.07e-26 J.
  const double t0 = t0_from_lambda0(si::kNeutronMass, 2.43e-8);
  CHECK(t0 == doctest::Approx(7.07e-26).epsilon(0.005));
  CHECK(lambda0(si::kNeutronMass, t0) == doctest::Approx(2.43e-8).epsilon(1e-12));

  // Nanogram at 1 micron: the formula gives ~7e-44 J.
  CHECK(t0_from_lambda0(1e-12, 1e-6) == doctest::Approx(6.99e-44).epsilon(0.01));

  // Quadrupling T0 halves lambda0.
  const double l1 = lambda0(1e-20, 1e-25);
  CHECK(lambda0(1e-20, 4e-25) == doctest::Approx(l1 / 2.0).epsilon(1e-12));

  // m -> 4m with T0 -> T0/4 leaves lambda0 fixed.
  CHECK(lambda0(4e-20, 0.25e-25) == doctest::Approx(l1).epsilon(1e-12));

  CHECK_THROWS_AS(lambda0(0.0, 1.0), InvariantError);
  CHECK_THROWS_AS(t0_from_lambda0(1.0, -1.0), InvariantError);
}

TEST_CASE("free-flight growth of the localization length") {
  const double m = si::kNeutronMass;
  const double t0 = 7e-26;

  SUBCASE("tau0 = 0 reduces to lambda0") {
    CHECK(lambda0_max(m, t0, 0.0).value ==
          doctest::Approx(lambda0(m, t0)).epsilon(1e-12));
  }

  SUBCASE("T0 tau0 = 4 pi hbar gives sqrt(2) lambda0") {
    const double tau0 = 4.0 * std::acos(-1.0) * si::kHbar / t0;
    const Lambda0Max out = lambda0_max(m, t0, tau0);
    CHECK(out.value ==
          doctest::Approx(std::sqrt(2.0) * lambda0(m, t0)).epsilon(1e-9));
    CHECK_FALSE(out.negligible_growth);
  }

  SUBCASE("large tau0 asymptote") {
    const double tau0 = 1e6;
    const double l0 = lambda0(m, t0);
    CHECK(lambda0_max(m, t0, tau0).value ==
          doctest::Approx(si::kHbar * tau0 / (2.0 * m * l0)).epsilon(1e-6));
  }

  SUBCASE("negligible-growth flag") {
    CHECK(lambda0_max(m, t0, 1e-12 * si::kHbar / t0).negligible_growth);
  }
}

TEST_CASE("bounds report") {
  std::vector<ExperimentRecord> records;
  records.push_back(
      {"neutron", si::kNeutronMass, 2.43e-8, "upper", 7e-26});
  records.push_back({"nanogram", 1e-12, 1e-6, "lower", 1e-49});

  const std::vector<BoundRow> rows = bounds_report(records);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].t0_bound == doctest::Approx(7.07e-26).epsilon(0.005));
  CHECK_FALSE(rows[0].discrepant);
  CHECK(rows[1].t0_bound == doctest::Approx(6.99e-44).epsilon(0.01));
  CHECK(rows[1].discrepant);  // published 1e-49 is five decades away

  CHECK(bounds_report({}).empty());
}

TEST_CASE("experiment record parsing") {
  std::istringstream good(
      "# comment\n"
      "neutron, 1.675e-27, 2.43e-8, upper, 7e-26\n"
      "\n"
      "blob, 1e-12, 1e-6, lower\n");
  const auto records = parse_experiment_records(good);
  REQUIRE(records.size() == 2);
  CHECK(records[0].label == "neutron");
  CHECK(records[0].reference_t0 == 7e-26);
  CHECK(records[1].reference_t0 == 0.0);

  std::istringstream bad_fields("only, three, fields\n");
  CHECK_THROWS_WITH_AS(parse_experiment_records(bad_fields),
                       doctest::Contains("line 1"), InvariantError);

  std::istringstream bad_direction("x, 1e-3, 1e-3, sideways\n");
  CHECK_THROWS_AS(parse_experiment_records(bad_direction), InvariantError);

  std::istringstream bad_number("x, huge, 1e-3, upper\n");
  CHECK_THROWS_AS(parse_experiment_records(bad_number), InvariantError);
}
