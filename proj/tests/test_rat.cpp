#include <doctest.h>

#include "coboundary/errors.hpp"
#include "coboundary/rat.hpp"

using namespace coboundary;

TEST_CASE("rational parsing and printing round-trips") {
  CHECK(to_string(rat_from_string("2/4")) == "1/2");
  CHECK(to_string(rat_from_string("-6/4")) == "-3/2");
  CHECK(to_string(rat_from_string("7")) == "7");
  CHECK(to_string(rat_from_string(" 1 / 3 ")) == "1/3");
  CHECK(rat_from_string("0/5") == 0);
}

TEST_CASE("malformed rationals are rejected") {
  CHECK_THROWS_AS(rat_from_string("1/0"), structural_error);
  CHECK_THROWS_AS(rat_from_string("a/b"), structural_error);
  CHECK_THROWS_AS(rat_from_string(""), structural_error);
  CHECK_THROWS_AS(rat_from_string("1.5"), structural_error);
}

TEST_CASE("decimal rendering") {
  CHECK(to_decimal_string(Rat(1, 2), 12) == "0.5");
  CHECK(to_decimal_string(Rat(1, 3), 5) == "0.33333");
  CHECK(to_decimal_string(Rat(-2, 3), 4) == "-0.6667");
  CHECK(to_decimal_string(Rat(0), 12) == "0");
  CHECK(to_decimal_string(Rat(1000), 4) == "1000");
  CHECK(to_decimal_string(Rat(1, 1000000), 3) == "1e-6");
}

TEST_CASE("floor_int handles negatives") {
  CHECK(floor_int(Rat(7, 2)) == 3);
  CHECK(floor_int(Rat(-7, 2)) == -4);
  CHECK(floor_int(Rat(4)) == 4);
}

TEST_CASE("denominator guard raises a distinct resource error") {
  set_denominator_guard(8);
  CHECK_THROWS_AS(check_denominator_guard(Rat(1, 100000)), resource_limit_error);
  CHECK_NOTHROW(check_denominator_guard(Rat(1, 255)));
  set_denominator_guard(0);
  CHECK_NOTHROW(check_denominator_guard(Rat(1, 100000)));
}
