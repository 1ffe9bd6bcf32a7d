#include <doctest.h>

#include "coboundary/errors.hpp"
#include "coboundary/interval.hpp"
#include "test_util.hpp"

#include <random>

using namespace coboundary;
using namespace coboundary::testutil;

TEST_CASE("canonicalization merges overlaps and adjacency") {
  IntervalSet s = IntervalSet::from_pieces({iv(0, 1, 1, 2), iv(1, 2, 3, 4), iv(7, 8, 1, 1)});
  CHECK(s.piece_count() == 2);
  CHECK(s.pieces()[0] == Interval(Rat(0), Rat(3, 4)));
  CHECK(s.measure() == Rat(7, 8));
}

TEST_CASE("set algebra on scattered unions") {
  IntervalSet a = IntervalSet::from_pieces({iv(0, 1, 1, 4), iv(1, 2, 3, 4)});
  IntervalSet b = IntervalSet::from_pieces({iv(1, 8, 5, 8)});
  CHECK(a.intersect(b).measure() == Rat(1, 8) + Rat(1, 8));
  CHECK(a.unite(b) == IntervalSet::from_pieces({iv(0, 1, 3, 4)}));
  CHECK(a.subtract(b) == IntervalSet::from_pieces({iv(0, 1, 1, 8), iv(5, 8, 3, 4)}));
  CHECK(a.contains(Rat(0)));
  CHECK_FALSE(a.contains(Rat(1, 4)));
  CHECK(a.contains_set(IntervalSet(Rat(1, 2), Rat(5, 8))));
  CHECK_FALSE(b.contains_set(a));
}

TEST_CASE("canonicalization is idempotent and measure-preserving") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 200; ++trial) {
    IntervalSet s = random_interval_set(rng, 8);
    IntervalSet again = IntervalSet::from_pieces(
        std::vector<Interval>(s.pieces().begin(), s.pieces().end()));
    CHECK(s == again);
    Rat m = 0;
    for (const Interval& piece : s.pieces()) m += piece.length();
    CHECK(m == s.measure());
  }
}

TEST_CASE("union/intersection/difference satisfy measure bookkeeping") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 200; ++trial) {
    IntervalSet a = random_interval_set(rng, 6);
    IntervalSet b = random_interval_set(rng, 6);
    CHECK(a.unite(b).measure() + a.intersect(b).measure() == a.measure() + b.measure());
    CHECK(a.subtract(b).measure() == a.measure() - a.intersect(b).measure());
    CHECK(a.subtract(b).intersect(b).empty());
  }
}

TEST_CASE("quantile and take_leftmost are exact") {
  IntervalSet s = IntervalSet::from_pieces({iv(0, 1, 1, 4), iv(1, 2, 3, 4)});
  CHECK(s.quantile(Rat(0)) == 0);
  CHECK(s.quantile(Rat(1, 4)) == Rat(1, 4));
  CHECK(s.quantile(Rat(3, 8)) == Rat(5, 8));
  CHECK(s.take_leftmost(Rat(3, 8)) ==
        IntervalSet::from_pieces({iv(0, 1, 1, 4), iv(1, 2, 5, 8)}));
  CHECK_THROWS_AS(s.quantile(Rat(2)), precondition_error);
}

TEST_CASE("equal_split produces equal-measure consecutive chunks") {
  IntervalSet s = IntervalSet::from_pieces({iv(0, 1, 1, 4), iv(1, 2, 3, 4)});
  auto chunks = s.equal_split(5);
  REQUIRE(chunks.size() == 5);
  Rat each = s.measure() / 5;
  IntervalSet reunion;
  for (const auto& c : chunks) {
    CHECK(c.measure() == each);
    reunion = reunion.unite(c);
  }
  CHECK(reunion == s);
}
