#ifndef COBOUNDARY_INTERVAL_HPP
#define COBOUNDARY_INTERVAL_HPP

#include "coboundary/rat.hpp"

#include <vector>

namespace coboundary {

// Half-open interval [lo, hi). Every set in this library is a finite union
// of these, so "mod0" statements reduce to finitely many breakpoints.
struct Interval {
  Rat lo;
  Rat hi;

  Interval() = default;
  Interval(Rat l, Rat h);

  Rat length() const { return hi - lo; }
  bool empty() const { return lo == hi; }
  bool contains(const Rat& x) const { return lo <= x && x < hi; }
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

// Canonical finite union of half-open intervals: pieces disjoint, sorted by
// lo, no empty pieces, no adjacent pieces with hi == next.lo.
class IntervalSet {
public:
  IntervalSet() = default;
  explicit IntervalSet(const Interval& iv);
  IntervalSet(const Rat& lo, const Rat& hi);

  // Canonicalizes arbitrary input: overlapping or adjacent pieces merge.
  static IntervalSet from_pieces(std::vector<Interval> pieces);

  const std::vector<Interval>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  std::size_t piece_count() const { return pieces_.size(); }

  Rat measure() const;
  bool contains(const Rat& x) const;
  bool contains_set(const IntervalSet& other) const;

  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet subtract(const IntervalSet& other) const;

  // inf/sup of the set; throw precondition_error when empty.
  Rat inf() const;
  Rat sup() const;
  Rat diameter() const; // sup - inf

  // Leftmost point x with measure(S ∩ [inf, x)) == mass, as exact Rat.
  // Requires 0 <= mass <= measure().
  Rat quantile(const Rat& mass) const;

  // Leftmost subset of the given measure (prefix in position order).
  IntervalSet take_leftmost(const Rat& mass) const;

  // Splits into k consecutive chunks of equal measure.
  std::vector<IntervalSet> equal_split(std::size_t k) const;

  bool operator==(const IntervalSet& o) const { return pieces_ == o.pieces_; }

private:
  std::vector<Interval> pieces_;
};

} // namespace coboundary

#endif
