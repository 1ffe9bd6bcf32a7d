#ifndef COBOUNDARY_EXCHANGE_HPP
#define COBOUNDARY_EXCHANGE_HPP

#include "coboundary/interval.hpp"
#include "coboundary/piecewise.hpp"

#include <string>
#include <vector>

namespace coboundary {

struct ExchangePiece {
  Interval src;
  Interval dst; // image; equal length, x -> x - src.lo + dst.lo
  Rat offset() const { return dst.lo - src.lo; }
  bool operator==(const ExchangePiece& o) const { return src == o.src && dst == o.dst; }
};

// Piecewise translation between two finite interval unions of equal measure.
// Measure preservation is syntactic; the map is a bijection off the finite
// set of piece boundaries. Canonical form: pieces sorted by src.lo, adjacent
// pieces with contiguous sources and equal offset merged.
class IntervalExchange {
public:
  IntervalExchange() = default;

  // Sources must be pairwise disjoint, targets pairwise disjoint; throws
  // precondition_error otherwise (or on length mismatch within a piece).
  static IntervalExchange from_pieces(std::vector<ExchangePiece> pieces);

  // Sorts by source but validates nothing. For deserialized input headed to
  // verify_measure_preserving, which reports violations instead of throwing.
  static IntervalExchange from_pieces_unchecked(std::vector<ExchangePiece> pieces);

  static IntervalExchange identity(const IntervalSet& s);

  const std::vector<ExchangePiece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }

  IntervalSet domain() const; // union of sources
  IntervalSet range() const;  // union of targets
  bool is_endomorphism() const { return domain() == range(); }

  // Translated image of x; undefined_point_error off the source pieces
  // (the finite exceptional set).
  Rat apply(const Rat& x) const;

  bool operator==(const IntervalExchange& o) const { return pieces_ == o.pieces_; }

private:
  std::vector<ExchangePiece> pieces_;
};

// The rotation t -> {t - a} on [0,1) as a two-piece exchange.
IntervalExchange rotation(const Rat& a);

// Order-preserving translation of S onto [0, measure(S)).
IntervalExchange canonical_pack(const IntervalSet& s);

// Order-preserving translation of the blocks, packed consecutively from 0 in
// the given order. Blocks must be pairwise disjoint.
IntervalExchange pack_blocks(const std::vector<IntervalSet>& blocks);

IntervalExchange invert(const IntervalExchange& t);

// Exact composition t2 ∘ t1. Requires range(t1) == domain(t2).
IntervalExchange compose(const IntervalExchange& t2, const IntervalExchange& t1);

// Exact image of a subset of the domain.
IntervalSet map_set(const IntervalExchange& t, const IntervalSet& s);

// Union of exchanges with pairwise disjoint sources and targets.
IntervalExchange glue(const std::vector<IntervalExchange>& parts);

// g ∘ T as an exact piecewise-affine function on domain(T).
// Requires range(T) ⊆ domain(g).
PiecewiseAffine compose_affine(const PiecewiseAffine& g, const IntervalExchange& t);

struct ExchangeReport {
  bool pass = true;
  std::vector<std::string> failures;
  Rat total_measure;
  std::size_t piece_count = 0;
  bool endomorphism = false;
};

// Confirms the representation invariants (equal lengths, disjoint sources,
// disjoint targets, equal total measure) and reports the results.
ExchangeReport verify_measure_preserving(const IntervalExchange& t);

} // namespace coboundary

#endif
