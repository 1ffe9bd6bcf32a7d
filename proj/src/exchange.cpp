#include "coboundary/exchange.hpp"
#include "coboundary/errors.hpp"

#include <algorithm>

namespace coboundary {

IntervalExchange IntervalExchange::from_pieces(std::vector<ExchangePiece> pieces) {
  std::erase_if(pieces, [](const ExchangePiece& p) { return p.src.empty() && p.dst.empty(); });
  for (const ExchangePiece& p : pieces)
    if (p.src.length() != p.dst.length())
      throw precondition_error("exchange piece with unequal lengths at src " + to_string(p.src.lo));
  std::sort(pieces.begin(), pieces.end(),
            [](const ExchangePiece& a, const ExchangePiece& b) { return a.src.lo < b.src.lo; });
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
    if (pieces[i + 1].src.lo < pieces[i].src.hi)
      throw precondition_error("overlapping exchange sources at " + to_string(pieces[i + 1].src.lo));
  {
    std::vector<Interval> dsts;
    for (const ExchangePiece& p : pieces) dsts.push_back(p.dst);
    std::sort(dsts.begin(), dsts.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i + 1 < dsts.size(); ++i)
      if (dsts[i + 1].lo < dsts[i].hi)
        throw precondition_error("overlapping exchange targets at " + to_string(dsts[i + 1].lo));
  }
  IntervalExchange out;
  for (ExchangePiece& p : pieces) {
    if (!out.pieces_.empty()) {
      ExchangePiece& last = out.pieces_.back();
      if (p.src.lo == last.src.hi && p.offset() == last.offset()) {
        last.src.hi = p.src.hi;
        last.dst.hi = p.dst.hi;
        continue;
      }
    }
    out.pieces_.push_back(std::move(p));
  }
  return out;
}

IntervalExchange IntervalExchange::from_pieces_unchecked(std::vector<ExchangePiece> pieces) {
  std::erase_if(pieces, [](const ExchangePiece& p) { return p.src.empty() && p.dst.empty(); });
  std::sort(pieces.begin(), pieces.end(),
            [](const ExchangePiece& a, const ExchangePiece& b) { return a.src.lo < b.src.lo; });
  IntervalExchange out;
  out.pieces_ = std::move(pieces);
  return out;
}

IntervalExchange IntervalExchange::identity(const IntervalSet& s) {
  std::vector<ExchangePiece> pieces;
  for (const Interval& iv : s.pieces()) pieces.push_back({iv, iv});
  return from_pieces(std::move(pieces));
}

IntervalSet IntervalExchange::domain() const {
  std::vector<Interval> ivs;
  for (const ExchangePiece& p : pieces_) ivs.push_back(p.src);
  return IntervalSet::from_pieces(std::move(ivs));
}

IntervalSet IntervalExchange::range() const {
  std::vector<Interval> ivs;
  for (const ExchangePiece& p : pieces_) ivs.push_back(p.dst);
  return IntervalSet::from_pieces(std::move(ivs));
}

IntervalExchange rotation(const Rat& a) {
  if (a < 0 || a > 1)
    throw precondition_error("rotation parameter " + to_string(a) + " outside [0,1]");
  if (a == 0 || a == 1) return IntervalExchange::identity(IntervalSet(Rat(0), Rat(1)));
  return IntervalExchange::from_pieces({
      {Interval(a, Rat(1)), Interval(Rat(0), Rat(1) - a)},
      {Interval(Rat(0), a), Interval(Rat(1) - a, Rat(1))},
  });
}

IntervalExchange canonical_pack(const IntervalSet& s) {
  if (s.empty()) throw precondition_error("canonical_pack of empty set");
  std::vector<ExchangePiece> pieces;
  Rat cursor = 0;
  for (const Interval& iv : s.pieces()) {
    pieces.push_back({iv, Interval(cursor, cursor + iv.length())});
    cursor += iv.length();
  }
  return IntervalExchange::from_pieces(std::move(pieces));
}

IntervalExchange pack_blocks(const std::vector<IntervalSet>& blocks) {
  std::vector<ExchangePiece> pieces;
  Rat cursor = 0;
  for (const IntervalSet& block : blocks)
    for (const Interval& iv : block.pieces()) {
      pieces.push_back({iv, Interval(cursor, cursor + iv.length())});
      cursor += iv.length();
    }
  if (pieces.empty()) throw precondition_error("pack_blocks of empty blocks");
  return IntervalExchange::from_pieces(std::move(pieces));
}

Rat IntervalExchange::apply(const Rat& x) const {
  std::size_t lo = 0, hi = pieces_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (pieces_[mid].src.hi <= x)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < pieces_.size() && pieces_[lo].src.contains(x)) return x + pieces_[lo].offset();
  throw undefined_point_error("point " + to_string(x) + " outside exchange sources");
}

IntervalExchange invert(const IntervalExchange& t) {
  std::vector<ExchangePiece> pieces;
  for (const ExchangePiece& p : t.pieces()) pieces.push_back({p.dst, p.src});
  return IntervalExchange::from_pieces(std::move(pieces));
}

IntervalExchange compose(const IntervalExchange& t2, const IntervalExchange& t1) {
  if (!(t1.range() == t2.domain()))
    throw domain_mismatch_error("compose: range of inner exchange differs from domain of outer");
  std::vector<ExchangePiece> pieces;
  for (const ExchangePiece& p1 : t1.pieces()) {
    // p1.dst may straddle several sources of t2; split accordingly.
    for (const ExchangePiece& p2 : t2.pieces()) {
      Rat lo = max(p1.dst.lo, p2.src.lo);
      Rat hi = min(p1.dst.hi, p2.src.hi);
      if (lo >= hi) continue;
      Rat src_lo = lo - p1.offset();
      Rat src_hi = hi - p1.offset();
      pieces.push_back({Interval(src_lo, src_hi),
                        Interval(lo + p2.offset(), hi + p2.offset())});
    }
  }
  return IntervalExchange::from_pieces(std::move(pieces));
}

IntervalSet map_set(const IntervalExchange& t, const IntervalSet& s) {
  if (!t.domain().contains_set(s))
    throw domain_mismatch_error("map_set: set not contained in exchange domain");
  std::vector<Interval> out;
  for (const ExchangePiece& p : t.pieces()) {
    IntervalSet cut = IntervalSet(p.src).intersect(s);
    for (const Interval& iv : cut.pieces())
      out.emplace_back(iv.lo + p.offset(), iv.hi + p.offset());
  }
  return IntervalSet::from_pieces(std::move(out));
}

IntervalExchange glue(const std::vector<IntervalExchange>& parts) {
  std::vector<ExchangePiece> pieces;
  for (const IntervalExchange& t : parts)
    pieces.insert(pieces.end(), t.pieces().begin(), t.pieces().end());
  return IntervalExchange::from_pieces(std::move(pieces));
}

PiecewiseAffine compose_affine(const PiecewiseAffine& g, const IntervalExchange& t) {
  if (!g.domain().contains_set(t.range()))
    throw domain_mismatch_error("compose_affine: exchange range not contained in function domain");
  std::vector<AffinePiece> out;
  for (const ExchangePiece& p : t.pieces()) {
    PiecewiseAffine cut = g.restrict_to(IntervalSet(p.dst));
    const Rat off = p.offset();
    for (const AffinePiece& q : cut.pieces())
      out.push_back({Interval(q.iv.lo - off, q.iv.hi - off), q.slope,
                     q.intercept + q.slope * off});
  }
  return PiecewiseAffine::from_pieces(std::move(out));
}

ExchangeReport verify_measure_preserving(const IntervalExchange& t) {
  ExchangeReport report;
  report.piece_count = t.pieces().size();
  report.total_measure = 0;

  Rat dst_measure = 0;
  for (const ExchangePiece& p : t.pieces()) {
    if (p.src.length() != p.dst.length()) {
      report.pass = false;
      report.failures.push_back("length mismatch at src " + to_string(p.src.lo));
    }
    report.total_measure += p.src.length();
    dst_measure += p.dst.length();
  }

  // Disjointness of sources (canonical order) and of targets.
  const auto& ps = t.pieces();
  for (std::size_t i = 0; i + 1 < ps.size(); ++i)
    if (ps[i + 1].src.lo < ps[i].src.hi) {
      report.pass = false;
      report.failures.push_back("overlapping sources at " + to_string(ps[i + 1].src.lo));
    }
  std::vector<Interval> dsts;
  for (const ExchangePiece& p : ps) dsts.push_back(p.dst);
  std::sort(dsts.begin(), dsts.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < dsts.size(); ++i)
    if (dsts[i + 1].lo < dsts[i].hi) {
      report.pass = false;
      report.failures.push_back("overlapping targets at " + to_string(dsts[i + 1].lo) +
                                " (pieces [" + to_string(dsts[i].lo) + "," + to_string(dsts[i].hi) +
                                ") and [" + to_string(dsts[i + 1].lo) + "," +
                                to_string(dsts[i + 1].hi) + "))");
    }

  if (report.total_measure != dst_measure) {
    report.pass = false;
    report.failures.push_back("total source measure " + to_string(report.total_measure) +
                              " differs from target measure " + to_string(dst_measure));
  }
  report.endomorphism = t.domain() == t.range();
  return report;
}

} // namespace coboundary
