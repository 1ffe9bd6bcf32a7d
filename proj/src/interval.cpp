#include "coboundary/interval.hpp"
#include "coboundary/errors.hpp"

#include <algorithm>

namespace coboundary {

Interval::Interval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo > hi) throw precondition_error("interval with lo > hi: [" + to_string(lo) + "," + to_string(hi) + ")");
}

IntervalSet::IntervalSet(const Interval& iv) {
  if (!iv.empty()) pieces_.push_back(iv);
}

IntervalSet::IntervalSet(const Rat& lo, const Rat& hi) : IntervalSet(Interval(lo, hi)) {}

IntervalSet IntervalSet::from_pieces(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& iv) { return iv.empty(); });
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (const Interval& iv : pieces) {
    if (!out.pieces_.empty() && iv.lo <= out.pieces_.back().hi) {
      if (iv.hi > out.pieces_.back().hi) out.pieces_.back().hi = iv.hi;
    } else {
      out.pieces_.push_back(iv);
    }
  }
  for (const Interval& iv : out.pieces_) {
    check_denominator_guard(iv.lo);
    check_denominator_guard(iv.hi);
  }
  return out;
}

Rat IntervalSet::measure() const {
  Rat m = 0;
  for (const Interval& iv : pieces_) m += iv.length();
  return m;
}

bool IntervalSet::contains(const Rat& x) const {
  // Binary search over sorted pieces.
  std::size_t lo = 0, hi = pieces_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (pieces_[mid].hi <= x)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo < pieces_.size() && pieces_[lo].contains(x);
}

bool IntervalSet::contains_set(const IntervalSet& other) const {
  return other.subtract(*this).empty();
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return from_pieces(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < pieces_.size() && j < other.pieces_.size()) {
    const Interval& a = pieces_[i];
    const Interval& b = other.pieces_[j];
    Rat lo = max(a.lo, b.lo);
    Rat hi = min(a.hi, b.hi);
    if (lo < hi) out.emplace_back(lo, hi);
    if (a.hi <= b.hi)
      ++i;
    else
      ++j;
  }
  return from_pieces(std::move(out));
}

IntervalSet IntervalSet::subtract(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t j = 0;
  for (const Interval& a : pieces_) {
    Rat cursor = a.lo;
    while (j < other.pieces_.size() && other.pieces_[j].hi <= cursor) ++j;
    std::size_t k = j;
    while (k < other.pieces_.size() && other.pieces_[k].lo < a.hi) {
      const Interval& b = other.pieces_[k];
      if (b.lo > cursor) out.emplace_back(cursor, b.lo);
      cursor = max(cursor, b.hi);
      if (cursor >= a.hi) break;
      ++k;
    }
    if (cursor < a.hi) out.emplace_back(cursor, a.hi);
  }
  return from_pieces(std::move(out));
}

Rat IntervalSet::inf() const {
  if (empty()) throw precondition_error("inf of empty interval set");
  return pieces_.front().lo;
}

Rat IntervalSet::sup() const {
  if (empty()) throw precondition_error("sup of empty interval set");
  return pieces_.back().hi;
}

Rat IntervalSet::diameter() const { return sup() - inf(); }

Rat IntervalSet::quantile(const Rat& mass) const {
  if (mass < 0 || mass > measure())
    throw precondition_error("quantile mass " + to_string(mass) + " outside [0, " +
                             to_string(measure()) + "]");
  Rat remaining = mass;
  for (const Interval& iv : pieces_) {
    if (remaining <= iv.length()) return iv.lo + remaining;
    remaining -= iv.length();
  }
  return pieces_.empty() ? Rat(0) : pieces_.back().hi;
}

IntervalSet IntervalSet::take_leftmost(const Rat& mass) const {
  if (mass < 0 || mass > measure())
    throw precondition_error("take_leftmost mass outside [0, measure]");
  std::vector<Interval> out;
  Rat remaining = mass;
  for (const Interval& iv : pieces_) {
    if (remaining == 0) break;
    if (remaining >= iv.length()) {
      out.push_back(iv);
      remaining -= iv.length();
    } else {
      out.emplace_back(iv.lo, iv.lo + remaining);
      remaining = 0;
    }
  }
  return from_pieces(std::move(out));
}

std::vector<IntervalSet> IntervalSet::equal_split(std::size_t k) const {
  if (k == 0) throw precondition_error("equal_split into zero chunks");
  const Rat total = measure();
  std::vector<IntervalSet> out;
  out.reserve(k);
  Rat prev_cut = inf();
  for (std::size_t i = 1; i <= k; ++i) {
    Rat cut = (i == k) ? sup() : quantile(total * Rat(i, 1) / Rat(k, 1));
    out.push_back(intersect(IntervalSet(prev_cut, cut)));
    prev_cut = cut;
  }
  return out;
}

} // namespace coboundary
