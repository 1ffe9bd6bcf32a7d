#include "coboundary/piecewise.hpp"
#include "coboundary/errors.hpp"

#include <algorithm>
#include <map>

namespace coboundary {

// ---------------------------------------------------------------------------
// StepFunction

StepFunction StepFunction::from_pieces(std::vector<StepPiece> pieces) {
  std::erase_if(pieces, [](const StepPiece& p) { return p.iv.empty(); });
  std::sort(pieces.begin(), pieces.end(),
            [](const StepPiece& a, const StepPiece& b) { return a.iv.lo < b.iv.lo; });
  StepFunction out;
  for (StepPiece& p : pieces) {
    check_denominator_guard(p.value);
    if (!out.pieces_.empty()) {
      StepPiece& last = out.pieces_.back();
      if (p.iv.lo < last.iv.hi)
        throw precondition_error("overlapping step pieces at " + to_string(p.iv.lo));
      if (p.iv.lo == last.iv.hi && p.value == last.value) {
        last.iv.hi = p.iv.hi;
        continue;
      }
    }
    out.pieces_.push_back(std::move(p));
  }
  return out;
}

StepFunction StepFunction::constant(const IntervalSet& domain, const Rat& value) {
  std::vector<StepPiece> pieces;
  for (const Interval& iv : domain.pieces()) pieces.push_back({iv, value});
  return from_pieces(std::move(pieces));
}

IntervalSet StepFunction::domain() const {
  std::vector<Interval> ivs;
  ivs.reserve(pieces_.size());
  for (const StepPiece& p : pieces_) ivs.push_back(p.iv);
  return IntervalSet::from_pieces(std::move(ivs));
}

Rat StepFunction::value_at(const Rat& x) const {
  std::size_t lo = 0, hi = pieces_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (pieces_[mid].iv.hi <= x)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < pieces_.size() && pieces_[lo].iv.contains(x)) return pieces_[lo].value;
  throw domain_mismatch_error("point " + to_string(x) + " outside step function domain");
}

StepFunction StepFunction::restrict_to(const IntervalSet& s) const {
  std::vector<StepPiece> out;
  for (const StepPiece& p : pieces_) {
    IntervalSet cut = IntervalSet(p.iv).intersect(s);
    for (const Interval& iv : cut.pieces()) out.push_back({iv, p.value});
  }
  return from_pieces(std::move(out));
}

StepFunction StepFunction::add_constant(const Rat& c) const {
  std::vector<StepPiece> out = pieces_;
  for (StepPiece& p : out) p.value += c;
  return from_pieces(std::move(out));
}

StepFunction StepFunction::scale(const Rat& c) const {
  std::vector<StepPiece> out = pieces_;
  for (StepPiece& p : out) p.value *= c;
  return from_pieces(std::move(out));
}

StepFunction overlay_add(const StepFunction& a, const StepFunction& b) {
  std::vector<Rat> cuts = common_refinement({breakpoints(a), breakpoints(b)});
  std::vector<StepPiece> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Interval atom(cuts[i], cuts[i + 1]);
    bool in_a = false, in_b = false;
    Rat v = 0;
    for (const StepPiece& p : a.pieces())
      if (p.iv.lo <= atom.lo && atom.hi <= p.iv.hi) { v += p.value; in_a = true; break; }
    for (const StepPiece& p : b.pieces())
      if (p.iv.lo <= atom.lo && atom.hi <= p.iv.hi) { v += p.value; in_b = true; break; }
    if (in_a || in_b) out.push_back({atom, v});
  }
  return StepFunction::from_pieces(std::move(out));
}

StepFunction subtract_on_common_domain(const StepFunction& a, const StepFunction& b) {
  if (!(a.domain() == b.domain()))
    throw domain_mismatch_error("step subtraction requires equal domains");
  return overlay_add(a, b.negate());
}

// ---------------------------------------------------------------------------
// PiecewiseAffine

PiecewiseAffine PiecewiseAffine::from_pieces(std::vector<AffinePiece> pieces) {
  std::erase_if(pieces, [](const AffinePiece& p) { return p.iv.empty(); });
  std::sort(pieces.begin(), pieces.end(),
            [](const AffinePiece& a, const AffinePiece& b) { return a.iv.lo < b.iv.lo; });
  PiecewiseAffine out;
  for (AffinePiece& p : pieces) {
    check_denominator_guard(p.slope);
    check_denominator_guard(p.intercept);
    if (!out.pieces_.empty()) {
      AffinePiece& last = out.pieces_.back();
      if (p.iv.lo < last.iv.hi)
        throw precondition_error("overlapping affine pieces at " + to_string(p.iv.lo));
      if (p.iv.lo == last.iv.hi && p.slope == last.slope && p.intercept == last.intercept) {
        last.iv.hi = p.iv.hi;
        continue;
      }
    }
    out.pieces_.push_back(std::move(p));
  }
  return out;
}

PiecewiseAffine PiecewiseAffine::from_step(const StepFunction& f) {
  std::vector<AffinePiece> out;
  for (const StepPiece& p : f.pieces()) out.push_back({p.iv, Rat(0), p.value});
  return from_pieces(std::move(out));
}

PiecewiseAffine PiecewiseAffine::zero(const IntervalSet& domain) {
  std::vector<AffinePiece> out;
  for (const Interval& iv : domain.pieces()) out.push_back({iv, Rat(0), Rat(0)});
  return from_pieces(std::move(out));
}

IntervalSet PiecewiseAffine::domain() const {
  std::vector<Interval> ivs;
  ivs.reserve(pieces_.size());
  for (const AffinePiece& p : pieces_) ivs.push_back(p.iv);
  return IntervalSet::from_pieces(std::move(ivs));
}

const AffinePiece& PiecewiseAffine::piece_at(const Rat& x) const {
  std::size_t lo = 0, hi = pieces_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (pieces_[mid].iv.hi <= x)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < pieces_.size() && pieces_[lo].iv.contains(x)) return pieces_[lo];
  throw domain_mismatch_error("point " + to_string(x) + " outside piecewise-affine domain");
}

Rat PiecewiseAffine::eval(const Rat& x) const { return piece_at(x).value_at(x); }

PiecewiseAffine PiecewiseAffine::restrict_to(const IntervalSet& s) const {
  std::vector<AffinePiece> out;
  for (const AffinePiece& p : pieces_) {
    IntervalSet cut = IntervalSet(p.iv).intersect(s);
    for (const Interval& iv : cut.pieces()) out.push_back({iv, p.slope, p.intercept});
  }
  return from_pieces(std::move(out));
}

PiecewiseAffine PiecewiseAffine::add_constant(const Rat& c) const {
  std::vector<AffinePiece> out = pieces_;
  for (AffinePiece& p : out) p.intercept += c;
  return from_pieces(std::move(out));
}

PiecewiseAffine PiecewiseAffine::scale(const Rat& c) const {
  std::vector<AffinePiece> out = pieces_;
  for (AffinePiece& p : out) {
    p.slope *= c;
    p.intercept *= c;
  }
  return from_pieces(std::move(out));
}

IntervalSet PiecewiseAffine::positive_set() const {
  std::vector<Interval> out;
  for (const AffinePiece& p : pieces_) {
    if (p.slope == 0) {
      if (p.intercept > 0) out.push_back(p.iv);
      continue;
    }
    Rat root = -p.intercept / p.slope;
    if (p.slope > 0) {
      Rat lo = max(p.iv.lo, root);
      if (lo < p.iv.hi) out.emplace_back(lo, p.iv.hi);
    } else {
      Rat hi = min(p.iv.hi, root);
      if (p.iv.lo < hi) out.emplace_back(p.iv.lo, hi);
    }
  }
  return IntervalSet::from_pieces(std::move(out));
}

IntervalSet PiecewiseAffine::negative_set() const { return negate().positive_set(); }

IntervalSet PiecewiseAffine::zero_set() const {
  std::vector<Interval> out;
  for (const AffinePiece& p : pieces_)
    if (p.slope == 0 && p.intercept == 0) out.push_back(p.iv);
  return IntervalSet::from_pieces(std::move(out));
}

Rat PiecewiseAffine::min_value() const {
  if (empty()) throw precondition_error("min of function with empty domain");
  Rat m = pieces_.front().value_at(pieces_.front().iv.lo);
  for (const AffinePiece& p : pieces_) {
    m = min(m, p.value_at(p.iv.lo));
    m = min(m, p.value_at(p.iv.hi));
  }
  return m;
}

Rat PiecewiseAffine::max_value() const { return Rat(-negate().min_value()); }

PiecewiseAffine overlay_add(const PiecewiseAffine& a, const PiecewiseAffine& b) {
  std::vector<Rat> cuts = common_refinement({breakpoints(a), breakpoints(b)});
  std::vector<AffinePiece> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Interval atom(cuts[i], cuts[i + 1]);
    Rat slope = 0, intercept = 0;
    bool covered = false;
    for (const AffinePiece& p : a.pieces())
      if (p.iv.lo <= atom.lo && atom.hi <= p.iv.hi) {
        slope += p.slope;
        intercept += p.intercept;
        covered = true;
        break;
      }
    for (const AffinePiece& p : b.pieces())
      if (p.iv.lo <= atom.lo && atom.hi <= p.iv.hi) {
        slope += p.slope;
        intercept += p.intercept;
        covered = true;
        break;
      }
    if (covered) out.push_back({atom, slope, intercept});
  }
  return PiecewiseAffine::from_pieces(std::move(out));
}

// ---------------------------------------------------------------------------
// Shared operations

Rat integrate(const StepFunction& f, const IntervalSet& s) {
  if (!f.domain().contains_set(s))
    throw domain_mismatch_error("integration set not contained in the function domain");
  Rat total = 0;
  for (const StepPiece& p : f.pieces())
    total += p.value * IntervalSet(p.iv).intersect(s).measure();
  return total;
}

Rat integrate(const PiecewiseAffine& f, const IntervalSet& s) {
  if (!f.domain().contains_set(s))
    throw domain_mismatch_error("integration set not contained in the function domain");
  Rat total = 0;
  for (const AffinePiece& p : f.pieces()) {
    IntervalSet cut = IntervalSet(p.iv).intersect(s);
    for (const Interval& iv : cut.pieces())
      total += p.slope * (iv.hi * iv.hi - iv.lo * iv.lo) / 2 + p.intercept * iv.length();
  }
  return total;
}

Rat sup_norm(const StepFunction& f) {
  if (f.empty()) throw precondition_error("sup norm of function with empty domain");
  Rat m = 0;
  for (const StepPiece& p : f.pieces()) m = max(m, abs(p.value));
  return m;
}

Rat sup_norm(const PiecewiseAffine& f) {
  if (f.empty()) throw precondition_error("sup norm of function with empty domain");
  return max(abs(f.min_value()), abs(f.max_value()));
}

std::vector<Rat> common_refinement(const std::vector<std::vector<Rat>>& sources) {
  std::vector<Rat> all;
  for (const auto& src : sources) all.insert(all.end(), src.begin(), src.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::vector<Rat> breakpoints(const StepFunction& f) {
  std::vector<Rat> out;
  for (const StepPiece& p : f.pieces()) {
    out.push_back(p.iv.lo);
    out.push_back(p.iv.hi);
  }
  return common_refinement({out});
}

std::vector<Rat> breakpoints(const PiecewiseAffine& f) {
  std::vector<Rat> out;
  for (const AffinePiece& p : f.pieces()) {
    out.push_back(p.iv.lo);
    out.push_back(p.iv.hi);
  }
  return common_refinement({out});
}

std::vector<Rat> breakpoints(const IntervalSet& s) {
  std::vector<Rat> out;
  for (const Interval& iv : s.pieces()) {
    out.push_back(iv.lo);
    out.push_back(iv.hi);
  }
  return common_refinement({out});
}

std::vector<std::pair<Rat, IntervalSet>> atoms(const StepFunction& f) {
  std::map<Rat, std::vector<Interval>> groups;
  for (const StepPiece& p : f.pieces()) groups[p.value].push_back(p.iv);
  std::vector<std::pair<Rat, IntervalSet>> out;
  out.reserve(groups.size());
  for (auto& [value, ivs] : groups)
    out.emplace_back(value, IntervalSet::from_pieces(std::move(ivs)));
  return out;
}

std::vector<Rat> discontinuities(const PiecewiseAffine& f) {
  std::vector<Rat> out;
  const auto& ps = f.pieces();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i + 1 < ps.size() && ps[i].iv.hi == ps[i + 1].iv.lo) {
      if (ps[i].value_at(ps[i].iv.hi) != ps[i + 1].value_at(ps[i + 1].iv.lo))
        out.push_back(ps[i].iv.hi);
    } else {
      // domain gap: both edges break continuity
      out.push_back(ps[i].iv.hi);
      if (i + 1 < ps.size()) out.push_back(ps[i + 1].iv.lo);
    }
  }
  return common_refinement({out});
}

// ---------------------------------------------------------------------------
// SampledFunction

SampledFunction::SampledFunction(IntervalSet domain, std::vector<Rat> grid,
                                 std::vector<Rat> values, Rat lipschitz)
    : domain_(std::move(domain)), grid_(std::move(grid)), values_(std::move(values)),
      lipschitz_(std::move(lipschitz)) {
  if (grid_.size() != values_.size())
    throw precondition_error("sampled function grid/value size mismatch");
  if (grid_.size() < 2) throw precondition_error("sampled function needs at least two grid points");
  if (lipschitz_ < 0) throw precondition_error("negative modulus slope");
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
    if (!(grid_[i] < grid_[i + 1]))
      throw precondition_error("sampled grid not strictly increasing at index " + std::to_string(i));
  // Grid must cover the domain closure: every piece endpoint is a grid point
  // and every grid point lies in the closure of some piece.
  for (const Interval& iv : domain_.pieces()) {
    if (!std::binary_search(grid_.begin(), grid_.end(), iv.lo) ||
        !std::binary_search(grid_.begin(), grid_.end(), iv.hi))
      throw precondition_error("domain piece endpoint missing from grid: [" + to_string(iv.lo) +
                               "," + to_string(iv.hi) + ")");
  }
  for (const Rat& x : grid_) {
    bool ok = false;
    for (const Interval& iv : domain_.pieces())
      if (iv.lo <= x && x <= iv.hi) { ok = true; break; }
    if (!ok) throw precondition_error("grid point outside domain closure: " + to_string(x));
  }
  // Declared modulus must at least hold on the samples themselves.
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    if (!domain_.contains(grid_[i])) continue; // gap between pieces
    Rat gap = grid_[i + 1] - grid_[i];
    if (abs(values_[i + 1] - values_[i]) > lipschitz_ * gap)
      throw precondition_error("samples violate the declared modulus at " + to_string(grid_[i]));
  }
}

PiecewiseAffine SampledFunction::interpolant() const {
  std::vector<AffinePiece> out;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    if (!domain_.contains(grid_[i])) continue;
    const Rat &a = grid_[i], &b = grid_[i + 1];
    Rat slope = (values_[i + 1] - values_[i]) / (b - a);
    Rat intercept = values_[i] - slope * a;
    out.push_back({Interval(a, b), slope, intercept});
  }
  return PiecewiseAffine::from_pieces(std::move(out));
}

Rat SampledFunction::max_spacing() const {
  Rat m = 0;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    if (!domain_.contains(grid_[i])) continue;
    m = max(m, Rat(grid_[i + 1] - grid_[i]));
  }
  return m;
}

Rat leftmost_root_on_samples(const std::vector<Rat>& xs, const std::vector<Rat>& ys,
                             const Rat& target) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] == target) return xs[i];
    if (i + 1 < xs.size()) {
      const bool crosses_up = ys[i] < target && target < ys[i + 1];
      const bool crosses_down = ys[i] > target && target > ys[i + 1];
      if (crosses_up || crosses_down)
        return xs[i] + (target - ys[i]) * (xs[i + 1] - xs[i]) / (ys[i + 1] - ys[i]);
    }
  }
  throw structural_error("no root for target " + to_string(target));
}

Rat eval_at_closure(const PiecewiseAffine& f, const Rat& x) {
  for (const AffinePiece& p : f.pieces())
    if (p.iv.contains(x)) return p.value_at(x);
  for (const AffinePiece& p : f.pieces())
    if (p.iv.hi == x) return p.value_at(x);
  throw domain_mismatch_error("point " + to_string(x) + " outside function closure");
}

PiecewiseAffine affine_from_samples(std::vector<Rat> xs, std::vector<Rat> ys) {
  if (xs.size() != ys.size()) throw precondition_error("affine_from_samples: size mismatch");
  std::vector<Rat> x2, y2;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!x2.empty()) {
      if (xs[i] < x2.back()) throw precondition_error("affine_from_samples: xs not sorted");
      if (xs[i] == x2.back()) {
        if (ys[i] != y2.back())
          throw precondition_error("affine_from_samples: inconsistent duplicate sample");
        continue;
      }
    }
    x2.push_back(xs[i]);
    y2.push_back(ys[i]);
  }
  std::vector<AffinePiece> pieces;
  for (std::size_t i = 0; i + 1 < x2.size(); ++i) {
    Rat slope = (y2[i + 1] - y2[i]) / (x2[i + 1] - x2[i]);
    Rat intercept = y2[i] - slope * x2[i];
    pieces.push_back({Interval(x2[i], x2[i + 1]), slope, intercept});
  }
  return PiecewiseAffine::from_pieces(std::move(pieces));
}

SampledFunction SampledFunction::restrict_to(const IntervalSet& s) const {
  IntervalSet sub = domain_.intersect(s);
  if (sub.empty()) throw precondition_error("empty restriction of sampled function");
  PiecewiseAffine lin = interpolant();
  std::vector<Rat> cuts = common_refinement({grid_, breakpoints(sub)});
  std::vector<Rat> grid, values;
  for (const Rat& x : cuts) {
    bool in_closure = false;
    for (const Interval& iv : sub.pieces())
      if (iv.lo <= x && x <= iv.hi) { in_closure = true; break; }
    if (!in_closure) continue;
    grid.push_back(x);
    // New cut points take the interpolant value: the restricted samples
    // describe the same interpolant, so exactness is preserved.
    values.push_back(eval_at_closure(lin, x));
  }
  return SampledFunction(std::move(sub), std::move(grid), std::move(values), lipschitz_);
}

StepFunction SampledFunction::step_quantization() const {
  std::vector<StepPiece> out;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    if (!domain_.contains(grid_[i])) continue;
    out.push_back({Interval(grid_[i], grid_[i + 1]), values_[i]});
  }
  return StepFunction::from_pieces(std::move(out));
}

SampledFunction SampledFunction::negate() const {
  std::vector<Rat> vals = values_;
  for (Rat& v : vals) v = -v;
  return SampledFunction(domain_, grid_, std::move(vals), lipschitz_);
}

// ---------------------------------------------------------------------------
// HybridFunction

namespace {
PiecewiseAffine build_working(const StepFunction& step,
                              const std::optional<SampledFunction>& sampled) {
  PiecewiseAffine w = PiecewiseAffine::from_step(step);
  if (sampled) w = overlay_add(w, sampled->interpolant());
  return w;
}
} // namespace

HybridFunction::HybridFunction(StepFunction step)
    : step_(std::move(step)), working_(build_working(step_, sampled_)) {}

HybridFunction::HybridFunction(SampledFunction sampled)
    : sampled_(std::move(sampled)), working_(build_working(step_, sampled_)) {}

HybridFunction::HybridFunction(StepFunction step, std::optional<SampledFunction> sampled)
    : step_(std::move(step)), sampled_(std::move(sampled)),
      working_(build_working(step_, sampled_)) {}

IntervalSet HybridFunction::domain() const {
  IntervalSet d = step_.domain();
  if (sampled_) d = d.unite(sampled_->domain());
  return d;
}

IntervalSet HybridFunction::sampled_domain() const {
  return sampled_ ? sampled_->domain() : IntervalSet();
}

IntervalSet HybridFunction::atomic_domain() const { return domain().subtract(sampled_domain()); }

Rat HybridFunction::sup_norm_lower() const { return sup_norm(working()); }

Rat HybridFunction::interpolation_error_bound() const {
  if (!sampled_) return Rat(0);
  return sampled_->lipschitz() * sampled_->max_spacing() / 2;
}

Rat HybridFunction::average_error_bound() const {
  if (!sampled_) return Rat(0);
  return sampled_->lipschitz() * sampled_->max_spacing() / 4;
}

HybridFunction HybridFunction::restrict_to(const IntervalSet& s) const {
  std::optional<SampledFunction> samp;
  if (sampled_ && !sampled_->domain().intersect(s).empty()) samp = sampled_->restrict_to(s);
  return HybridFunction(step_.restrict_to(s), std::move(samp));
}

HybridFunction HybridFunction::negate() const {
  std::optional<SampledFunction> samp;
  if (sampled_) samp = sampled_->negate();
  return HybridFunction(step_.negate(), std::move(samp));
}

} // namespace coboundary
