#include "coboundary/carve.hpp"
#include "coboundary/errors.hpp"

#include <algorithm>

namespace coboundary {

namespace {

// [lo, lo+a) ∪ [hi-a, hi): the points within depth a of either end.
IntervalSet depth_region(const Rat& lo, const Rat& hi, const Rat& a) {
  if (a <= 0) return IntervalSet();
  if (2 * a >= hi - lo) return IntervalSet(lo, hi);
  return IntervalSet(lo, lo + a).unite(IntervalSet(hi - a, hi));
}

// Trimming profile of a set against the anchors [lo, hi): how much mass and
// integral the depth region collects as the depth grows. Piecewise affine in
// the depth and, after reparametrization, in the trimmed mass.
struct TrimProfile {
  IntervalSet set;
  Rat lo, hi;
  std::vector<Rat> depths;
  std::vector<Rat> masses;
  std::vector<Rat> integrals;

  TrimProfile(IntervalSet s, const StepFunction& f, Rat anchor_lo, Rat anchor_hi)
      : set(std::move(s)), lo(std::move(anchor_lo)), hi(std::move(anchor_hi)) {
    std::vector<Rat> cand;
    cand.push_back(Rat(0));
    const Rat span = hi - lo;
    cand.push_back(span / 2);
    cand.push_back(span);
    auto add_position = [&](const Rat& p) {
      if (p < lo || p > hi) return;
      cand.push_back(p - lo);
      cand.push_back(hi - p);
    };
    for (const Rat& p : breakpoints(set)) add_position(p);
    for (const Rat& p : breakpoints(f)) add_position(p);
    std::erase_if(cand, [&](const Rat& d) { return d < 0 || d > span; });
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    depths = std::move(cand);
    for (const Rat& d : depths) {
      IntervalSet removed = set.intersect(depth_region(lo, hi, d));
      masses.push_back(removed.measure());
      integrals.push_back(set.empty() ? Rat(0) : integrate(f, removed));
    }
  }

  Rat total_mass() const { return set.measure(); }

  Rat depth_for_mass(const Rat& m) const { return leftmost_root_on_samples(depths, masses, m); }

  IntervalSet removed_at_mass(const Rat& m) const {
    IntervalSet removed = set.intersect(depth_region(lo, hi, depth_for_mass(m)));
    if (removed.measure() != m)
      throw structural_error("trim profile produced the wrong mass");
    return removed;
  }

  // The removed integral as a function of removed mass (exact for step f).
  PiecewiseAffine mass_to_integral(bool negate_values) const {
    std::vector<Rat> ys = integrals;
    if (negate_values)
      for (Rat& y : ys) y = -y;
    return affine_from_samples(masses, ys);
  }
};

IntervalSet step_sign_set(const StepFunction& f, int sgn) {
  std::vector<Interval> out;
  for (const StepPiece& p : f.pieces())
    if (sign(p.value) == sgn) out.push_back(p.iv);
  return IntervalSet::from_pieces(std::move(out));
}

} // namespace

std::pair<IntervalSet, CarveTrace>
carve_mean_zero(const IntervalSet& d, const StepFunction& f, const IntervalSet& e,
                const Rat& eps, std::optional<Rat> declared_tolerance) {
  if (!d.contains_set(e)) throw precondition_error("carve_mean_zero: E not contained in D");
  const Rat total = integrate(f, d);
  if (total != 0)
    throw precondition_error("carve_mean_zero: integral over D is " + to_string(total) +
                             ", not 0");
  if (e.measure() < d.measure() - eps)
    throw precondition_error("carve_mean_zero: measure deficit of E exceeds eps");

  CarveTrace trace;
  trace.declared_tolerance = declared_tolerance;
  trace.t0 = 0;
  trace.r0 = 0;

  StepFunction fd = f.restrict_to(d);
  const bool zero_fn = step_sign_set(fd, 1).empty() && step_sign_set(fd, -1).empty();
  if (zero_fn) return {e, trace}; // degenerate: any subset already integrates to 0

  // Admissibility threshold; eps above it is rejected with the exact value.
  const Rat norm = sup_norm(fd);
  Rat pos_norm = 0, neg_norm = 0;
  for (const StepPiece& p : fd.pieces()) {
    pos_norm = max(pos_norm, p.value);
    neg_norm = max(neg_norm, Rat(-p.value));
  }
  auto measure_above = [&](const StepFunction& g, const Rat& cut) {
    std::vector<Interval> out;
    for (const StepPiece& p : g.pieces())
      if (p.value > cut) out.push_back(p.iv);
    return IntervalSet::from_pieces(std::move(out)).measure();
  };
  const Rat tau_plus = measure_above(fd, pos_norm / 2);
  const Rat tau_minus = measure_above(fd.negate(), neg_norm / 2);
  const Rat threshold = min(tau_plus * pos_norm / norm, tau_minus * neg_norm / norm) / 4;
  if (eps > threshold)
    throw precondition_error("carve_mean_zero: eps " + to_string(eps) +
                             " above the admissible threshold " + to_string(threshold));

  Rat deficit = integrate(fd, e);
  StepFunction work = fd;
  if (deficit < 0) {
    work = fd.negate();
    trace.negated = true;
    deficit = -deficit;
  }

  // Remove {work > ||work+||/2} ∩ [0, r) for the exact leftmost root of
  // F(r) = ∫_{E \ R_r} work.
  Rat work_pos_norm = 0;
  for (const StepPiece& p : work.pieces()) work_pos_norm = max(work_pos_norm, p.value);
  std::vector<Interval> high;
  for (const StepPiece& p : work.pieces())
    if (p.value > work_pos_norm / 2) high.push_back(p.iv);
  IntervalSet p_set = IntervalSet::from_pieces(std::move(high)).intersect(e);

  const Rat origin = min(Rat(0), d.inf());
  std::vector<Rat> cands = breakpoints(p_set);
  cands.push_back(origin);
  cands.push_back(d.sup());
  cands = common_refinement({cands});
  std::vector<Rat> values;
  for (const Rat& r : cands)
    values.push_back(deficit - integrate(work, p_set.intersect(IntervalSet(origin, r))));
  const Rat r0 = leftmost_root_on_samples(cands, values, Rat(0));
  IntervalSet removed = p_set.intersect(IntervalSet(origin, r0));
  IntervalSet k = e.subtract(removed);

  trace.r0 = r0;
  if (trace.negated)
    trace.removed_neg = removed;
  else
    trace.removed_pos = removed;
  trace.f_plus = affine_from_samples(cands, values);

  if (integrate(fd, k) != 0) throw structural_error("carve_mean_zero: nonzero result integral");
  const Rat slack = (Rat(1) + 2 * norm * max(Rat(1) / pos_norm, Rat(1) / neg_norm)) * eps;
  if (k.measure() < d.measure() - slack)
    throw structural_error("carve_mean_zero: measure bound violated");
  return {k, trace};
}

std::pair<IntervalSet, CarveTrace>
shrink_mean_zero(const IntervalSet& k, const StepFunction& f, const Rat& c,
                 std::optional<Rat> declared_tolerance) {
  if (k.empty()) throw precondition_error("shrink_mean_zero: empty set");
  const Rat mk = k.measure();
  if (c <= 0 || c >= mk)
    throw precondition_error("shrink_mean_zero: c = " + to_string(c) + " outside (0, " +
                             to_string(mk) + ")");
  const Rat total = integrate(f, k);
  if (total != 0)
    throw precondition_error("shrink_mean_zero: integral over K is " + to_string(total) +
                             ", not 0");

  CarveTrace trace;
  trace.declared_tolerance = declared_tolerance;
  const Rat lo = k.inf();
  const Rat hi = k.sup();

  StepFunction fk = f.restrict_to(k);
  IntervalSet pos = step_sign_set(fk, 1);
  IntervalSet neg = step_sign_set(fk, -1);
  IntervalSet zero = k.subtract(pos).subtract(neg);

  if (pos.empty()) {
    // f vanishes on K: symmetric depth trim E = K ∩ [inf+r, sup-r).
    TrimProfile profile(k, fk, lo, hi);
    IntervalSet removed = profile.removed_at_mass(c);
    IntervalSet e = k.subtract(removed);
    trace.removed_zero = removed;
    trace.t0 = 0;
    trace.r0 = 0;
    if (e.measure() != mk - c || e.inf() <= lo || e.sup() >= hi)
      throw structural_error("shrink_mean_zero: degenerate branch postcondition failed");
    return {e, trace};
  }

  // Proportional budget split between the zero set and the signed sets; the
  // signed share is balanced so the removed integrals cancel exactly.
  const Rat m_zero = zero.measure();
  const Rat m_signed = pos.measure() + neg.measure();
  const Rat y = c * m_signed / mk;
  const Rat z = c - y;

  TrimProfile pos_profile(pos, fk, lo, hi);
  TrimProfile neg_profile(neg, fk, lo, hi);
  PiecewiseAffine f_plus = pos_profile.mass_to_integral(false);
  PiecewiseAffine f_minus = neg_profile.mass_to_integral(true);

  // Candidate t values: kinks of F+ plus preimages of kinks of F-.
  std::vector<Rat> tcands = pos_profile.masses;
  const Rat f_plus_top = eval_at_closure(f_plus, pos_profile.total_mass());
  for (std::size_t i = 0; i < neg_profile.masses.size(); ++i) {
    Rat v = -neg_profile.integrals[i];
    if (v < 0 || v > f_plus_top) continue;
    tcands.push_back(leftmost_root_on_samples(pos_profile.masses, pos_profile.integrals, v));
  }
  tcands = common_refinement({tcands});

  std::vector<Rat> hvals, phival;
  std::vector<Rat> minus_vals;
  for (const Rat& q : neg_profile.integrals) minus_vals.push_back(-q);
  for (const Rat& t : tcands) {
    Rat target = eval_at_closure(f_plus, t);
    Rat h = leftmost_root_on_samples(neg_profile.masses, minus_vals, target);
    hvals.push_back(h);
    phival.push_back(t + h);
  }
  const Rat t0 = leftmost_root_on_samples(tcands, phival, y);
  const Rat target0 = eval_at_closure(f_plus, t0);
  const Rat r0 = leftmost_root_on_samples(neg_profile.masses, minus_vals, target0);

  IntervalSet removed_pos = pos_profile.removed_at_mass(t0);
  IntervalSet removed_neg = neg_profile.removed_at_mass(r0);
  IntervalSet removed_zero;
  if (z > 0) {
    TrimProfile zero_profile(zero, fk, lo, hi);
    removed_zero = zero_profile.removed_at_mass(z);
  }

  IntervalSet e = k.subtract(removed_pos.unite(removed_neg).unite(removed_zero));

  trace.f_plus = std::move(f_plus);
  trace.f_minus = std::move(f_minus);
  trace.matching = affine_from_samples(tcands, hvals);
  trace.removed_pos = std::move(removed_pos);
  trace.removed_neg = std::move(removed_neg);
  trace.removed_zero = std::move(removed_zero);
  trace.t0 = t0;
  trace.r0 = r0;

  if (e.measure() != mk - c)
    throw structural_error("shrink_mean_zero: measure postcondition failed");
  if (integrate(fk, e) != 0)
    throw structural_error("shrink_mean_zero: integral postcondition failed");
  if (e.inf() <= lo || e.sup() >= hi)
    throw structural_error("shrink_mean_zero: endpoint exclusion failed");
  return {e, trace};
}

SplitResult rational_split(const IntervalSet& k1, const IntervalSet& k2, const StepFunction& f,
                           const Rat& eps, std::optional<Rat> declared_tolerance) {
  if (!k1.intersect(k2).empty()) throw precondition_error("rational_split: sets overlap");
  IntervalSet k = k1.unite(k2);
  const Rat total = integrate(f, k);
  if (total != 0)
    throw precondition_error("rational_split: integral is " + to_string(total) + ", not 0");

  SplitResult out;
  out.trace.declared_tolerance = declared_tolerance;
  out.trace.t0 = 0;
  out.trace.r0 = 0;

  if (k1.empty() || k2.empty()) {
    out.e = k;
    out.ratio = k1.empty() ? Rat(0) : Rat(1);
    out.trace.ratio = out.ratio;
    return out;
  }

  StepFunction fk = f.restrict_to(k);
  const bool zero_fn = step_sign_set(fk, 1).empty() && step_sign_set(fk, -1).empty();

  if (!zero_fn || eps == 0) {
    // Rational endpoints make the ratio rational outright; keep everything.
    out.e = k;
    out.ratio = k1.measure() / k.measure();
    out.trace.ratio = out.ratio;
    return out;
  }

  // f = 0 branch: E = (K1 ∩ [0, r)) ∪ K2 with a dyadic ratio. Pick the
  // smallest dyadic level with a representative in the admissible range,
  // then the largest such dyadic (least mass discarded).
  const Rat m1 = k1.measure();
  const Rat m2 = k2.measure();
  const Rat kept_min = max(Rat(0), m1 - eps);
  const Rat r_hi = m1 / (m1 + m2);
  const Rat r_lo = kept_min / (kept_min + m2);
  Rat chosen = r_hi;
  for (int level = 0;; ++level) {
    const Rat scale = Rat(BigInt(1) << level, 1);
    BigInt p = floor_int(r_hi * scale);
    Rat dy(p, BigInt(1) << level);
    if (dy >= r_lo) { chosen = dy; break; }
    if (level > 512) throw structural_error("rational_split: dyadic search failed");
  }
  if (chosen == r_hi) {
    out.e = k;
  } else {
    const Rat keep = chosen * m2 / (Rat(1) - chosen);
    const Rat r = k1.quantile(keep);
    out.e = k1.intersect(IntervalSet(k1.inf(), r)).unite(k2);
  }
  out.ratio = chosen;
  out.trace.ratio = chosen;
  if (out.e.measure() < k.measure() - eps)
    throw structural_error("rational_split: measure bound violated");
  if (out.e.intersect(k1).measure() != chosen * out.e.measure())
    throw structural_error("rational_split: ratio postcondition failed");
  return out;
}

SplitResult split_half(const IntervalSet& k, const StepFunction& f, const Rat& c,
                       std::optional<Rat> declared_tolerance) {
  if (k.empty()) throw precondition_error("split_half: empty set");
  const Rat lo = k.inf();
  const Rat hi = k.sup();
  const Rat mid = (lo + hi) / 2;
  IntervalSet left = k.intersect(IntervalSet(lo, mid));
  IntervalSet right = k.intersect(IntervalSet(mid, hi));

  SplitResult out;
  out.trace.declared_tolerance = declared_tolerance;

  if (left.empty() || right.empty()) {
    // Unreachable for canonical nonempty unions; kept so a degenerate half
    // still delegates cleanly.
    if (c <= 0 || c >= k.measure())
      throw precondition_error("split_half: c outside (0, m(K))");
    auto [e, trace] = shrink_mean_zero(k, f, c, declared_tolerance);
    out.e = std::move(e);
    out.ratio = left.empty() ? Rat(0) : Rat(1);
    out.trace = std::move(trace);
    out.trace.ratio = out.ratio;
    return out;
  }

  if (c <= 0 || c >= min(left.measure(), right.measure()))
    throw precondition_error("split_half: c = " + to_string(c) +
                             " outside (0, min of half measures)");

  SplitResult rs = rational_split(left, right, f, c / 2, declared_tolerance);
  const IntervalSet& kt = rs.e;
  const Rat delta = k.measure() - kt.measure();
  IntervalSet kt_left = kt.intersect(left);
  IntervalSet kt_right = kt.intersect(right);

  StepFunction f_left = f.restrict_to(kt_left);
  StepFunction f_right = f.restrict_to(kt_right);
  const Rat mean_left = integrate(f_left, kt_left) / kt_left.measure();
  const Rat mean_right = integrate(f_right, kt_right) / kt_right.measure();
  StepFunction h_left = f_left.add_constant(-mean_left);
  StepFunction h_right = f_right.add_constant(-mean_right);

  const Rat carve_left = rs.ratio * (c - delta);
  const Rat carve_right = (Rat(1) - rs.ratio) * (c - delta);
  auto [e_left, trace_left] = shrink_mean_zero(kt_left, h_left, carve_left, declared_tolerance);
  auto [e_right, trace_right] =
      shrink_mean_zero(kt_right, h_right, carve_right, declared_tolerance);

  out.e = e_left.unite(e_right);
  out.ratio = rs.ratio;
  out.trace = std::move(rs.trace);
  out.trace.ratio = rs.ratio;
  out.trace.removed_pos = k.subtract(out.e).intersect(left);
  out.trace.removed_neg = k.subtract(out.e).intersect(right);
  out.trace.t0 = carve_left;
  out.trace.r0 = carve_right;

  if (out.e.measure() != k.measure() - c)
    throw structural_error("split_half: measure postcondition failed");
  if (integrate(f, out.e) != 0)
    throw structural_error("split_half: integral postcondition failed");
  if (out.e.intersect(left).measure() != out.ratio * out.e.measure())
    throw structural_error("split_half: ratio postcondition failed");
  if (out.e.inf() <= lo || out.e.sup() >= hi)
    throw structural_error("split_half: endpoint exclusion failed");
  return out;
}

} // namespace coboundary
