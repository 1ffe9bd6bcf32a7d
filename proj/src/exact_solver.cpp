#include "coboundary/exact_solver.hpp"
#include "coboundary/errors.hpp"

namespace coboundary {

std::pair<IntervalExchange, PiecewiseAffine>
solve_two_level(const Rat& alpha, const Rat& beta, const IntervalSet& a, const IntervalSet& b) {
  if (alpha == 0) throw precondition_error("solve_two_level: alpha = 0 is degenerate");
  if (a.empty() || b.empty())
    throw precondition_error("solve_two_level: both sets need positive measure");
  if (!a.intersect(b).empty())
    throw precondition_error("solve_two_level: sets overlap");
  const Rat ma = a.measure();
  const Rat mb = b.measure();
  const Rat balance = alpha * ma + beta * mb;
  if (balance != 0)
    throw precondition_error("solve_two_level: weighted sum is " + to_string(balance) +
                             ", not 0");

  // Pack A then B onto [0, L); on the packed interval the problem is the
  // two-level rotation case.
  const IntervalExchange pack = pack_blocks({a, b});
  const Rat length = ma + mb;
  const Rat rot = ma / length; // rotation parameter, scaled to [0,1)

  const IntervalExchange t_packed = IntervalExchange::from_pieces({
      {Interval(ma, length), Interval(Rat(0), mb)},
      {Interval(Rat(0), ma), Interval(mb, length)},
  });

  // g(t) = c * (t/L - 1/2) with c = alpha / (1 - rot); then
  // g(T(t)) - g(t) = alpha on the packed image of A and beta on that of B.
  const Rat c = alpha / (Rat(1) - rot);
  const PiecewiseAffine g_packed = PiecewiseAffine::from_pieces(
      {{Interval(Rat(0), length), c / length, -c / 2}});

  IntervalExchange t = compose(invert(pack), compose(t_packed, pack));
  PiecewiseAffine g = compose_affine(g_packed, pack);

  // ||g|| = |c|/2 <= max(|alpha|, |beta|); a cheap exact self-check.
  if (sup_norm(g) > max(abs(alpha), abs(beta)))
    throw structural_error("solve_two_level: norm bound violated");
  return {std::move(t), std::move(g)};
}

std::vector<MassPair> pair_positive_negative(const StepFunction& f) {
  const Rat total = integrate(f, f.domain());
  if (total != 0)
    throw precondition_error("pair_positive_negative: integral is " + to_string(total) +
                             ", not 0");

  struct Chunk {
    Interval iv;
    Rat value;
  };
  std::vector<Chunk> pos, neg;
  for (const StepPiece& p : f.pieces()) {
    if (p.value > 0) pos.push_back({p.iv, p.value});
    if (p.value < 0) neg.push_back({p.iv, p.value});
  }

  std::vector<MassPair> pairs;
  std::size_t i = 0, j = 0;
  Interval pcur = pos.empty() ? Interval() : pos[0].iv;
  Interval ncur = neg.empty() ? Interval() : neg[0].iv;
  while (i < pos.size() && j < neg.size()) {
    const Rat& pv = pos[i].value;
    const Rat& nv = neg[j].value;
    Rat mass_p = pv * pcur.length();
    Rat mass_n = -nv * ncur.length();
    MassPair pair;
    pair.pos_value = pv;
    pair.neg_value = nv;
    if (mass_p <= mass_n) {
      pair.pos_set = IntervalSet(pcur);
      Rat take = mass_p / -nv; // measure of the negative side consumed
      pair.neg_set = IntervalSet(ncur.lo, ncur.lo + take);
      ncur.lo += take;
      if (++i < pos.size()) pcur = pos[i].iv;
      if (ncur.empty() && ++j < neg.size()) ncur = neg[j].iv;
    } else {
      pair.neg_set = IntervalSet(ncur);
      Rat take = mass_n / pv;
      pair.pos_set = IntervalSet(pcur.lo, pcur.lo + take);
      pcur.lo += take;
      if (++j < neg.size()) ncur = neg[j].iv;
    }
    pairs.push_back(std::move(pair));
  }
  // A zero integral forces both sides to exhaust together.
  if (i < pos.size() || j < neg.size())
    throw structural_error("pair_positive_negative: unbalanced leftover mass");
  return pairs;
}

CoboundaryCertificate solve_step(const StepFunction& f) {
  if (f.empty()) throw precondition_error("solve_step: empty domain");
  const Rat total = integrate(f, f.domain());
  if (total != 0)
    throw precondition_error("solve_step: integral is " + to_string(total) + ", not 0");

  std::vector<IntervalExchange> t_parts;
  std::vector<AffinePiece> g_pieces;

  // T = identity and g = 0 wherever f vanishes.
  IntervalSet zero_set;
  {
    std::vector<Interval> zs;
    for (const StepPiece& p : f.pieces())
      if (p.value == 0) zs.push_back(p.iv);
    zero_set = IntervalSet::from_pieces(std::move(zs));
  }
  if (!zero_set.empty()) {
    t_parts.push_back(IntervalExchange::identity(zero_set));
    for (const Interval& iv : zero_set.pieces()) g_pieces.push_back({iv, Rat(0), Rat(0)});
  }

  for (const MassPair& pair : pair_positive_negative(f)) {
    auto [t, g] = solve_two_level(pair.pos_value, pair.neg_value, pair.pos_set, pair.neg_set);
    t_parts.push_back(std::move(t));
    for (const AffinePiece& p : g.pieces()) g_pieces.push_back(p);
  }

  CoboundaryCertificate cert;
  cert.f = HybridFunction(f);
  cert.t = glue(t_parts);
  cert.g = PiecewiseAffine::from_pieces(std::move(g_pieces));
  cert.eps = 0;
  cert.exact = true;
  cert.residual_bound = 0;
  const Rat f_norm = f.empty() ? Rat(0) : sup_norm(f);
  const Rat g_norm = sup_norm(cert.g);
  cert.norm_ratio = f_norm == 0 ? Rat(0) : g_norm / f_norm;
  if (g_norm > f_norm) throw structural_error("solve_step: ||g|| exceeds ||f||");
  cert.blocks.push_back({"atomic-exact", f.domain(), Rat(0), g_norm, true});
  return cert;
}

} // namespace coboundary
