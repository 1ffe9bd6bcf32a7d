#include "coboundary/pipeline.hpp"
#include "coboundary/errors.hpp"
#include "coboundary/exact_solver.hpp"

#include <algorithm>

namespace coboundary {

namespace {

// F(r) = base + ∫_{s ∩ [inf, r)} w, the monotone cut profile; leftmost root.
Rat leftmost_integral_root(const PiecewiseAffine& w, const IntervalSet& s, const Rat& lo,
                           const Rat& hi, const Rat& base) {
  std::vector<Rat> cands{lo, hi};
  for (const Rat& x : breakpoints(s))
    if (lo <= x && x <= hi) cands.push_back(x);
  for (const Rat& x : breakpoints(w))
    if (lo <= x && x <= hi) cands.push_back(x);
  cands = common_refinement({cands});
  std::vector<Rat> values;
  for (const Rat& r : cands)
    values.push_back(base + integrate(w, s.intersect(IntervalSet(lo, r))));
  return leftmost_root_on_samples(cands, values, Rat(0));
}

DomainDecomposition decompose_core(const HybridFunction& f) {
  DomainDecomposition dec;
  const PiecewiseAffine& w = f.working();
  const IntervalSet domain = f.domain();
  const Rat lo = domain.inf();
  const Rat hi = domain.sup();

  dec.d = f.atomic_domain();
  dec.d_minus = w.negative_set().intersect(dec.d);
  dec.d_plus = dec.d.subtract(dec.d_minus);

  // C = (D+ ∩ [0, R)) ∪ D-, cut where the integral hits zero.
  dec.r_c = dec.d.empty()
                ? lo
                : leftmost_integral_root(w, dec.d_plus, lo, hi, integrate(w, dec.d_minus));
  dec.c_block = dec.d_plus.intersect(IntervalSet(lo, dec.r_c)).unite(dec.d_minus);
  dec.c1 = dec.d.subtract(dec.c_block);
  dec.c2 = domain.subtract(dec.d);
  dec.c2_minus = w.negative_set().intersect(dec.c2);
  dec.c2_plus = dec.c2.subtract(dec.c2_minus);

  // B0 = C2+ ∪ (C2- ∩ [0, R)).
  dec.r_b0 = dec.c2.empty()
                 ? lo
                 : leftmost_integral_root(w, dec.c2_minus, lo, hi, integrate(w, dec.c2_plus));
  dec.b0 = dec.c2_plus.unite(dec.c2_minus.intersect(IntervalSet(lo, dec.r_b0)));
  dec.c2_tilde = dec.c2.subtract(dec.b0);

  // Mixed blocks: one per positive atom value left in C1, in leftmost order,
  // each paired with the next stretch of the leftover negative region.
  std::vector<std::pair<Rat, IntervalSet>> layers;
  if (!dec.c1.empty()) {
    for (auto& [value, set] : atoms(f.step_part().restrict_to(dec.c1)))
      layers.emplace_back(value, set);
    std::sort(layers.begin(), layers.end(), [](const auto& a, const auto& b) {
      return a.second.inf() < b.second.inf();
    });
  }
  Rat cursor = lo;
  for (auto& [value, set] : layers) {
    MixedBlock block;
    block.a = set;
    block.y = value;
    block.r_lo = cursor;
    if (value == 0) {
      block.r_hi = cursor;
    } else {
      block.r_hi =
          leftmost_integral_root(w, dec.c2_tilde.intersect(IntervalSet(cursor, hi)), cursor, hi,
                                 Rat(value * set.measure()));
      block.b = dec.c2_tilde.intersect(IntervalSet(cursor, block.r_hi));
      cursor = block.r_hi;
    }
    dec.blocks.push_back(std::move(block));
  }
  // The paired windows must exhaust the leftover negative region.
  IntervalSet leftover = dec.c2_tilde;
  for (const MixedBlock& b : dec.blocks) leftover = leftover.subtract(b.b);
  if (!leftover.empty()) {
    if (leftover.measure() != 0)
      throw structural_error("decompose_domain: unpaired negative mass of measure " +
                             to_string(leftover.measure()));
  }

  // Exact partition check.
  IntervalSet reunion = dec.c_block.unite(dec.b0);
  for (const MixedBlock& b : dec.blocks) reunion = reunion.unite(b.a).unite(b.b);
  if (!(reunion == domain))
    throw structural_error("decompose_domain: blocks do not tile the domain");

  // Every block is mean zero for the working function.
  if (!dec.c_block.empty() && integrate(w, dec.c_block) != 0)
    throw structural_error("decompose_domain: atomic block is not mean zero");
  if (!dec.b0.empty() && integrate(w, dec.b0) != 0)
    throw structural_error("decompose_domain: atom-free block is not mean zero");
  for (const MixedBlock& b : dec.blocks)
    if (integrate(w, b.a.unite(b.b)) != 0)
      throw structural_error("decompose_domain: mixed block is not mean zero");
  return dec;
}

} // namespace

std::pair<HybridFunction, Rat> renormalize_mean(const HybridFunction& f) {
  const Rat total = integrate(f.working(), f.domain());
  if (total == 0) return {f, Rat(0)};
  if (!f.sampled_part())
    throw precondition_error("solve_full: step input has nonzero integral " + to_string(total));
  const SampledFunction& s = *f.sampled_part();
  const Rat shift = total / s.domain().measure();
  std::vector<Rat> values = s.values();
  for (Rat& v : values) v -= shift;
  HybridFunction adjusted(f.step_part(),
                          SampledFunction(s.domain(), s.grid(), std::move(values), s.lipschitz()));
  return {std::move(adjusted), abs(shift)};
}

DomainDecomposition decompose_domain(const HybridFunction& f) {
  auto [fn, shift] = renormalize_mean(f);
  const Rat d_mass = fn.atomic_domain().empty()
                         ? Rat(0)
                         : integrate(fn.working(), fn.atomic_domain());
  // Sign convention: work with -f when the atomic mass is negative.
  DomainDecomposition dec =
      d_mass < 0 ? decompose_core(fn.negate()) : decompose_core(fn);
  dec.negated = d_mass < 0;
  dec.renormalization_shift = shift;
  return dec;
}

PipelineRun solve_full_run(const HybridFunction& f, const Rat& eps, const Rat& delta,
                           std::size_t depth_max, TowerMode mode) {
  if (f.domain().empty()) throw precondition_error("solve_full: empty domain");
  auto [fn, shift] = renormalize_mean(f);

  const IntervalSet atomic = fn.atomic_domain();
  const Rat d_mass = atomic.empty() ? Rat(0) : integrate(fn.working(), atomic);
  if (d_mass < 0) {
    // Solve -f and negate g: f = (-g)∘T - (-g).
    PipelineRun run = solve_full_run(fn.negate(), eps, delta, depth_max, mode);
    run.certificate.g = run.certificate.g.negate();
    run.certificate.f = fn;
    run.decomposition.negated = true;
    run.decomposition.renormalization_shift = shift;
    return run;
  }

  PipelineRun run;
  run.decomposition = decompose_core(fn);
  run.decomposition.renormalization_shift = shift;
  const DomainDecomposition& dec = run.decomposition;

  std::vector<IntervalExchange> t_parts;
  std::vector<AffinePiece> g_pieces;
  CoboundaryCertificate cert;
  cert.exact = true;
  cert.converged = true;
  cert.residual_bound = 0;

  auto absorb = [&](CoboundaryCertificate&& block_cert, const std::string& kind,
                    const IntervalSet& set) {
    t_parts.push_back(std::move(block_cert.t));
    for (const AffinePiece& p : block_cert.g.pieces()) g_pieces.push_back(p);
    cert.exact = cert.exact && block_cert.exact;
    cert.converged = cert.converged && block_cert.converged;
    cert.residual_bound = max(cert.residual_bound, block_cert.residual_bound);
    cert.blocks.push_back({kind, set, block_cert.residual_bound, sup_norm(block_cert.g),
                           block_cert.exact});
    for (const StageSummary& st : block_cert.stages) cert.stages.push_back(st);
  };

  if (!dec.c_block.empty())
    absorb(solve_step(fn.step_part().restrict_to(dec.c_block)), "atomic-exact", dec.c_block);

  if (!dec.b0.empty()) {
    run.tower_runs.push_back(solve_tower_run(dec.b0, fn, eps, delta, depth_max, mode));
    absorb(CoboundaryCertificate(run.tower_runs.back().certificate), "tower", dec.b0);
  }

  for (const MixedBlock& block : dec.blocks) {
    IntervalSet support = block.a.unite(block.b);
    if (block.y == 0 || block.b.empty()) {
      // Degenerate atom: f vanishes (or has no partner); identity block.
      t_parts.push_back(IntervalExchange::identity(support));
      for (const Interval& iv : support.pieces()) g_pieces.push_back({iv, Rat(0), Rat(0)});
      cert.blocks.push_back({"identity", support, Rat(0), Rat(0), true});
      continue;
    }
    run.tower_runs.push_back(solve_tower_run(support, fn, eps, delta, depth_max, mode));
    absorb(CoboundaryCertificate(run.tower_runs.back().certificate), "tower", support);
  }

  cert.f = fn;
  cert.t = glue(t_parts);
  cert.g = PiecewiseAffine::from_pieces(std::move(g_pieces));
  cert.eps = eps;
  const Rat f_norm = fn.sup_norm_lower();
  const Rat g_norm = cert.g.empty() ? Rat(0) : sup_norm(cert.g);
  cert.norm_ratio = f_norm == 0 ? Rat(0) : g_norm / f_norm;
  if (f_norm > 0 && g_norm > (Rat(1) + eps) * f_norm)
    throw structural_error("solve_full: ||g|| exceeds (1+eps) ||f||");

  // The glued map must cover the whole domain measure-preservingly.
  if (!(cert.t.domain() == fn.domain()) || !(cert.t.range() == fn.domain()))
    throw structural_error("solve_full: glued exchange does not cover the domain");

  run.certificate = std::move(cert);
  return run;
}

CoboundaryCertificate solve_full(const HybridFunction& f, const Rat& eps, const Rat& delta,
                                 std::size_t depth_max, TowerMode mode) {
  return solve_full_run(f, eps, delta, depth_max, mode).certificate;
}

} // namespace coboundary
