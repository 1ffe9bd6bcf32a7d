#include "coboundary/tower.hpp"
#include "coboundary/errors.hpp"

#include <algorithm>
#include <numeric>

namespace coboundary {

namespace {

// Position of x under the packing map, accepting piece right endpoints.
Rat pack_position(const IntervalExchange& pack, const Rat& x) {
  for (const ExchangePiece& p : pack.pieces())
    if (p.src.contains(x) || p.src.hi == x) return x + p.offset();
  throw domain_mismatch_error("pack_position: " + to_string(x) + " outside base closure");
}

// Prefix integrals of a piecewise-affine function over a contiguous domain.
class IntegralTable {
public:
  explicit IntegralTable(const PiecewiseAffine& f) : f_(f) {
    Rat acc = 0;
    prefix_.push_back(acc);
    for (const AffinePiece& p : f.pieces()) {
      acc += p.slope * (p.iv.hi * p.iv.hi - p.iv.lo * p.iv.lo) / 2 + p.intercept * p.iv.length();
      prefix_.push_back(acc);
    }
  }

  // Integral from the domain start to x (x within the domain closure).
  Rat to(const Rat& x) const {
    const auto& ps = f_.pieces();
    std::size_t lo = 0, hi = ps.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (ps[mid].iv.hi <= x)
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo == ps.size()) return prefix_.back();
    const AffinePiece& p = ps[lo];
    Rat from = max(p.iv.lo, min(x, p.iv.hi));
    return prefix_[lo] + p.slope * (from * from - p.iv.lo * p.iv.lo) / 2 +
           p.intercept * (from - p.iv.lo);
  }

  Rat over(const Rat& a, const Rat& b) const { return to(b) - to(a); }

private:
  const PiecewiseAffine& f_;
  std::vector<Rat> prefix_;
};

BigInt lcm(const BigInt& a, const BigInt& b) { return a / gcd(a, b) * b; }

// Order-preserving piecewise translation between equal-measure sets.
IntervalExchange order_preserving_map(const IntervalSet& from, const IntervalSet& to) {
  if (from.measure() != to.measure())
    throw precondition_error("order_preserving_map: unequal measures");
  std::vector<ExchangePiece> pieces;
  std::size_t i = 0, j = 0;
  Rat used_from = 0, used_to = 0;
  const auto& fp = from.pieces();
  const auto& tp = to.pieces();
  while (i < fp.size() && j < tp.size()) {
    Rat rem_from = fp[i].length() - used_from;
    Rat rem_to = tp[j].length() - used_to;
    Rat step = min(rem_from, rem_to);
    pieces.push_back({Interval(fp[i].lo + used_from, fp[i].lo + used_from + step),
                      Interval(tp[j].lo + used_to, tp[j].lo + used_to + step)});
    used_from += step;
    used_to += step;
    if (used_from == fp[i].length()) { ++i; used_from = 0; }
    if (used_to == tp[j].length()) { ++j; used_to = 0; }
  }
  return IntervalExchange::from_pieces(std::move(pieces));
}

IntervalExchange cyclic_cell_exchange(const std::vector<IntervalSet>& cells,
                                      const std::vector<std::size_t>& cycle) {
  std::vector<ExchangePiece> pieces;
  for (std::size_t t = 0; t < cycle.size(); ++t) {
    const IntervalSet& from = cells[cycle[t]];
    const IntervalSet& to = cells[cycle[(t + 1) % cycle.size()]];
    IntervalExchange leg = order_preserving_map(from, to);
    pieces.insert(pieces.end(), leg.pieces().begin(), leg.pieces().end());
  }
  return IntervalExchange::from_pieces(std::move(pieces));
}

// An interior point of the set: the midpoint of its first piece. Measure
// quantiles can land exactly on a gap boundary, which half-open pieces
// exclude.
Rat interior_point(const IntervalSet& s) {
  const Interval& iv = s.pieces().front();
  return (iv.lo + iv.hi) / 2;
}

StepFunction step_on_cells(const std::vector<IntervalSet>& cells, const std::vector<Rat>& values) {
  std::vector<StepPiece> pieces;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (const Interval& iv : cells[i].pieces()) pieces.push_back({iv, values[i]});
  return StepFunction::from_pieces(std::move(pieces));
}

// Carving integrand: the step quantization of the hybrid (exact for pure
// step inputs, grid tabulation otherwise).
StepFunction carve_integrand(const HybridFunction& f, const IntervalSet& k) {
  StepFunction q = f.step_part();
  if (f.sampled_part()) q = overlay_add(q, f.sampled_part()->step_quantization());
  return q.restrict_to(k);
}

void build_exact_levels(PartitionTower& tower, const HybridFunction& f, std::size_t depth) {
  // Interface points: every position where the working function may jump or
  // where its declared continuity breaks (pack seams, step breakpoints,
  // sampled piece boundaries), in packed coordinates.
  std::vector<Rat> interfaces;
  for (const ExchangePiece& p : tower.pack.pieces()) {
    interfaces.push_back(p.dst.lo);
    interfaces.push_back(p.dst.hi);
  }
  auto add_images = [&](const std::vector<Rat>& positions) {
    for (const Rat& x : positions) {
      bool inside = false;
      for (const ExchangePiece& p : tower.pack.pieces())
        if (p.src.contains(x) || p.src.hi == x) { inside = true; break; }
      if (inside) interfaces.push_back(pack_position(tower.pack, x));
    }
  };
  add_images(breakpoints(f.step_part()));
  if (f.sampled_part()) add_images(breakpoints(f.sampled_part()->domain()));
  std::erase_if(interfaces, [&](const Rat& u) { return u <= 0 || u >= tower.length; });
  tower.interface_points = common_refinement({interfaces});

  // Level-1 branching: least common denominator aligning every interface
  // with a cell boundary; 2 when there is nothing to align.
  BigInt m0 = 1;
  for (const Rat& u : tower.interface_points) m0 = lcm(m0, denominator(Rat(u / tower.length)));
  if (m0 == 1) m0 = 2;
  if (m0 > 65536)
    throw resource_limit_error("interface alignment needs " + m0.str() +
                               " cells at level 1; denominators too large");

  const bool sampled = f.sampled_part().has_value();
  const Rat lip = sampled ? f.sampled_part()->lipschitz() : Rat(0);

  IntegralTable table(tower.working);
  std::size_t count = static_cast<std::size_t>(m0);
  for (std::size_t n = 1; n <= depth; ++n, count *= 2) {
    if (count > (std::size_t{1} << 22))
      throw resource_limit_error("tower level " + std::to_string(n) + " needs " +
                                 std::to_string(count) + " cells");
    TowerLevel level;
    level.n = n;
    level.branching = n == 1 ? static_cast<std::size_t>(m0) : 2;
    level.eps_n = 0;
    level.raw_measure = tower.length;
    level.cell_measure = tower.length / Rat(BigInt(count), 1);
    level.max_diameter = level.cell_measure;
    const Rat w = level.cell_measure;
    std::vector<StepPiece> exp_pieces;
    for (std::size_t i = 0; i < count; ++i) {
      Rat lo = w * Rat(BigInt(i), 1);
      Rat hi = w * Rat(BigInt(i + 1), 1);
      level.cells.emplace_back(lo, hi);
      level.parent.push_back(n == 1 ? 0 : i / 2);
      level.cell_values.push_back(table.over(lo, hi) / w);
      exp_pieces.push_back({Interval(lo, hi), level.cell_values.back()});
    }
    level.cond_exp = StepFunction::from_pieces(std::move(exp_pieces));
    level.residual_bound = sampled ? lip * w / 2 + tower.avg_slack : Rat(0);
    tower.levels.push_back(std::move(level));
  }

  // Alignment check: every interface sits on a level-1 cell boundary.
  for (const Rat& u : tower.interface_points)
    if (denominator(Rat(u / tower.length * Rat(m0, 1))) != 1)
      throw structural_error("interface " + to_string(u) + " not aligned at level 1");
}

void build_faithful_levels(PartitionTower& tower, const HybridFunction& f, const Rat& eps,
                           std::size_t depth) {
  const IntervalSet& k = tower.base;
  StepFunction q = carve_integrand(f, k);

  std::vector<IntervalSet> cells{k};
  for (std::size_t n = 0; n < depth; ++n) {
    const std::size_t count = cells.size();
    const Rat m_n = cells[0].measure();

    // eps_n strictly below every cap that the construction needs
    // (half the minimum).
    Rat cap = min(eps / (Rat(BigInt(1) << n, 1) * Rat(BigInt(count), 1)), m_n);
    std::vector<IntervalSet> lefts;
    for (const IntervalSet& cell : cells) {
      Rat mid = (cell.inf() + cell.sup()) / 2;
      IntervalSet left = cell.intersect(IntervalSet(cell.inf(), mid));
      IntervalSet right = cell.subtract(left);
      if (!left.empty() && !right.empty())
        cap = min(cap, min(left.measure(), right.measure()));
      lefts.push_back(std::move(left));
    }
    const Rat eps_n = cap / 2;

    // Split every cell, collect the ratios, then branch uniformly.
    std::vector<SplitResult> splits;
    BigInt m_next = 2;
    for (std::size_t a = 0; a < count; ++a) {
      StepFunction qa = q.restrict_to(cells[a]);
      Rat mean = integrate(qa, cells[a]) / cells[a].measure();
      SplitResult sr = split_half(cells[a], qa.add_constant(-mean), eps_n);
      m_next = lcm(m_next, denominator(sr.ratio));
      splits.push_back(std::move(sr));
    }
    m_next *= 2;
    if (m_next > 4096)
      throw resource_limit_error("faithful branching factor " + m_next.str() + " too large");
    const std::size_t m = static_cast<std::size_t>(m_next);

    TowerLevel level;
    level.n = n + 1;
    level.branching = m;
    level.eps_n = eps_n;
    for (std::size_t a = 0; a < count; ++a) {
      const IntervalSet& kt = splits[a].e;
      IntervalSet kt_left = kt.intersect(lefts[a]);
      IntervalSet kt_right = kt.subtract(kt_left);
      const BigInt k_a = BigInt(m) * numerator(splits[a].ratio) / denominator(splits[a].ratio);
      const std::size_t left_count = static_cast<std::size_t>(k_a);
      std::vector<IntervalSet> chunks;
      if (left_count > 0)
        for (auto& c : kt_left.equal_split(left_count)) chunks.push_back(std::move(c));
      if (m - left_count > 0)
        for (auto& c : kt_right.equal_split(m - left_count)) chunks.push_back(std::move(c));
      for (auto& c : chunks) {
        // Each chunk sits inside one half of the parent, so diameters halve.
        if (c.diameter() * 2 > cells[a].diameter())
          throw structural_error("faithful cell diameter did not halve");
        level.cells.push_back(std::move(c));
        level.parent.push_back(a);
      }
      level.carve_traces.push_back(std::move(splits[a].trace));
    }
    level.cell_measure = level.cells[0].measure();
    for (const IntervalSet& c : level.cells)
      if (c.measure() != level.cell_measure)
        throw structural_error("faithful cells have unequal measure");
    level.max_diameter = 0;
    for (const IntervalSet& c : level.cells)
      level.max_diameter = max(level.max_diameter, c.diameter());
    // Mass bookkeeping: the level keeps all but a geometric share of eps.
    level.raw_measure = level.cell_measure * Rat(BigInt(level.cells.size()), 1);
    const Rat floor = k.measure() - (Rat(1) - Rat(1, BigInt(1) << (n + 1))) * eps;
    if (level.raw_measure < floor)
      throw structural_error("faithful level lost more than the eps budget");
    cells = level.cells;
    tower.levels.push_back(std::move(level));
  }

  // Effective cells: intersect every level with the deepest union, then take
  // conditional expectations of the working function.
  IntervalSet c_deep;
  for (const IntervalSet& c : tower.levels.back().cells) c_deep = c_deep.unite(c);
  for (TowerLevel& level : tower.levels) {
    const Rat eff_measure = c_deep.measure() / Rat(BigInt(level.cells.size()), 1);
    for (std::size_t i = 0; i < level.cells.size(); ++i) {
      IntervalSet eff = level.cells[i].intersect(c_deep);
      if (eff.measure() != eff_measure)
        throw structural_error("effective cells have unequal measure");
      level.cells[i] = std::move(eff);
    }
    level.cell_measure = eff_measure;
    std::vector<StepPiece> exp_pieces;
    Rat osc = 0;
    for (const IntervalSet& cell : level.cells) {
      Rat v = integrate(tower.working, cell) / eff_measure;
      level.cell_values.push_back(v);
      for (const Interval& iv : cell.pieces()) exp_pieces.push_back({iv, v});
      PiecewiseAffine local = tower.working.restrict_to(cell);
      osc = max(osc, Rat(local.max_value() - local.min_value()));
    }
    level.cond_exp = StepFunction::from_pieces(std::move(exp_pieces));
    level.residual_bound = osc + tower.interp_slack;
  }
  // Nesting: every cell sits inside its parent.
  for (std::size_t li = 1; li < tower.levels.size(); ++li) {
    const TowerLevel& fine = tower.levels[li];
    const TowerLevel& coarse = tower.levels[li - 1];
    for (std::size_t i = 0; i < fine.cells.size(); ++i)
      if (!coarse.cells[fine.parent[i]].contains_set(fine.cells[i]))
        throw structural_error("faithful cell escapes its parent");
  }

  // Base-stage recentering: the carving preserves cell averages of the step
  // integrand, so for pure step inputs this shift is exactly zero.
  const Rat eta = integrate(tower.working, c_deep);
  tower.recenter_shift = abs(Rat(eta / c_deep.measure()));
}

} // namespace

IntervalSet PartitionTower::solved_set() const {
  if (levels.empty()) return base;
  IntervalSet u;
  for (const IntervalSet& c : levels.back().cells) u = u.unite(c);
  return u;
}

StepFunction conditional_expectation(const PiecewiseAffine& f,
                                     const std::vector<IntervalSet>& cells) {
  std::vector<StepPiece> pieces;
  for (const IntervalSet& cell : cells) {
    const Rat m = cell.measure();
    if (m == 0) throw structural_error("conditional_expectation: zero-measure cell");
    const Rat v = integrate(f, cell) / m;
    for (const Interval& iv : cell.pieces()) pieces.push_back({iv, v});
  }
  return StepFunction::from_pieces(std::move(pieces));
}

PartitionTower build_tower(const IntervalSet& k, const HybridFunction& f, const Rat& eps,
                           std::size_t depth_max, TowerMode mode) {
  if (k.empty()) throw precondition_error("build_tower: empty base");
  const std::size_t depth = depth_max == 0 ? 1 : depth_max;

  PartitionTower tower;
  tower.mode = mode;
  tower.base = k;
  tower.pack = canonical_pack(k);
  tower.length = k.measure();
  tower.interp_slack = f.interpolation_error_bound();
  tower.avg_slack = f.average_error_bound();
  tower.recenter_shift = 0;

  PiecewiseAffine restricted = f.working().restrict_to(k);
  if (!(restricted.domain() == k))
    throw precondition_error("build_tower: f does not cover the base set");
  const Rat total = integrate(restricted, k);
  if (total != 0)
    throw precondition_error("build_tower: integral over the base is " + to_string(total) +
                             ", not 0");

  if (mode == TowerMode::exact) {
    tower.working = compose_affine(restricted, invert(tower.pack));
    build_exact_levels(tower, f, depth);
  } else {
    tower.working = std::move(restricted);
    build_faithful_levels(tower, f, eps, depth);
  }
  tower.norm_lower = sup_norm(tower.working);
  return tower;
}

SolverStage base_cycle(const std::vector<Rat>& values, const std::vector<IntervalSet>& cells) {
  if (values.size() != cells.size() || cells.empty())
    throw precondition_error("base_cycle: values and cells disagree");
  Rat total = 0;
  for (const Rat& v : values) total += v;
  if (total != 0)
    throw precondition_error("base_cycle: values sum to " + to_string(total) + ", not 0");

  SolverStage stage;
  stage.k = 0;
  Permutation sigma = rearrange_zero_sum(values);
  stage.sigma0 = sigma;
  stage.cycle.assign(sigma.image().begin(), sigma.image().end());
  stage.t = cyclic_cell_exchange(cells, stage.cycle);

  std::vector<Rat> g_values(cells.size(), Rat(0));
  Rat prefix = 0;
  Rat bound = 0;
  for (std::size_t l = 0; l < stage.cycle.size(); ++l) {
    g_values[stage.cycle[l]] = prefix;
    bound = max(bound, abs(prefix));
    prefix += values[stage.cycle[l]];
  }
  stage.g = step_on_cells(cells, g_values);
  stage.h = step_on_cells(cells, values);
  stage.h_norm = 0;
  for (const Rat& v : values) stage.h_norm = max(stage.h_norm, abs(v));
  stage.g_norm = bound;
  if (stage.g_norm > stage.h_norm)
    throw structural_error("base_cycle: ||g0|| exceeds max |value|");
  stage.cyclic = true;

  // Increment identity along the cycle: consecutive g values differ by h.
  for (std::size_t l = 0; l + 1 < stage.cycle.size(); ++l) {
    const Rat& here = g_values[stage.cycle[l]];
    const Rat& next = g_values[stage.cycle[l + 1]];
    if (next - here != values[stage.cycle[l]])
      throw structural_error("base_cycle: increment mismatch");
  }
  stage.level = 0;
  return stage;
}

SolverStage extend_cycle(const SolverStage& prev, const std::vector<IntervalSet>& next_cells,
                         const std::vector<std::size_t>& ancestor_of_next,
                         const std::vector<Rat>& h_values) {
  const std::size_t n = prev.cycle.size();
  if (next_cells.size() % n != 0)
    throw precondition_error("extend_cycle: next level does not refine uniformly");
  const std::size_t m = next_cells.size() / n;

  // Children of each previous cell, in position order.
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t idx = 0; idx < next_cells.size(); ++idx)
    children[ancestor_of_next[idx]].push_back(idx);
  for (const auto& c : children)
    if (c.size() != m) throw precondition_error("extend_cycle: nonuniform branching");

  SolverStage stage;
  stage.k = prev.k + 1;

  // Matrix rows follow the previous cycle order; zero row sums are the
  // per-cell zero integrals of h.
  stage.matrix.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rat row_sum = 0;
    for (std::size_t j = 0; j < m; ++j) {
      stage.matrix[i].push_back(h_values[children[prev.cycle[i]][j]]);
      row_sum += stage.matrix[i].back();
    }
    if (row_sum != 0)
      throw precondition_error("extend_cycle: h integrates to " + to_string(row_sum) +
                               " on a previous cell");
  }

  MatrixRearrangement mr = rearrange_matrix(stage.matrix);
  stage.sigma_rows = mr.rows;
  stage.rearrange_tier = mr.max_tier;
  stage.b.assign(m, Rat(0));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) stage.b[j] += stage.matrix[i][mr.rows[i][j]];
  stage.sigma0 = rearrange_zero_sum(stage.b);

  // Column-wise scan: column sigma0(1) top to bottom, then the next column.
  for (std::size_t jj = 0; jj < m; ++jj) {
    const std::size_t col = stage.sigma0[jj];
    for (std::size_t i = 0; i < n; ++i)
      stage.cycle.push_back(children[prev.cycle[i]][mr.rows[i][col]]);
  }
  {
    std::vector<bool> seen(next_cells.size(), false);
    for (std::size_t idx : stage.cycle) {
      if (seen[idx]) throw structural_error("extend_cycle: scan is not a single cycle");
      seen[idx] = true;
    }
  }
  stage.cyclic = true;

  // Refinement condition: the image of a child lies in the image of its
  // parent under the previous stage.
  for (std::size_t t = 0; t < stage.cycle.size(); ++t) {
    const std::size_t from = stage.cycle[t];
    const std::size_t to = stage.cycle[(t + 1) % stage.cycle.size()];
    std::size_t ip = 0;
    while (prev.cycle[ip] != ancestor_of_next[from]) ++ip;
    if (ancestor_of_next[to] != prev.cycle[(ip + 1) % n])
      throw structural_error("extend_cycle: refinement condition violated");
  }

  stage.t = cyclic_cell_exchange(next_cells, stage.cycle);

  std::vector<Rat> g_values(next_cells.size(), Rat(0));
  Rat prefix = 0;
  stage.g_norm = 0;
  for (std::size_t l = 0; l < stage.cycle.size(); ++l) {
    g_values[stage.cycle[l]] = prefix;
    stage.g_norm = max(stage.g_norm, abs(prefix));
    prefix += h_values[stage.cycle[l]];
  }
  stage.g = step_on_cells(next_cells, g_values);
  stage.h = step_on_cells(next_cells, h_values);
  stage.h_norm = 0;
  for (const Rat& v : h_values) stage.h_norm = max(stage.h_norm, abs(v));
  if (stage.g_norm > 4 * stage.h_norm)
    throw structural_error("extend_cycle: ||g|| exceeds 4 ||h||");
  return stage;
}

namespace {

std::vector<std::size_t> ancestor_map(const PartitionTower& tower, std::size_t fine_level,
                                      std::size_t coarse_level) {
  std::vector<std::size_t> anc(tower.level(fine_level).cells.size());
  std::iota(anc.begin(), anc.end(), std::size_t{0});
  for (std::size_t lev = fine_level; lev > coarse_level; --lev)
    for (std::size_t i = 0; i < anc.size(); ++i) anc[i] = tower.level(lev).parent[anc[i]];
  return anc;
}

} // namespace

TowerRun solve_tower_run(const IntervalSet& k, const HybridFunction& f, const Rat& eps,
                         const Rat& delta, std::size_t depth_max, TowerMode mode) {
  if (eps <= 0) throw precondition_error("solve_tower: eps must be positive");
  if (delta <= 0) throw precondition_error("solve_tower: delta must be positive");
  const std::size_t cap = depth_max == 0 ? 24 : depth_max;

  TowerRun run;

  // Depth needed: in exact mode the per-level residual is known in closed
  // form, so size the tower before building it.
  std::size_t depth = cap;
  if (mode == TowerMode::exact) {
    if (!f.sampled_part().has_value()) {
      depth = 1;
    } else {
      PartitionTower probe = build_tower(k, f, eps, 1, mode);
      const Rat lip = f.sampled_part()->lipschitz();
      Rat w = probe.level(1).cell_measure;
      std::size_t n = 1;
      while (n < cap && lip * w / 2 + probe.avg_slack > delta) {
        w /= 2;
        ++n;
      }
      depth = n;
    }
  }
  run.tower = build_tower(k, f, eps, depth, mode);
  PartitionTower& tower = run.tower;

  auto rho = [&](std::size_t n) { return tower.level(n).residual_bound; };
  const std::size_t deepest = tower.levels.size();
  const Rat norm = tower.norm_lower;

  // Stage levels: n_k is the smallest level with rho(n) <= 2^{-k-3} eps ||f||,
  // stopping once the delta target is met (or the tower is exhausted).
  std::vector<std::size_t> stage_levels;
  bool converged = true;
  if (norm == 0) {
    std::size_t n = 1;
    while (n < deepest && rho(n) + tower.recenter_shift > delta) ++n;
    stage_levels.push_back(n);
    converged = rho(n) + tower.recenter_shift <= delta;
  } else {
    std::size_t n_prev = 0;
    for (int kk = 0;; ++kk) {
      const Rat theta = eps * norm / Rat(BigInt(1) << (kk + 3), 1);
      std::size_t n = std::max<std::size_t>(n_prev, 1);
      while (n < deepest && rho(n) > theta) ++n;
      if (rho(n) > theta) {
        // Tower exhausted before the schedule threshold.
        if (n_prev != n) stage_levels.push_back(n);
        converged = rho(n) + tower.recenter_shift <= delta;
        break;
      }
      if (n != n_prev) stage_levels.push_back(n);
      n_prev = n;
      if (rho(n) + tower.recenter_shift <= delta) break;
      if (kk > 128) throw structural_error("solve_tower: stage schedule did not terminate");
    }
  }

  // Base stage, recentered so the cell values sum to exactly zero.
  const std::size_t n0 = stage_levels.front();
  Rat base_shift = 0;
  {
    Rat sum = 0;
    for (const Rat& v : tower.level(n0).cell_values) sum += v;
    base_shift = sum / Rat(BigInt(tower.level(n0).cell_values.size()), 1);
  }
  std::vector<Rat> base_values = tower.level(n0).cell_values;
  for (Rat& v : base_values) v -= base_shift;
  run.stages.push_back(base_cycle(base_values, tower.level(n0).cells));
  run.stages.back().level = n0;

  for (std::size_t s = 1; s < stage_levels.size(); ++s) {
    const std::size_t n_before = stage_levels[s - 1];
    const std::size_t n_cur = stage_levels[s];
    const auto anc = ancestor_map(tower, n_cur, n_before);
    std::vector<Rat> h_values;
    for (std::size_t i = 0; i < tower.level(n_cur).cells.size(); ++i)
      h_values.push_back(tower.level(n_cur).cell_values[i] -
                         tower.level(n_before).cell_values[anc[i]]);
    run.stages.push_back(
        extend_cycle(run.stages.back(), tower.level(n_cur).cells, anc, h_values));
    run.stages.back().level = n_cur;
  }

  // Telescoped function and transformation on the tower coordinate.
  StepFunction g_total = run.stages.front().g;
  for (std::size_t s = 1; s < run.stages.size(); ++s)
    g_total = overlay_add(g_total, run.stages[s].g);
  const IntervalExchange& t_tower = run.stages.back().t;

  // Exact telescoped identity on every finest-stage cell.
  {
    const TowerLevel& fin = tower.level(stage_levels.back());
    for (std::size_t i = 0; i < fin.cells.size(); ++i) {
      const Rat x = interior_point(fin.cells[i]);
      const Rat lhs = g_total.value_at(t_tower.apply(x)) - g_total.value_at(x);
      if (lhs != fin.cell_values[i] - base_shift)
        throw structural_error("solve_tower: telescoped identity failed on a cell");
    }
  }

  CoboundaryCertificate cert;
  const IntervalSet solved = tower.solved_set();
  cert.f = f.restrict_to(mode == TowerMode::exact ? k : solved);
  if (mode == TowerMode::exact) {
    cert.t = compose(invert(tower.pack), compose(t_tower, tower.pack));
    cert.g = compose_affine(PiecewiseAffine::from_step(g_total), tower.pack);
  } else {
    cert.t = t_tower;
    cert.g = PiecewiseAffine::from_step(g_total);
  }
  cert.eps = eps;
  cert.residual_bound = rho(stage_levels.back()) + tower.recenter_shift;
  cert.exact = cert.residual_bound == 0;
  cert.converged = converged;
  const Rat f_norm = cert.f.sup_norm_lower();
  const Rat g_norm = sup_norm(cert.g);
  cert.norm_ratio = f_norm == 0 ? Rat(0) : g_norm / f_norm;
  if (f_norm > 0 && g_norm > (Rat(1) + eps) * f_norm)
    throw structural_error("solve_tower: ||g|| exceeds (1+eps) ||f||");
  cert.blocks.push_back({"tower", mode == TowerMode::exact ? k : solved, cert.residual_bound,
                         g_norm, cert.exact});
  for (const SolverStage& st : run.stages)
    cert.stages.push_back({st.k, st.level, st.cycle.size(), st.h_norm, st.g_norm, st.cyclic,
                           st.rearrange_tier});
  run.certificate = std::move(cert);
  return run;
}

CoboundaryCertificate solve_tower(const IntervalSet& k, const HybridFunction& f, const Rat& eps,
                                  const Rat& delta, std::size_t depth_max, TowerMode mode) {
  return solve_tower_run(k, f, eps, delta, depth_max, mode).certificate;
}

} // namespace coboundary
