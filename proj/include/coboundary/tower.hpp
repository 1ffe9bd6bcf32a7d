#ifndef COBOUNDARY_TOWER_HPP
#define COBOUNDARY_TOWER_HPP

#include "coboundary/carve.hpp"
#include "coboundary/certificate.hpp"
#include "coboundary/rearrange.hpp"

#include <vector>

namespace coboundary {

// exact: no mass is discarded; branching factors align every declared
//   discontinuity with a cell boundary, and the tower lives on the packed
//   coordinate.
// faithful: the subset-carving construction, shrinking each cell by
//   a budget eps_n and keeping the left/right mass ratio rational; the tower
//   lives on the original coordinate and its cells are interval unions.
enum class TowerMode { exact, faithful };

struct TowerLevel {
  std::size_t n = 0;         // level index, 1-based
  std::size_t branching = 0; // children per level-(n-1) cell
  std::vector<IntervalSet> cells;  // effective cells in position order
  std::vector<std::size_t> parent; // index into the previous level's cells
  Rat cell_measure;
  Rat raw_measure;           // union measure before the deep intersection
  Rat eps_n;                 // shrink budget (0 in exact mode)
  std::vector<Rat> cell_values; // conditional expectation per cell
  StepFunction cond_exp;
  Rat residual_bound;        // certified sup |f_true - cond_exp|
  Rat max_diameter;
  std::vector<CarveTrace> carve_traces; // faithful mode only
};

struct PartitionTower {
  TowerMode mode = TowerMode::exact;
  IntervalSet base;
  IntervalExchange pack; // canonical_pack(base)
  Rat length;            // measure(base)
  // The exact working function on the tower coordinate (packed for exact
  // mode, original for faithful mode).
  PiecewiseAffine working;
  std::vector<Rat> interface_points;
  std::vector<TowerLevel> levels;
  Rat interp_slack;    // sup |f_true - working|
  Rat avg_slack;       // cell-average error bound of the working function
  Rat norm_lower;      // sup |working|
  Rat recenter_shift;  // base-stage mean shift (0 unless faithful carving lost mass)

  const TowerLevel& level(std::size_t n) const { return levels.at(n - 1); }
  IntervalSet solved_set() const; // union of the deepest level's cells
};

// Cell averages of f: constant on each cell, same integral as f there.
StepFunction conditional_expectation(const PiecewiseAffine& f,
                                     const std::vector<IntervalSet>& cells);

PartitionTower build_tower(const IntervalSet& k, const HybridFunction& f, const Rat& eps,
                           std::size_t depth_max, TowerMode mode);

// One stage of the cyclic construction: a single-cycle exchange of the
// level's cells together with the prefix-sum function solving h = g∘T - g.
struct SolverStage {
  int k = 0;
  std::size_t level = 0;
  std::vector<std::size_t> cycle; // cell indices in cycle order
  IntervalExchange t;
  StepFunction g;
  StepFunction h;
  std::vector<std::vector<Rat>> matrix;
  std::vector<Permutation> sigma_rows;
  std::vector<Rat> b;
  Permutation sigma0;
  int rearrange_tier = 0;
  Rat h_norm;
  Rat g_norm;
  bool cyclic = false;
};

// First stage: order the cells by the zero-sum rearrangement of their
// values; T_0 cycles the cells, g_0 carries the prefix sums.
SolverStage base_cycle(const std::vector<Rat>& values, const std::vector<IntervalSet>& cells);

// Extension: refine the previous cycle to the next level's cells through the
// matrix rearrangement, the column sums and the column-wise scan. Guarantees
// ||g|| <= 4 ||h|| and that the new exchange refines the previous one.
SolverStage extend_cycle(const SolverStage& prev, const std::vector<IntervalSet>& next_cells,
                         const std::vector<std::size_t>& ancestor_of_next,
                         const std::vector<Rat>& h_values);

struct TowerRun {
  PartitionTower tower;
  std::vector<SolverStage> stages;
  CoboundaryCertificate certificate;
};

// Full run: tower, stage schedule meeting the 2^{-k-3} eps ||f|| thresholds,
// final certificate with residual <= delta (or converged = false when
// depth_max stops the refinement first).
TowerRun solve_tower_run(const IntervalSet& k, const HybridFunction& f, const Rat& eps,
                         const Rat& delta, std::size_t depth_max, TowerMode mode);

CoboundaryCertificate solve_tower(const IntervalSet& k, const HybridFunction& f, const Rat& eps,
                                  const Rat& delta, std::size_t depth_max,
                                  TowerMode mode = TowerMode::exact);

} // namespace coboundary

#endif
