#ifndef COBOUNDARY_PIPELINE_HPP
#define COBOUNDARY_PIPELINE_HPP

#include "coboundary/certificate.hpp"
#include "coboundary/tower.hpp"

#include <vector>

namespace coboundary {

// One positive atom paired with a negative atom-free stretch: f = y on a,
// negative on b, mean zero on a ∪ b up to the recorded imbalance.
struct MixedBlock {
  IntervalSet a;
  IntervalSet b;
  Rat y;
  Rat r_lo; // [r_lo, r_hi) window cut from the leftover negative region
  Rat r_hi;
  Rat imbalance; // exact ∫ f over a ∪ b; 0 unless the cut needed bisection
};

struct DomainDecomposition {
  bool negated = false;     // the decomposition describes -f
  Rat renormalization_shift; // quadrature mean removed from the sampled part
  IntervalSet d;            // atomic support
  IntervalSet d_plus, d_minus;
  Rat r_c;                  // cut making the countably-valued block mean zero
  IntervalSet c_block;
  IntervalSet c1, c2, c2_plus, c2_minus;
  IntervalSet b0;
  Rat r_b0;
  IntervalSet c2_tilde;
  std::vector<MixedBlock> blocks;
};

// Splits the domain into the atomic block C, the atom-free block B0 and the
// mixed blocks A_i ∪ B_i, each exactly mean zero for the working function.
DomainDecomposition decompose_domain(const HybridFunction& f);

// Subtracts the exact quadrature mean from the sampled part when the total
// integral is nonzero (rejects pure step inputs with nonzero mean). Returns
// the adjusted function and the shift magnitude.
std::pair<HybridFunction, Rat> renormalize_mean(const HybridFunction& f);

struct PipelineRun {
  DomainDecomposition decomposition;
  std::vector<TowerRun> tower_runs;
  CoboundaryCertificate certificate;
};

// Full assembly: decompose, solve the atomic block exactly, run towers on
// the atom-free and mixed blocks, glue one certificate.
PipelineRun solve_full_run(const HybridFunction& f, const Rat& eps, const Rat& delta,
                           std::size_t depth_max = 0, TowerMode mode = TowerMode::exact);

CoboundaryCertificate solve_full(const HybridFunction& f, const Rat& eps, const Rat& delta,
                                 std::size_t depth_max = 0, TowerMode mode = TowerMode::exact);

} // namespace coboundary

#endif
