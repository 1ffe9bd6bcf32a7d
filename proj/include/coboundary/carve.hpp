#ifndef COBOUNDARY_CARVE_HPP
#define COBOUNDARY_CARVE_HPP

#include "coboundary/piecewise.hpp"

#include <optional>
#include <utility>

namespace coboundary {

// Record of one carving run: the monotone mass-to-integral profiles, the
// matching function, the removed sets and the solved parameters. Exact for
// step integrands; sampled integrands enter through their step quantization
// (the tabulated form), with the declared tolerance carried along.
struct CarveTrace {
  PiecewiseAffine f_plus;   // integral removed from {f > 0} as a function of trimmed mass
  PiecewiseAffine f_minus;  // likewise for {f < 0}, negated to be nondecreasing
  PiecewiseAffine matching; // H with f_minus(H(t)) = f_plus(t)
  IntervalSet removed_pos;
  IntervalSet removed_neg;
  IntervalSet removed_zero; // trimmed share of a positive-measure zero set
  Rat t0;                   // mass trimmed from the positive side
  Rat r0;                   // mass trimmed from the negative side (carve: the cut position)
  std::optional<Rat> ratio; // left-mass ratio realized by the splits
  bool negated = false;     // mechanism ran on -f
  std::optional<Rat> declared_tolerance;
};

// Shrinks E ⊆ D to K ⊆ E with an exactly zero integral, removing only a
// left-filtered part of {f > ||f+||/2} (or its mirror under negation).
// Requires ∫_D f = 0, m(E) >= m(D) - eps and eps within the admissible
// threshold; guarantees m(K) >= m(D) - (1 + 2||f|| max(1/||f+||, 1/||f-||)) eps.
std::pair<IntervalSet, CarveTrace>
carve_mean_zero(const IntervalSet& d, const StepFunction& f, const IntervalSet& e,
                const Rat& eps, std::optional<Rat> declared_tolerance = std::nullopt);

// Removes exactly mass c from K, keeping the integral zero and excluding
// inf K and sup K: balanced trims from the outer ends of {f > 0} and
// {f < 0} (zero sets are depth-trimmed with a proportional budget share).
std::pair<IntervalSet, CarveTrace>
shrink_mean_zero(const IntervalSet& k, const StepFunction& f, const Rat& c,
                 std::optional<Rat> declared_tolerance = std::nullopt);

struct SplitResult {
  IntervalSet e;
  Rat ratio; // m(E ∩ K1) / m(E), exact; p = numerator, q = denominator
  CarveTrace trace;
};

// Finds E ⊆ K1 ∪ K2 with m(E) >= m(K) - eps, zero integral and a rational
// left-mass ratio. With rational endpoints the ratio is automatic; the
// f = 0 branch picks a dyadic ratio directly.
SplitResult rational_split(const IntervalSet& k1, const IntervalSet& k2, const StepFunction& f,
                           const Rat& eps, std::optional<Rat> declared_tolerance = std::nullopt);

// Midpoint split: carves exactly mass c from K so that the ratio of mass
// left of (inf K + sup K)/2 is exactly p/q, the endpoints are excluded and
// the integral stays zero. Applies rational_split with budget c/2, then
// shrink_mean_zero on each half against the recentered restrictions.
SplitResult split_half(const IntervalSet& k, const StepFunction& f, const Rat& c,
                       std::optional<Rat> declared_tolerance = std::nullopt);

} // namespace coboundary

#endif
