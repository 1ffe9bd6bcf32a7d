#ifndef COBOUNDARY_EXACT_SOLVER_HPP
#define COBOUNDARY_EXACT_SOLVER_HPP

#include "coboundary/certificate.hpp"

#include <utility>
#include <vector>

namespace coboundary {

// A mass-balanced pair of level sets: pos_value * m(pos_set) exactly cancels
// neg_value * m(neg_set).
struct MassPair {
  IntervalSet pos_set;
  IntervalSet neg_set;
  Rat pos_value; // > 0
  Rat neg_value; // < 0
};

// Solves g∘T - g = alpha on A, beta on B for a two-valued balanced pair:
// pack A then B onto [0, L), rotate by m(A), take the affine
// g(t) = (alpha / (1 - m(A)/L)) * (t/L - 1/2), and pull both back.
// ||g|| <= max(|alpha|, |beta|) exactly. T is an exchange of A ∪ B.
std::pair<IntervalExchange, PiecewiseAffine>
solve_two_level(const Rat& alpha, const Rat& beta, const IntervalSet& a, const IntervalSet& b);

// Greedy two-pointer sweep pairing the leftmost unconsumed positive piece
// against the leftmost unconsumed negative piece, splitting the heavier
// side. Pairs are disjoint, exactly balanced, and cover {f != 0}.
std::vector<MassPair> pair_positive_negative(const StepFunction& f);

// Exact coboundary decomposition of a finite-valued mean-zero step function:
// identity with g = 0 on {f = 0}, a glued two-level solution on each mass
// pair. ||g|| <= ||f|| exactly; the certificate is exact (residual 0).
CoboundaryCertificate solve_step(const StepFunction& f);

} // namespace coboundary

#endif
