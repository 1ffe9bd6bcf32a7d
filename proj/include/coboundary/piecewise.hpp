#ifndef COBOUNDARY_PIECEWISE_HPP
#define COBOUNDARY_PIECEWISE_HPP

#include "coboundary/interval.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace coboundary {

// ---------------------------------------------------------------------------
// Step functions

struct StepPiece {
  Interval iv;
  Rat value;
  bool operator==(const StepPiece& o) const { return iv == o.iv && value == o.value; }
};

// Piecewise-constant function on a finite interval union. Canonical form:
// pieces sorted, disjoint, adjacent equal-value pieces merged.
class StepFunction {
public:
  StepFunction() = default;

  // Pieces must be pairwise disjoint; overlaps throw. Adjacent equal values merge.
  static StepFunction from_pieces(std::vector<StepPiece> pieces);
  static StepFunction constant(const IntervalSet& domain, const Rat& value);

  const std::vector<StepPiece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  IntervalSet domain() const;

  Rat value_at(const Rat& x) const; // domain_mismatch_error outside

  StepFunction restrict_to(const IntervalSet& s) const;
  StepFunction add_constant(const Rat& c) const;
  StepFunction scale(const Rat& c) const;
  StepFunction negate() const { return scale(Rat(-1)); }

  bool operator==(const StepFunction& o) const { return pieces_ == o.pieces_; }

private:
  std::vector<StepPiece> pieces_;
};

// Pointwise sum on the union of domains (value of the single function where
// only one is defined).
StepFunction overlay_add(const StepFunction& a, const StepFunction& b);
StepFunction subtract_on_common_domain(const StepFunction& a, const StepFunction& b);

// ---------------------------------------------------------------------------
// Piecewise-affine functions

struct AffinePiece {
  Interval iv;
  Rat slope;
  Rat intercept; // value(x) = slope * x + intercept
  Rat value_at(const Rat& x) const { return slope * x + intercept; }
  bool operator==(const AffinePiece& o) const {
    return iv == o.iv && slope == o.slope && intercept == o.intercept;
  }
};

class PiecewiseAffine {
public:
  PiecewiseAffine() = default;

  static PiecewiseAffine from_pieces(std::vector<AffinePiece> pieces);
  static PiecewiseAffine from_step(const StepFunction& f);
  static PiecewiseAffine zero(const IntervalSet& domain);

  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }
  IntervalSet domain() const;

  Rat eval(const Rat& x) const;
  const AffinePiece& piece_at(const Rat& x) const;

  PiecewiseAffine restrict_to(const IntervalSet& s) const;
  PiecewiseAffine add_constant(const Rat& c) const;
  PiecewiseAffine scale(const Rat& c) const;
  PiecewiseAffine negate() const { return scale(Rat(-1)); }

  // Exact sign partition of the domain (boundary roots, a null set, are
  // attributed to the closed side so the three sets tile the domain).
  IntervalSet positive_set() const; // {f > 0} up to finitely many points
  IntervalSet negative_set() const; // {f < 0} up to finitely many points
  IntervalSet zero_set() const;     // pieces identically zero

  Rat min_value() const; // over the closure; error when empty
  Rat max_value() const;

  bool operator==(const PiecewiseAffine& o) const { return pieces_ == o.pieces_; }

private:
  std::vector<AffinePiece> pieces_;
};

PiecewiseAffine overlay_add(const PiecewiseAffine& a, const PiecewiseAffine& b);

// Evaluation that also accepts right endpoints of pieces (left limit).
Rat eval_at_closure(const PiecewiseAffine& f, const Rat& x);

// Leftmost x with F(x) == target for a monotone piecewise-affine F given by
// its values ys at the sorted sample points xs. Throws structural_error when
// the target is never attained.
Rat leftmost_root_on_samples(const std::vector<Rat>& xs, const std::vector<Rat>& ys,
                             const Rat& target);

// Piecewise-affine function through the sample points (x_i, y_i), linear on
// each [x_i, x_{i+1}). xs must be nondecreasing; duplicate xs must carry
// equal ys and collapse.
PiecewiseAffine affine_from_samples(std::vector<Rat> xs, std::vector<Rat> ys);

// ---------------------------------------------------------------------------
// Shared operations

Rat integrate(const StepFunction& f, const IntervalSet& s);
Rat integrate(const PiecewiseAffine& f, const IntervalSet& s);

Rat sup_norm(const StepFunction& f);
Rat sup_norm(const PiecewiseAffine& f);

// Sorted deduplicated union of breakpoint sets; consecutive pairs are the
// refinement atoms.
std::vector<Rat> common_refinement(const std::vector<std::vector<Rat>>& sources);

std::vector<Rat> breakpoints(const StepFunction& f);
std::vector<Rat> breakpoints(const PiecewiseAffine& f);
std::vector<Rat> breakpoints(const IntervalSet& s);

// Level sets of positive measure: (value, level set) sorted by value; the
// sets partition the domain.
std::vector<std::pair<Rat, IntervalSet>> atoms(const StepFunction& f);

// Points where the function jumps: piece boundaries whose one-sided values
// disagree, plus boundaries adjacent to gaps in the domain.
std::vector<Rat> discontinuities(const PiecewiseAffine& f);

// ---------------------------------------------------------------------------
// Sampled functions

// A function known only at rational grid points, with a caller-declared
// modulus of continuity omega(d) = lipschitz * d (omega(0) = 0 by shape).
// Continuity is an input contract; it is never inferred.
class SampledFunction {
public:
  SampledFunction(IntervalSet domain, std::vector<Rat> grid, std::vector<Rat> values,
                  Rat lipschitz);

  const IntervalSet& domain() const { return domain_; }
  const std::vector<Rat>& grid() const { return grid_; }
  const std::vector<Rat>& values() const { return values_; }
  const Rat& lipschitz() const { return lipschitz_; }

  // Piecewise-linear interpolant through the samples, per domain piece. This
  // is the exact working object; it deviates from the true function by at
  // most lipschitz * max_spacing / 2 in sup norm.
  PiecewiseAffine interpolant() const;

  // Left-sample step function on the grid cells: the tabulated form used by
  // the carving operations, off the true function by at most lipschitz * spacing.
  StepFunction step_quantization() const;

  Rat max_spacing() const;

  SampledFunction restrict_to(const IntervalSet& s) const;
  SampledFunction negate() const;

private:
  IntervalSet domain_;
  std::vector<Rat> grid_;
  std::vector<Rat> values_;
  Rat lipschitz_;
};

// ---------------------------------------------------------------------------
// Hybrid functions

// f = step_part everywhere on its pieces, plus sampled_part where sampled.
// The atomic region is domain \ sampled_domain: there f is finite-valued.
// The sampled part is declared atom-free by the caller.
class HybridFunction {
public:
  HybridFunction() = default;
  explicit HybridFunction(StepFunction step);
  explicit HybridFunction(SampledFunction sampled);
  HybridFunction(StepFunction step, std::optional<SampledFunction> sampled);

  const StepFunction& step_part() const { return step_; }
  const std::optional<SampledFunction>& sampled_part() const { return sampled_; }

  IntervalSet domain() const;
  IntervalSet sampled_domain() const;
  IntervalSet atomic_domain() const;
  bool pure_step() const { return !sampled_.has_value(); }

  // Exact piecewise-affine overlay of step part and interpolant, built at
  // construction. All pipeline decisions and integrals run on this object.
  const PiecewiseAffine& working() const { return working_; }

  // Exact sup of the working function: equals the true essential sup for
  // pure step inputs and is a certified lower bound otherwise.
  Rat sup_norm_lower() const;

  // sup |f_true - working| over the sampled region (lipschitz*h/2; 0 if pure step).
  Rat interpolation_error_bound() const;
  // Bound on |cell-average of f_true - cell-average of working| (lipschitz*h/4).
  Rat average_error_bound() const;

  HybridFunction restrict_to(const IntervalSet& s) const;
  HybridFunction negate() const;

private:
  StepFunction step_;
  std::optional<SampledFunction> sampled_;
  PiecewiseAffine working_;
};

} // namespace coboundary

#endif
