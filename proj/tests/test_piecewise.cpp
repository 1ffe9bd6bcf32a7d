#include <doctest.h>

#include "coboundary/errors.hpp"
#include "coboundary/piecewise.hpp"
#include "test_util.hpp"

#include <random>

using namespace coboundary;
using namespace coboundary::testutil;

namespace {
StepFunction two_thirds_example() {
  return StepFunction::from_pieces(
      {{iv(0, 1, 1, 3), Rat(2, 3)}, {iv(1, 3, 1, 1), Rat(-1, 3)}});
}
} // namespace

TEST_CASE("integrate on step functions") {
  StepFunction f = two_thirds_example();
  CHECK(integrate(f, f.domain()) == 0);
  CHECK(integrate(f, IntervalSet()) == 0);
  StepFunction g = StepFunction::from_pieces(
      {{iv(0, 1, 1, 2), Rat(1)}, {iv(1, 2, 1, 1), Rat(0)}});
  CHECK(integrate(g, IntervalSet(Rat(1, 4), Rat(3, 4))) == Rat(1, 4));
  CHECK_THROWS_AS(integrate(f, IntervalSet(Rat(0), Rat(2))), domain_mismatch_error);
}

TEST_CASE("sup_norm on step and affine functions") {
  CHECK(sup_norm(two_thirds_example()) == Rat(2, 3));
  PiecewiseAffine g =
      PiecewiseAffine::from_pieces({{iv(0, 1, 1, 1), Rat(1), Rat(-1, 2)}});
  CHECK(sup_norm(g) == Rat(1, 2)); // evaluated over the closure
  StepFunction z = StepFunction::constant(IntervalSet(Rat(0), Rat(1)), Rat(0));
  CHECK(sup_norm(z) == 0);
  CHECK_THROWS_AS(sup_norm(StepFunction()), precondition_error);
}

TEST_CASE("common refinement") {
  auto r = common_refinement({{Rat(0), Rat(1, 3), Rat(1)}, {Rat(0), Rat(1, 2), Rat(1)}});
  CHECK(r == std::vector<Rat>{Rat(0), Rat(1, 3), Rat(1, 2), Rat(1)});
  auto solo = common_refinement({{Rat(0), Rat(1)}});
  CHECK(solo == std::vector<Rat>{Rat(0), Rat(1)});
  auto dup = common_refinement({{Rat(0), Rat(1)}, {Rat(0), Rat(1)}});
  CHECK(dup == std::vector<Rat>{Rat(0), Rat(1)});
}

TEST_CASE("atoms reads off level sets and partitions the domain") {
  StepFunction f = StepFunction::from_pieces(
      {{iv(0, 1, 1, 4), Rat(3, 4)}, {iv(1, 4, 1, 1), Rat(-1, 4)}});
  auto a = atoms(f);
  REQUIRE(a.size() == 2);
  CHECK(a[0].first == Rat(-1, 4));
  CHECK(a[0].second == IntervalSet(Rat(1, 4), Rat(1)));
  CHECK(a[1].first == Rat(3, 4));
  CHECK(a[1].second == IntervalSet(Rat(0), Rat(1, 4)));

  StepFunction zero = StepFunction::constant(IntervalSet(Rat(0), Rat(1)), Rat(0));
  auto az = atoms(zero);
  REQUIRE(az.size() == 1);
  CHECK(az[0].second == IntervalSet(Rat(0), Rat(1)));

  StepFunction scattered = StepFunction::from_pieces({{iv(0, 1, 1, 4), Rat(1)},
                                                      {iv(1, 4, 1, 2), Rat(0)},
                                                      {iv(1, 2, 3, 4), Rat(1)},
                                                      {iv(3, 4, 1, 1), Rat(0)}});
  auto as = atoms(scattered);
  REQUIRE(as.size() == 2);
  CHECK(as[1].second == IntervalSet::from_pieces({iv(0, 1, 1, 4), iv(1, 2, 3, 4)}));
}

TEST_CASE("atoms value-weighted measures sum to the integral") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    StepFunction f = random_mean_zero_step(rng, 12);
    Rat sum = 0;
    IntervalSet covered;
    for (const auto& [value, set] : atoms(f)) {
      sum += value * set.measure();
      covered = covered.unite(set);
    }
    CHECK(sum == integrate(f, f.domain()));
    CHECK(covered == f.domain());
  }
}

TEST_CASE("integrate is additive over disjoint sets") {
  std::mt19937_64 rng(999);
  for (int trial = 0; trial < 100; ++trial) {
    StepFunction f = random_mean_zero_step(rng, 10);
    IntervalSet s1 = random_interval_set(rng, 4).intersect(f.domain());
    IntervalSet s2 = random_interval_set(rng, 4).intersect(f.domain()).subtract(s1);
    CHECK(integrate(f, s1.unite(s2)) == integrate(f, s1) + integrate(f, s2));
    CHECK(abs(integrate(f, s1)) <= sup_norm(f) * s1.measure());
  }
}

TEST_CASE("piecewise affine evaluation, restriction and sign sets") {
  PiecewiseAffine g = PiecewiseAffine::from_pieces(
      {{iv(0, 1, 1, 2), Rat(2), Rat(-1, 2)}, {iv(1, 2, 1, 1), Rat(0), Rat(1, 4)}});
  CHECK(g.eval(Rat(1, 4)) == 0);
  CHECK(g.eval(Rat(3, 4)) == Rat(1, 4));
  CHECK_THROWS_AS(g.eval(Rat(2)), domain_mismatch_error);
  CHECK(g.positive_set() == IntervalSet(Rat(1, 4), Rat(1)));
  CHECK(g.negative_set() == IntervalSet(Rat(0), Rat(1, 4)));
  CHECK(g.zero_set().empty());
  CHECK(g.restrict_to(IntervalSet(Rat(0), Rat(1, 8))).domain() ==
        IntervalSet(Rat(0), Rat(1, 8)));
  CHECK(integrate(g, IntervalSet(Rat(0), Rat(1, 2))) == Rat(0));
}

TEST_CASE("overlay_add sums where domains overlap") {
  StepFunction a = StepFunction::constant(IntervalSet(Rat(0), Rat(1)), Rat(1));
  StepFunction b = StepFunction::constant(IntervalSet(Rat(1, 2), Rat(1)), Rat(2));
  StepFunction sum = overlay_add(a, b);
  CHECK(sum.value_at(Rat(1, 4)) == 1);
  CHECK(sum.value_at(Rat(3, 4)) == 3);
}

TEST_CASE("sampled function interpolant and quantization") {
  SampledFunction s(IntervalSet(Rat(0), Rat(1)),
                    {Rat(0), Rat(1, 2), Rat(1)},
                    {Rat(-1, 2), Rat(0), Rat(1, 2)}, Rat(1));
  PiecewiseAffine lin = s.interpolant();
  CHECK(lin.eval(Rat(1, 4)) == Rat(-1, 4));
  CHECK(integrate(lin, IntervalSet(Rat(0), Rat(1))) == 0);
  CHECK(s.max_spacing() == Rat(1, 2));
  StepFunction q = s.step_quantization();
  CHECK(q.value_at(Rat(1, 4)) == Rat(-1, 2));

  SampledFunction cut = s.restrict_to(IntervalSet(Rat(1, 4), Rat(3, 4)));
  CHECK(cut.domain() == IntervalSet(Rat(1, 4), Rat(3, 4)));
  CHECK(cut.interpolant().eval(Rat(1, 2)) == 0);
  CHECK(cut.values().front() == Rat(-1, 4));
}

TEST_CASE("sampled function validation") {
  CHECK_THROWS_AS(SampledFunction(IntervalSet(Rat(0), Rat(1)), {Rat(0), Rat(1)},
                                  {Rat(0), Rat(5)}, Rat(1)),
                  precondition_error); // modulus violated by samples
  CHECK_THROWS_AS(SampledFunction(IntervalSet(Rat(0), Rat(1)), {Rat(0), Rat(1, 2)},
                                  {Rat(0), Rat(0)}, Rat(1)),
                  precondition_error); // endpoint 1 missing from grid
}

TEST_CASE("hybrid working function overlays step and sampled parts") {
  StepFunction step = StepFunction::constant(IntervalSet(Rat(0), Rat(1, 2)), Rat(1, 4));
  SampledFunction samp(IntervalSet(Rat(1, 2), Rat(1)), {Rat(1, 2), Rat(1)},
                       {Rat(-1, 4), Rat(-1, 4)}, Rat(1));
  HybridFunction h(step, samp);
  CHECK(h.domain() == IntervalSet(Rat(0), Rat(1)));
  CHECK(h.atomic_domain() == IntervalSet(Rat(0), Rat(1, 2)));
  CHECK(h.working().eval(Rat(1, 4)) == Rat(1, 4));
  CHECK(h.working().eval(Rat(3, 4)) == Rat(-1, 4));
  CHECK(h.sup_norm_lower() == Rat(1, 4));
  CHECK(integrate(h.working(), h.domain()) == 0);
}
