#include <doctest.h>

#include "coboundary/errors.hpp"
#include "coboundary/exact_solver.hpp"
#include "test_util.hpp"

#include <random>

using namespace coboundary;
using namespace coboundary::testutil;

namespace {

// Independent identity check on a refinement fine enough for all parties.
void check_identity_exact(const StepFunction& f, const IntervalExchange& t,
                          const PiecewiseAffine& g) {
  std::vector<Rat> cuts = breakpoints(f);
  for (const auto& p : t.pieces()) {
    cuts.push_back(p.src.lo);
    cuts.push_back(p.src.hi);
  }
  for (const auto& p : g.pieces()) {
    cuts.push_back(p.iv.lo);
    cuts.push_back(p.iv.hi);
  }
  // preimages of g breakpoints
  IntervalExchange tinv = invert(t);
  for (const auto& p : g.pieces())
    if (tinv.domain().contains(p.iv.lo)) cuts.push_back(tinv.apply(p.iv.lo));
  cuts = common_refinement({cuts});
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Rat mid = (cuts[i] + cuts[i + 1]) / 2;
    if (!f.domain().contains(mid)) continue;
    Rat lhs = g.eval(t.apply(mid)) - g.eval(mid);
    CHECK(lhs == f.value_at(mid));
  }
}

} // namespace

TEST_CASE("solve_two_level rotation case") {
  auto [t, g] = solve_two_level(Rat(2, 3), Rat(-1, 3), IntervalSet(Rat(0), Rat(1, 3)),
                                IntervalSet(Rat(1, 3), Rat(1)));
  CHECK(t == rotation(Rat(1, 3)));
  CHECK(g.eval(Rat(2, 3)) - g.eval(Rat(0)) == Rat(2, 3));
  CHECK(g == PiecewiseAffine::from_pieces({{iv(0, 1, 1, 1), Rat(1), Rat(-1, 2)}}));
}

TEST_CASE("solve_two_level symmetric case") {
  auto [t, g] = solve_two_level(Rat(1), Rat(-1), IntervalSet(Rat(0), Rat(1, 2)),
                                IntervalSet(Rat(1, 2), Rat(1)));
  CHECK(t == rotation(Rat(1, 2)));
  CHECK(sup_norm(g) == Rat(1));
  CHECK(g.eval(Rat(3, 4)) - g.eval(Rat(1, 4)) == Rat(1));
}

TEST_CASE("solve_two_level on scattered unions") {
  IntervalSet a = IntervalSet::from_pieces({iv(0, 1, 1, 8), iv(1, 2, 5, 8)});
  IntervalSet b = IntervalSet::from_pieces({iv(1, 4, 3, 8), iv(3, 4, 7, 8)});
  // alpha * 1/4 + beta * 1/4 = 0
  auto [t, g] = solve_two_level(Rat(3, 5), Rat(-3, 5), a, b);
  StepFunction f = StepFunction::from_pieces({{iv(0, 1, 1, 8), Rat(3, 5)},
                                              {iv(1, 4, 3, 8), Rat(-3, 5)},
                                              {iv(1, 2, 5, 8), Rat(3, 5)},
                                              {iv(3, 4, 7, 8), Rat(-3, 5)}});
  check_identity_exact(f, t, g);
  CHECK(verify_measure_preserving(t).pass);
  CHECK(map_set(t, a.unite(b)) == a.unite(b));
}

TEST_CASE("solve_two_level rejects bad input") {
  CHECK_THROWS_AS(solve_two_level(Rat(0), Rat(0), IntervalSet(Rat(0), Rat(1, 2)),
                                  IntervalSet(Rat(1, 2), Rat(1))),
                  precondition_error);
  CHECK_THROWS_AS(solve_two_level(Rat(1), Rat(-2), IntervalSet(Rat(0), Rat(1, 2)),
                                  IntervalSet(Rat(1, 2), Rat(1))),
                  precondition_error);
}

TEST_CASE("pair_positive_negative worked examples") {
  StepFunction simple = StepFunction::from_pieces(
      {{iv(0, 1, 1, 2), Rat(1)}, {iv(1, 2, 1, 1), Rat(-1)}});
  auto pairs = pair_positive_negative(simple);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].pos_set == IntervalSet(Rat(0), Rat(1, 2)));
  CHECK(pairs[0].neg_set == IntervalSet(Rat(1, 2), Rat(1)));

  StepFunction f = StepFunction::from_pieces({{iv(0, 1, 1, 4), Rat(2)},
                                              {iv(1, 4, 1, 2), Rat(1)},
                                              {iv(1, 2, 1, 1), Rat(-3, 2)}});
  auto ps = pair_positive_negative(f);
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].pos_set == IntervalSet(Rat(0), Rat(1, 4)));
  CHECK(ps[0].neg_set == IntervalSet(Rat(1, 2), Rat(5, 6)));
  CHECK(ps[1].pos_set == IntervalSet(Rat(1, 4), Rat(1, 2)));
  CHECK(ps[1].neg_set == IntervalSet(Rat(5, 6), Rat(1)));

  StepFunction zero = StepFunction::constant(IntervalSet(Rat(0), Rat(1)), Rat(0));
  CHECK(pair_positive_negative(zero).empty());
}

TEST_CASE("pair_positive_negative properties on random inputs") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    StepFunction f = random_mean_zero_step(rng, 20);
    auto pairs = pair_positive_negative(f);
    Rat positive_mass = 0;
    IntervalSet covered;
    for (const auto& pr : pairs) {
      CHECK(pr.pos_value * pr.pos_set.measure() + pr.neg_value * pr.neg_set.measure() == 0);
      CHECK(covered.intersect(pr.pos_set).empty());
      CHECK(covered.intersect(pr.neg_set).empty());
      covered = covered.unite(pr.pos_set).unite(pr.neg_set);
      positive_mass += pr.pos_value * pr.pos_set.measure();
    }
    // Total positive mass equals the integral of f+.
    Rat f_plus_mass = 0;
    for (const auto& piece : f.pieces())
      if (piece.value > 0) f_plus_mass += piece.value * piece.iv.length();
    CHECK(positive_mass == f_plus_mass);
    // Pairs cover exactly {f != 0}.
    IntervalSet support;
    for (const auto& piece : f.pieces())
      if (piece.value != 0) support = support.unite(IntervalSet(piece.iv));
    CHECK(covered == support);
  }
}

TEST_CASE("solve_step worked example") {
  StepFunction f = StepFunction::from_pieces(
      {{iv(0, 1, 1, 4), Rat(3, 4)}, {iv(1, 4, 1, 1), Rat(-1, 4)}});
  auto cert = solve_step(f);
  CHECK(cert.exact);
  CHECK(cert.residual_bound == 0);
  CHECK(cert.t == rotation(Rat(1, 4)));
  CHECK(cert.norm_ratio <= 1);
  check_identity_exact(f, cert.t, cert.g);
}

TEST_CASE("solve_step on the zero function") {
  StepFunction f = StepFunction::constant(IntervalSet(Rat(0), Rat(1)), Rat(0));
  auto cert = solve_step(f);
  CHECK(cert.t == IntervalExchange::identity(IntervalSet(Rat(0), Rat(1))));
  CHECK(sup_norm(cert.g) == 0);
}

TEST_CASE("solve_step on the introduction function with rational parameter") {
  const Rat a(2, 5);
  StepFunction f = StepFunction::from_pieces(
      {{Interval(Rat(0), a), Rat(1) - a}, {Interval(a, Rat(1)), -a}});
  auto cert = solve_step(f);
  CHECK(cert.t == rotation(a));
  CHECK(cert.g == PiecewiseAffine::from_pieces({{iv(0, 1, 1, 1), Rat(1), Rat(-1, 2)}}));
  CHECK(sup_norm(cert.g) == Rat(1, 2));
  check_identity_exact(f, cert.t, cert.g);
}

TEST_CASE("solve_step randomized: identity, norms, measure preservation") {
  std::mt19937_64 rng(9001);
  for (int trial = 0; trial < 60; ++trial) {
    StepFunction f = random_mean_zero_step(rng, 15);
    auto cert = solve_step(f);
    CHECK(verify_measure_preserving(cert.t).pass);
    if (sup_norm(f) > 0) CHECK(sup_norm(cert.g) <= sup_norm(f));
    check_identity_exact(f, cert.t, cert.g);
    // T restricted to each pair's union maps it onto itself.
    for (const auto& pr : pair_positive_negative(f)) {
      IntervalSet u = pr.pos_set.unite(pr.neg_set);
      CHECK(map_set(cert.t, u) == u);
    }
  }
}

TEST_CASE("solve_step rejects nonzero integrals with the exact value") {
  StepFunction f = StepFunction::constant(IntervalSet(Rat(0), Rat(1)), Rat(1, 7));
  try {
    solve_step(f);
    FAIL("expected precondition_error");
  } catch (const precondition_error& e) {
    CHECK(std::string(e.what()).find("1/7") != std::string::npos);
  }
}
