// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Every tolerance is pinned in code; nothing is calibrated later.

#include "coboundary/exact_solver.hpp"
#include "coboundary/pipeline.hpp"
#include "coboundary/rearrange.hpp"
#include "coboundary/tower.hpp"
#include "coboundary/verify.hpp"
#include "mutation_util.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

using namespace coboundary;
using namespace coboundary::testutil;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  const auto start = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (elapsed >= budget_seconds) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  std::ostringstream line;
  line.precision(2);
  line << (ok ? "[PASS] " : "[FAIL] ") << number << ". " << name << " (" << std::fixed
       << elapsed << "s";
  if (!detail.empty()) line << "; " << detail;
  line << ")";
  std::cout << line.str() << std::endl;
  if (!ok) ++failures;
}

bool prefix_bound_holds(const std::vector<Rat>& a, const Permutation& sigma, const Rat& bound) {
  Rat run = 0;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    run += a[sigma[k]];
    if (abs(run) > bound) return false;
  }
  return true;
}

bool exhaustive_vector_witness(const std::vector<Rat>& a, const Permutation& greedy,
                               const Rat& bound) {
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  bool greedy_found = false;
  bool any_valid = false;
  do {
    if (!prefix_bound_holds(a, Permutation(idx), bound)) continue;
    any_valid = true;
    if (idx == greedy.image()) greedy_found = true;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return any_valid && greedy_found;
}

bool matrix_assignment_exists(const std::vector<std::vector<Rat>>& a, const Rat& bound) {
  const std::size_t n = a.size();
  const std::size_t m = a[0].size();
  std::vector<Rat> sums(m, Rat(0));
  auto rec = [&](auto&& self, std::size_t row) -> bool {
    if (row == n) return true;
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      bool ok = true;
      for (std::size_t j = 0; j < m; ++j)
        if (abs(sums[j] + a[row][perm[j]]) > bound) { ok = false; break; }
      if (!ok) continue;
      for (std::size_t j = 0; j < m; ++j) sums[j] += a[row][perm[j]];
      if (self(self, row + 1)) return true;
      for (std::size_t j = 0; j < m; ++j) sums[j] -= a[row][perm[j]];
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  };
  return rec(rec, 0);
}

std::vector<std::vector<Rat>> random_zero_row_matrix(std::mt19937_64& rng, int n, int m,
                                                     long denom, long span) {
  std::uniform_int_distribution<long> dist(-span, span);
  std::vector<std::vector<Rat>> a;
  for (int i = 0; i < n; ++i) {
    std::vector<Rat> row;
    Rat sum = 0;
    for (int j = 0; j < m; ++j) {
      row.push_back(Rat(dist(rng), denom));
      sum += row.back();
    }
    for (Rat& v : row) v -= sum / m;
    a.push_back(std::move(row));
  }
  return a;
}

SampledFunction acceptance_ramp() {
  const long n = 1L << 14;
  std::vector<Rat> grid, values;
  grid.reserve(n + 1);
  values.reserve(n + 1);
  for (long i = 0; i <= n; ++i) {
    grid.push_back(Rat(i, n));
    values.push_back(Rat(i, n) - Rat(1, 2));
  }
  return SampledFunction(IntervalSet(Rat(0), Rat(1)), std::move(grid), std::move(values),
                         Rat(1));
}

HybridFunction acceptance_hybrid() {
  StepFunction step = StepFunction::from_pieces(
      {{Interval(Rat(0), Rat(1, 4)), Rat(1, 2)}, {Interval(Rat(1, 4), Rat(1, 2)), Rat(-1, 2)}});
  const long n = 1L << 10;
  std::vector<Rat> grid, values;
  for (long i = 0; i <= n; ++i) {
    Rat x = Rat(1, 2) + Rat(1, 2) * Rat(i, n);
    grid.push_back(x);
    values.push_back(x - Rat(3, 4));
  }
  SampledFunction s(IntervalSet(Rat(1, 2), Rat(1)), std::move(grid), std::move(values), Rat(1));
  return HybridFunction(std::move(step), std::move(s));
}

} // namespace

int main() {
  // 1. Exact suite for finite-valued step functions.
  criterion(1, "exact step suite: 200 random mean-zero step functions", 10.0,
            [](std::string& detail) {
              std::mt19937_64 rng(1001);
              for (int trial = 0; trial < 200; ++trial) {
                StepFunction f = random_mean_zero_step(rng, 40);
                CoboundaryCertificate cert = solve_step(f);
                VerificationReport report = verify_certificate(cert, VerifyMode::exact, Rat(0));
                if (!report.pass || report.identity_worst != 0) {
                  detail = "verification failed on trial " + std::to_string(trial);
                  return false;
                }
                if (sup_norm(f) > 0 && sup_norm(cert.g) > sup_norm(f)) {
                  detail = "||g|| > ||f|| on trial " + std::to_string(trial);
                  return false;
                }
                if (!verify_measure_preserving(cert.t).pass) {
                  detail = "measure check failed on trial " + std::to_string(trial);
                  return false;
                }
              }
              return true;
            });

  // 2. The two-level function with rational parameter.
  criterion(2, "two-level functions f_a for a in {2/5, 3/7, 1/2}", 1.0, [](std::string& detail) {
    for (const Rat& a : {Rat(2, 5), Rat(3, 7), Rat(1, 2)}) {
      StepFunction f = StepFunction::from_pieces(
          {{Interval(Rat(0), a), Rat(1) - a}, {Interval(a, Rat(1)), -a}});
      CoboundaryCertificate cert = solve_step(f);
      if (!(cert.t == rotation(a))) {
        detail = "T is not the rotation for a = " + to_string(a);
        return false;
      }
      // g(t) = t - 1/2 up to an additive constant.
      for (const AffinePiece& p : cert.g.pieces())
        if (p.slope != 1 || p.intercept != cert.g.pieces()[0].intercept) {
          detail = "g differs from t - 1/2 by more than a constant";
          return false;
        }
      if (sup_norm(cert.g) != Rat(1, 2) || Rat(1, 2) > max(a, Rat(1) - a)) {
        detail = "||g|| != 1/2 for a = " + to_string(a);
        return false;
      }
      if (!verify_certificate(cert, VerifyMode::exact, Rat(0)).pass) {
        detail = "exact verification failed for a = " + to_string(a);
        return false;
      }
    }
    return true;
  });

  // 3. Zero-sum rearrangement bound, with an exhaustive witness for small n.
  criterion(3, "zero-sum rearrangement: 1000 random vectors, n <= 50", 5.0,
            [](std::string& detail) {
              std::mt19937_64 rng(3003);
              std::uniform_int_distribution<int> n_dist(1, 50);
              std::uniform_int_distribution<long> v_dist(-120, 120);
              int small_checked = 0;
              for (int trial = 0; trial < 1000; ++trial) {
                const int n = n_dist(rng);
                std::vector<Rat> a;
                Rat sum = 0;
                for (int i = 0; i < n; ++i) {
                  a.push_back(Rat(v_dist(rng), 24));
                  sum += a.back();
                }
                for (Rat& v : a) v -= sum / n;
                Rat bound = 0;
                for (const Rat& v : a) bound = max(bound, abs(v));
                Permutation sigma = rearrange_zero_sum(a);
                if (!prefix_bound_holds(a, sigma, bound)) {
                  detail = "prefix bound failed on trial " + std::to_string(trial);
                  return false;
                }
                if (n <= 8 && small_checked < 40) {
                  ++small_checked;
                  if (!exhaustive_vector_witness(a, sigma, bound)) {
                    detail = "exhaustive witness failed on trial " + std::to_string(trial);
                    return false;
                  }
                }
              }
              return true;
            });

  // 4. Matrix rearrangement bound, exhaustively confirmed for tiny sizes.
  criterion(4, "matrix rearrangement: 500 random matrices, n,m <= 12", 30.0,
            [](std::string& detail) {
              std::mt19937_64 rng(4004);
              std::uniform_int_distribution<int> dim(1, 12);
              for (int trial = 0; trial < 500; ++trial) {
                const int n = dim(rng);
                const int m = dim(rng);
                auto a = random_zero_row_matrix(rng, n, m, 12, 60);
                Rat c = 0;
                for (const auto& row : a)
                  for (const Rat& v : row) c = max(c, abs(v));
                MatrixRearrangement mr = rearrange_matrix(a);
                std::vector<Rat> sums(m, Rat(0));
                for (int i = 0; i < n; ++i)
                  for (int j = 0; j < m; ++j) {
                    sums[j] += a[i][mr.rows[i][j]];
                    if (abs(sums[j]) > 2 * c) {
                      detail = "2C bound failed on trial " + std::to_string(trial);
                      return false;
                    }
                  }
              }
              std::uniform_int_distribution<int> small_dim(1, 4);
              for (int trial = 0; trial < 60; ++trial) {
                const int n = small_dim(rng);
                const int m = small_dim(rng);
                auto a = random_zero_row_matrix(rng, n, m, 4, 8);
                Rat c = 0;
                for (const auto& row : a)
                  for (const Rat& v : row) c = max(c, abs(v));
                if (!matrix_assignment_exists(a, 2 * c)) {
                  detail = "exhaustive feasibility failed on small trial " +
                           std::to_string(trial);
                  return false;
                }
                rearrange_matrix(a); // must also succeed constructively
              }
              return true;
            });

  // 5. Carving suite.
  criterion(5, "carving: 100 random shrink triples plus midpoint splits", 5.0,
            [](std::string& detail) {
              std::mt19937_64 rng(5005);
              int done = 0;
              while (done < 100) {
                IntervalSet k = random_interval_set(rng, 5);
                if (k.empty()) continue;
                StepFunction f = random_mean_zero_step(rng, 10).restrict_to(k);
                Rat mean = integrate(f, k) / k.measure();
                f = f.add_constant(-mean);
                std::uniform_int_distribution<long> cd(1, 999);
                Rat c = k.measure() * Rat(cd(rng), 1000);
                if (c == 0 || c >= k.measure()) continue;
                auto [e, trace] = shrink_mean_zero(k, f, c);
                if (e.measure() != k.measure() - c || integrate(f, e) != 0 ||
                    e.inf() <= k.inf() || e.sup() >= k.sup()) {
                  detail = "shrink postcondition failed on trial " + std::to_string(done);
                  return false;
                }
                // Midpoint split with an exact rational ratio.
                Rat mid = (k.inf() + k.sup()) / 2;
                IntervalSet left = k.intersect(IntervalSet(k.inf(), mid));
                IntervalSet right = k.subtract(left);
                if (!left.empty() && !right.empty()) {
                  Rat cc = min(left.measure(), right.measure()) / 3;
                  if (cc > 0) {
                    SplitResult sr = split_half(k, f, cc);
                    if (sr.e.measure() != k.measure() - cc || integrate(f, sr.e) != 0 ||
                        sr.e.intersect(left).measure() != sr.ratio * sr.e.measure()) {
                      detail = "split_half postcondition failed on trial " +
                               std::to_string(done);
                      return false;
                    }
                  }
                }
                ++done;
              }
              return true;
            });

  // 6. Tower suite on the sampled ramp.
  criterion(6, "tower: ramp at grid 2^-14, eps = 1/10, delta = 1/1000", 30.0,
            [](std::string& detail) {
              HybridFunction f{acceptance_ramp()};
              TowerRun run = solve_tower_run(IntervalSet(Rat(0), Rat(1)), f, Rat(1, 10),
                                             Rat(1, 1000), 0, TowerMode::exact);
              const CoboundaryCertificate& cert = run.certificate;
              if (!cert.converged || cert.residual_bound > Rat(1, 1000)) {
                detail = "residual " + to_string(cert.residual_bound) + " misses 1/1000";
                return false;
              }
              if (run.stages.back().level != 9 || run.stages.back().cycle.size() != 512) {
                detail = "final stage is not 512 cells at level 9";
                return false;
              }
              if (sup_norm(cert.g) > Rat(11, 20)) {
                detail = "||g|| exceeds 11/20";
                return false;
              }
              for (const SolverStage& stage : run.stages) {
                if (!stage.cyclic) {
                  detail = "a stage is not cyclic";
                  return false;
                }
                if (stage.k > 0 && stage.g_norm > 4 * stage.h_norm) {
                  detail = "||g_k|| > 4 ||h_k|| at stage " + std::to_string(stage.k);
                  return false;
                }
              }
              // Exact identity on all 512 cells of the final level.
              StepFunction g_total = run.stages.front().g;
              for (std::size_t s = 1; s < run.stages.size(); ++s)
                g_total = overlay_add(g_total, run.stages[s].g);
              const TowerLevel& fin = run.tower.level(9);
              for (std::size_t i = 0; i < fin.cells.size(); ++i) {
                Rat x = fin.cells[i].quantile(fin.cell_measure / 2);
                if (g_total.value_at(run.stages.back().t.apply(x)) - g_total.value_at(x) !=
                    fin.cell_values[i]) {
                  detail = "telescoped identity failed on cell " + std::to_string(i);
                  return false;
                }
              }
              if (!verify_certificate(cert, VerifyMode::numeric, Rat(0)).pass) {
                detail = "numeric verification failed";
                return false;
              }
              return true;
            });

  // 7. Pipeline glue on a hybrid input.
  criterion(7, "pipeline: atom block plus sampled block, and -f", 60.0,
            [](std::string& detail) {
              HybridFunction f = acceptance_hybrid();
              const Rat eps(1, 10), delta(1, 100);
              PipelineRun run = solve_full_run(f, eps, delta);
              Rat total = run.decomposition.c_block.measure() + run.decomposition.b0.measure();
              for (const MixedBlock& b : run.decomposition.blocks)
                total += b.a.measure() + b.b.measure();
              if (total != 1) {
                detail = "block measures sum to " + to_string(total) + ", not 1";
                return false;
              }
              const CoboundaryCertificate& cert = run.certificate;
              if (cert.residual_bound > delta || cert.norm_ratio > Rat(1) + eps) {
                detail = "residual or norm ratio out of bounds";
                return false;
              }
              if (!verify_certificate(cert, VerifyMode::numeric, Rat(0)).pass) {
                detail = "verification failed";
                return false;
              }
              CoboundaryCertificate neg = solve_full(f.negate(), eps, delta);
              if (neg.residual_bound != cert.residual_bound ||
                  neg.norm_ratio != cert.norm_ratio) {
                detail = "-f changes the residual or the norm ratio";
                return false;
              }
              if (!verify_certificate(neg, VerifyMode::numeric, Rat(0)).pass) {
                detail = "verification failed for -f";
                return false;
              }
              return true;
            });

  // 8. Mutation battery.
  criterion(8, "mutation battery: 50 tampered certificates all rejected", 30.0,
            [](std::string& detail) {
              std::mt19937_64 rng(8008);
              int produced = 0;
              int trial = 0;
              while (produced < 50 && trial < 400) {
                ++trial;
                StepFunction f = random_mean_zero_step(rng, 12);
                if (sup_norm(f) == 0) continue;
                CoboundaryCertificate cert = solve_step(f);
                std::optional<CoboundaryCertificate> mutated;
                switch (produced % 3) {
                  case 0: mutated = mutate_g(cert); break;
                  case 1: mutated = mutate_t(cert, rng); break;
                  default: mutated = mutate_f(cert); break;
                }
                if (!mutated) continue;
                ++produced;
                if (verify_certificate(*mutated, VerifyMode::exact, Rat(0)).pass) {
                  detail = "false accept on mutant " + std::to_string(produced);
                  return false;
                }
              }
              if (produced != 50) {
                detail = "only built " + std::to_string(produced) + " mutants";
                return false;
              }
              return true;
            });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures;
}
