// Command-line surface for the coboundary solver: solve, verify, decompose,
// tower-trace, lemma-rearrange, orbit and plot-ready export.

#include "coboundary/errors.hpp"
#include "coboundary/exact_solver.hpp"
#include "coboundary/pipeline.hpp"
#include "coboundary/serialize.hpp"
#include "coboundary/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace coboundary;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitResourceLimit = 3;

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw structural_error("cannot open input file '" + path + "'");
  Json j;
  in >> j;
  return j;
}

void write_output(const std::string& output_path, const std::string& text) {
  if (output_path.empty() || output_path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(output_path);
  if (!out) throw structural_error("cannot open output file '" + output_path + "'");
  out << text << "\n";
}

std::vector<Rat> parse_rat_list(const std::string& text) {
  std::vector<Rat> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ','))
    if (!token.empty()) values.push_back(rat_from_string(token));
  return values;
}

struct CommonFlags {
  std::string input;
  std::string output;
  std::string epsilon, delta, tolerance;
  std::string mode;
  std::size_t depth_max = 0;
  long seed = 0;
};

ProblemSpec load_problem(const CommonFlags& flags) {
  ProblemSpec spec = problem_of_json(read_json_file(flags.input));
  if (!flags.epsilon.empty()) spec.eps = rat_from_string(flags.epsilon);
  if (!flags.delta.empty()) spec.delta = rat_from_string(flags.delta);
  if (!flags.tolerance.empty()) spec.tolerance = rat_from_string(flags.tolerance);
  if (!flags.mode.empty()) {
    if (flags.mode == "exact")
      spec.mode = TowerMode::exact;
    else if (flags.mode == "faithful")
      spec.mode = TowerMode::faithful;
    else
      throw structural_error("unknown mode '" + flags.mode + "'");
  }
  if (flags.depth_max != 0) spec.depth_max = flags.depth_max;
  if (flags.seed != 0) spec.seed = flags.seed;
  return spec;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_solver_flags) {
  cmd->add_option("input", flags.input, "input JSON file")->required();
  cmd->add_option("--output,-o", flags.output, "output file (default: stdout)");
  if (with_solver_flags) {
    cmd->add_option("--epsilon", flags.epsilon, "norm slack: ||g|| <= (1+eps)||f||");
    cmd->add_option("--delta", flags.delta, "residual target for tower blocks");
    cmd->add_option("--depth-max", flags.depth_max, "tower depth cap");
    cmd->add_option("--mode", flags.mode, "exact|faithful");
    cmd->add_option("--seed", flags.seed, "recorded in outputs; solvers are deterministic");
  }
  cmd->add_option("--tolerance", flags.tolerance, "numeric verification slack");
}

int run_solve(const CommonFlags& flags) {
  ProblemSpec spec = load_problem(flags);
  PipelineRun run = solve_full_run(spec.f, spec.eps, spec.delta, spec.depth_max, spec.mode);
  if (run.decomposition.renormalization_shift != 0)
    std::cerr << "note: sampled part recentered by " +
                     to_string(run.decomposition.renormalization_shift) + "\n";
  write_output(flags.output, json_of(run.certificate).dump(2));
  return kExitOk;
}

int run_verify(const CommonFlags& flags, const std::string& verify_mode) {
  CoboundaryCertificate cert = certificate_of_json(read_json_file(flags.input));
  VerifyMode mode = VerifyMode::numeric;
  if (verify_mode == "exact" || (verify_mode.empty() && cert.exact)) mode = VerifyMode::exact;
  Rat tol = flags.tolerance.empty() ? Rat(0) : rat_from_string(flags.tolerance);
  VerificationReport report = verify_certificate(cert, mode, tol);
  write_output(flags.output, json_of(report).dump(2));
  return report.pass ? kExitOk : kExitVerifyFail;
}

int run_decompose(const CommonFlags& flags) {
  ProblemSpec spec = load_problem(flags);
  write_output(flags.output, json_of(decompose_domain(spec.f)).dump(2));
  return kExitOk;
}

int run_tower_trace(const CommonFlags& flags) {
  ProblemSpec spec = load_problem(flags);
  PipelineRun run = solve_full_run(spec.f, spec.eps, spec.delta, spec.depth_max, spec.mode);
  Json traces = Json::array();
  for (const TowerRun& tr : run.tower_runs) traces.push_back(json_of(tr));
  Json out{{"decomposition", json_of(run.decomposition)},
           {"tower_runs", std::move(traces)},
           {"certificate", json_of(run.certificate)}};
  write_output(flags.output, out.dump(2));
  return kExitOk;
}

int run_rearrange(const std::string& vector_arg, const std::string& matrix_arg,
                  const std::string& output) {
  Json out;
  if (!vector_arg.empty()) {
    std::vector<Rat> a = parse_rat_list(vector_arg);
    Permutation sigma = rearrange_zero_sum(a);
    Json partial = Json::array();
    Rat run = 0;
    for (std::size_t k = 0; k < sigma.size(); ++k) {
      run += a[sigma[k]];
      partial.push_back(json_of(run));
    }
    out = Json{{"permutation", sigma.image()}, {"partial_sums", std::move(partial)}};
  } else {
    std::vector<std::vector<Rat>> rows;
    std::stringstream ss(matrix_arg);
    std::string row;
    while (std::getline(ss, row, ';'))
      if (!row.empty()) rows.push_back(parse_rat_list(row));
    MatrixRearrangement mr = rearrange_matrix(rows);
    Json sigmas = Json::array();
    for (const Permutation& sigma : mr.rows) sigmas.push_back(sigma.image());
    Json partial = Json::array();
    std::vector<Rat> sums(rows.empty() ? 0 : rows[0].size(), Rat(0));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Json jrow = Json::array();
      for (std::size_t j = 0; j < sums.size(); ++j) {
        sums[j] += rows[i][mr.rows[i][j]];
        jrow.push_back(json_of(sums[j]));
      }
      partial.push_back(std::move(jrow));
    }
    out = Json{{"permutations", std::move(sigmas)},
               {"column_partial_sums", std::move(partial)},
               {"tier", mr.max_tier}};
  }
  write_output(output, out.dump(2));
  return kExitOk;
}

int run_orbit(const CommonFlags& flags, const std::string& point, std::size_t steps) {
  Json j = read_json_file(flags.input);
  IntervalExchange t = j.contains("T") ? exchange_of_json(j["T"]) : exchange_of_json(j);
  OrbitResult result = orbit(t, rat_from_string(point), steps);
  std::string csv = "step,x\n";
  for (std::size_t i = 0; i < result.points.size(); ++i)
    csv += std::to_string(i) + "," + to_string(result.points[i]) + "\n";
  if (result.truncated) std::cerr << "note: " << result.note << "\n";
  write_output(flags.output, csv);
  return kExitOk;
}

int run_export(const CommonFlags& flags, std::size_t samples, int precision) {
  CoboundaryCertificate cert = certificate_of_json(read_json_file(flags.input));
  const PiecewiseAffine& work = cert.f.working();
  const IntervalSet domain = cert.f.domain();
  const Rat lo = domain.inf();
  const Rat span = domain.sup() - lo;
  std::string csv = "x,f,g,displacement\n";
  for (std::size_t i = 0; i < samples; ++i) {
    const Rat x = lo + span * Rat(BigInt(i), 1) / Rat(BigInt(samples), 1);
    if (!domain.contains(x)) continue;
    Rat tx;
    try {
      tx = cert.t.apply(x);
    } catch (const undefined_point_error&) {
      continue; // breakpoint: skip the exceptional point
    }
    csv += to_decimal_string(x, precision) + "," + to_decimal_string(work.eval(x), precision) +
           "," + to_decimal_string(cert.g.eval(x), precision) + "," +
           to_decimal_string(tx - x, precision) + "\n";
  }
  write_output(flags.output, csv);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact coboundary decomposition: f = g(T(x)) - g(x) with an interval exchange T"};
  app.require_subcommand(1);

  CommonFlags solve_flags, verify_flags, decompose_flags, trace_flags, orbit_flags, export_flags;
  std::string verify_mode;
  std::string vector_arg, matrix_arg, rearrange_output;
  std::string orbit_point = "0";
  std::size_t orbit_steps = 16;
  std::size_t export_samples = 512;
  int export_precision = 12;

  add_common(app.add_subcommand("solve", "solve a problem spec; writes a certificate"),
             solve_flags, true);
  auto* verify_cmd =
      app.add_subcommand("verify", "check a certificate independently; writes a report");
  add_common(verify_cmd, verify_flags, false);
  verify_cmd->add_option("--mode", verify_mode, "exact|numeric (default: from certificate)");
  add_common(app.add_subcommand("decompose", "write the domain decomposition"), decompose_flags,
             true);
  add_common(app.add_subcommand("tower-trace", "solve and write the per-stage tower ledger"),
             trace_flags, true);

  auto* rearrange_cmd =
      app.add_subcommand("lemma-rearrange", "rearrange a zero-sum vector or matrix");
  rearrange_cmd->add_option("--vector", vector_arg, "comma-separated rationals");
  rearrange_cmd->add_option("--matrix", matrix_arg,
                            "rows of comma-separated rationals, ';' between rows");
  rearrange_cmd->add_option("--output,-o", rearrange_output, "output file (default: stdout)");

  auto* orbit_cmd = app.add_subcommand("orbit", "iterate T from a point; writes CSV");
  add_common(orbit_cmd, orbit_flags, false);
  orbit_cmd->add_option("--point", orbit_point, "starting point (rational)");
  orbit_cmd->add_option("--steps", orbit_steps, "number of applications");

  auto* export_cmd =
      app.add_subcommand("export", "sample f, g and T(x)-x on a uniform grid; writes CSV");
  add_common(export_cmd, export_flags, false);
  export_cmd->add_option("--samples", export_samples, "number of grid points");
  export_cmd->add_option("--precision", export_precision, "significant digits");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("solve")) return run_solve(solve_flags);
    if (app.got_subcommand("verify")) return run_verify(verify_flags, verify_mode);
    if (app.got_subcommand("decompose")) return run_decompose(decompose_flags);
    if (app.got_subcommand("tower-trace")) return run_tower_trace(trace_flags);
    if (app.got_subcommand("lemma-rearrange")) {
      if (vector_arg.empty() == matrix_arg.empty()) {
        std::cerr << "error: provide exactly one of --vector or --matrix\n";
        return kExitInvalidInput;
      }
      return run_rearrange(vector_arg, matrix_arg, rearrange_output);
    }
    if (app.got_subcommand("orbit")) return run_orbit(orbit_flags, orbit_point, orbit_steps);
    if (app.got_subcommand("export"))
      return run_export(export_flags, export_samples, export_precision);
  } catch (const resource_limit_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResourceLimit;
  } catch (const precondition_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const domain_mismatch_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const undefined_point_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const structural_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}
