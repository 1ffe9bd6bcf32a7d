#include "coboundary/serialize.hpp"
#include "coboundary/errors.hpp"

namespace coboundary {

namespace {

const Json& need(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw structural_error(std::string("missing field '") + key + "' in " + j.dump());
  return *it;
}

} // namespace

Json json_of(const Rat& x) { return to_string(x); }

Json json_of(const Interval& iv) { return Json{{"lo", json_of(iv.lo)}, {"hi", json_of(iv.hi)}}; }

Json json_of(const IntervalSet& s) {
  Json arr = Json::array();
  for (const Interval& iv : s.pieces()) arr.push_back(json_of(iv));
  return arr;
}

Json json_of(const StepFunction& f) {
  Json arr = Json::array();
  for (const StepPiece& p : f.pieces()) {
    Json piece = json_of(p.iv);
    piece["value"] = json_of(p.value);
    arr.push_back(std::move(piece));
  }
  return arr;
}

Json json_of(const PiecewiseAffine& f) {
  Json arr = Json::array();
  for (const AffinePiece& p : f.pieces()) {
    Json piece = json_of(p.iv);
    piece["slope"] = json_of(p.slope);
    piece["intercept"] = json_of(p.intercept);
    arr.push_back(std::move(piece));
  }
  return arr;
}

Json json_of(const SampledFunction& f) {
  Json grid = Json::array();
  Json values = Json::array();
  for (const Rat& x : f.grid()) grid.push_back(json_of(x));
  for (const Rat& v : f.values()) values.push_back(json_of(v));
  return Json{{"domain", json_of(f.domain())},
              {"grid", std::move(grid)},
              {"values", std::move(values)},
              {"lipschitz", json_of(f.lipschitz())}};
}

Json json_of(const HybridFunction& f) {
  Json j{{"step_pieces", json_of(f.step_part())}};
  if (f.sampled_part()) j["sampled"] = json_of(*f.sampled_part());
  return j;
}

Json json_of(const IntervalExchange& t) {
  Json arr = Json::array();
  for (const ExchangePiece& p : t.pieces())
    arr.push_back(Json{{"src", json_of(p.src)}, {"dst", json_of(p.dst)}});
  return Json{{"pieces", std::move(arr)}};
}

Json json_of(const CoboundaryCertificate& cert) {
  Json blocks = Json::array();
  for (const BlockRecord& b : cert.blocks)
    blocks.push_back(Json{{"kind", b.kind},
                          {"set", json_of(b.set)},
                          {"residual", json_of(b.residual)},
                          {"g_norm", json_of(b.g_norm)},
                          {"exact", b.exact}});
  Json stages = Json::array();
  for (const StageSummary& s : cert.stages)
    stages.push_back(Json{{"k", s.k},
                          {"level", s.level},
                          {"cells", s.cell_count},
                          {"h_norm", json_of(s.h_norm)},
                          {"g_norm", json_of(s.g_norm)},
                          {"cyclic", s.cyclic},
                          {"rearrange_tier", s.rearrange_tier}});
  return Json{{"f", json_of(cert.f)},
              {"T", json_of(cert.t)},
              {"g", json_of(cert.g)},
              {"epsilon", json_of(cert.eps)},
              {"exact", cert.exact},
              {"residual_bound", json_of(cert.residual_bound)},
              {"norm_ratio", json_of(cert.norm_ratio)},
              {"converged", cert.converged},
              {"blocks", std::move(blocks)},
              {"stages", std::move(stages)}};
}

Json json_of(const VerificationReport& report) {
  Json exceptional = Json::array();
  for (const Rat& x : report.exceptional_points) exceptional.push_back(json_of(x));
  return Json{{"pass", report.pass},
              {"identity",
               Json{{"pass", report.identity_pass},
                    {"worst_deviation", json_of(report.identity_worst)},
                    {"worst_point", json_of(report.identity_worst_point)},
                    {"note", report.identity_note}}},
              {"measure", Json{{"pass", report.measure_pass}, {"note", report.measure_note}}},
              {"norm", Json{{"pass", report.norm_pass},
                            {"ratio", json_of(report.norm_ratio)},
                            {"note", report.norm_note}}},
              {"exceptional_points", std::move(exceptional)}};
}

Json json_of(const DomainDecomposition& dec) {
  Json blocks = Json::array();
  for (const MixedBlock& b : dec.blocks)
    blocks.push_back(Json{{"A", json_of(b.a)},
                          {"B", json_of(b.b)},
                          {"y", json_of(b.y)},
                          {"r_lo", json_of(b.r_lo)},
                          {"r_hi", json_of(b.r_hi)}});
  return Json{{"negated", dec.negated},
              {"renormalization_shift", json_of(dec.renormalization_shift)},
              {"D", json_of(dec.d)},
              {"D_plus", json_of(dec.d_plus)},
              {"D_minus", json_of(dec.d_minus)},
              {"R_C", json_of(dec.r_c)},
              {"C_block", json_of(dec.c_block)},
              {"C1", json_of(dec.c1)},
              {"C2", json_of(dec.c2)},
              {"C2_plus", json_of(dec.c2_plus)},
              {"C2_minus", json_of(dec.c2_minus)},
              {"B0", json_of(dec.b0)},
              {"R_B0", json_of(dec.r_b0)},
              {"C2_tilde", json_of(dec.c2_tilde)},
              {"mixed_blocks", std::move(blocks)}};
}

Json json_of(const SolverStage& stage) {
  Json matrix = Json::array();
  for (const auto& row : stage.matrix) {
    Json jrow = Json::array();
    for (const Rat& v : row) jrow.push_back(json_of(v));
    matrix.push_back(std::move(jrow));
  }
  Json sigmas = Json::array();
  for (const Permutation& sigma : stage.sigma_rows) sigmas.push_back(sigma.image());
  Json b = Json::array();
  for (const Rat& v : stage.b) b.push_back(json_of(v));
  return Json{{"k", stage.k},
              {"level", stage.level},
              {"cycle", stage.cycle},
              {"matrix", std::move(matrix)},
              {"sigma_rows", std::move(sigmas)},
              {"b", std::move(b)},
              {"sigma0", stage.sigma0.image()},
              {"rearrange_tier", stage.rearrange_tier},
              {"h_norm", json_of(stage.h_norm)},
              {"g_norm", json_of(stage.g_norm)},
              {"cyclic", stage.cyclic},
              {"T", json_of(stage.t)},
              {"g", json_of(stage.g)}};
}

Json json_of(const TowerRun& run) {
  Json levels = Json::array();
  for (const TowerLevel& level : run.tower.levels) {
    Json cells = Json::array();
    for (const IntervalSet& c : level.cells) cells.push_back(json_of(c));
    levels.push_back(Json{{"n", level.n},
                          {"branching", level.branching},
                          {"cell_measure", json_of(level.cell_measure)},
                          {"eps_n", json_of(level.eps_n)},
                          {"residual_bound", json_of(level.residual_bound)},
                          {"max_diameter", json_of(level.max_diameter)},
                          {"cells", std::move(cells)}});
  }
  Json interfaces = Json::array();
  for (const Rat& u : run.tower.interface_points) interfaces.push_back(json_of(u));
  Json stages = Json::array();
  for (const SolverStage& stage : run.stages) stages.push_back(json_of(stage));
  return Json{{"mode", run.tower.mode == TowerMode::exact ? "exact" : "faithful"},
              {"base", json_of(run.tower.base)},
              {"length", json_of(run.tower.length)},
              {"interface_points", std::move(interfaces)},
              {"norm_lower", json_of(run.tower.norm_lower)},
              {"recenter_shift", json_of(run.tower.recenter_shift)},
              {"levels", std::move(levels)},
              {"stages", std::move(stages)},
              {"certificate", json_of(run.certificate)}};
}

Rat rat_of_json(const Json& j) {
  if (!j.is_string()) throw structural_error("rational must be a string: " + j.dump());
  return rat_from_string(j.get<std::string>());
}

Interval interval_of_json(const Json& j) {
  return Interval(rat_of_json(need(j, "lo")), rat_of_json(need(j, "hi")));
}

IntervalSet interval_set_of_json(const Json& j) {
  if (!j.is_array()) throw structural_error("interval set must be an array: " + j.dump());
  std::vector<Interval> pieces;
  for (const Json& piece : j) pieces.push_back(interval_of_json(piece));
  return IntervalSet::from_pieces(std::move(pieces));
}

StepFunction step_of_json(const Json& j) {
  if (!j.is_array()) throw structural_error("step function must be an array: " + j.dump());
  std::vector<StepPiece> pieces;
  for (const Json& piece : j)
    pieces.push_back({interval_of_json(piece), rat_of_json(need(piece, "value"))});
  return StepFunction::from_pieces(std::move(pieces));
}

PiecewiseAffine affine_of_json(const Json& j) {
  if (!j.is_array()) throw structural_error("affine function must be an array: " + j.dump());
  std::vector<AffinePiece> pieces;
  for (const Json& piece : j)
    pieces.push_back({interval_of_json(piece), rat_of_json(need(piece, "slope")),
                      rat_of_json(need(piece, "intercept"))});
  return PiecewiseAffine::from_pieces(std::move(pieces));
}

SampledFunction sampled_of_json(const Json& j) {
  std::vector<Rat> grid, values;
  for (const Json& x : need(j, "grid")) grid.push_back(rat_of_json(x));
  for (const Json& v : need(j, "values")) values.push_back(rat_of_json(v));
  IntervalSet domain;
  if (j.contains("domain"))
    domain = interval_set_of_json(j["domain"]);
  else if (!grid.empty())
    domain = IntervalSet(grid.front(), grid.back());
  return SampledFunction(std::move(domain), std::move(grid), std::move(values),
                         rat_of_json(need(j, "lipschitz")));
}

HybridFunction hybrid_of_json(const Json& j) {
  StepFunction step;
  if (j.contains("step_pieces")) step = step_of_json(j["step_pieces"]);
  std::optional<SampledFunction> sampled;
  if (j.contains("sampled") && !j["sampled"].is_null()) sampled = sampled_of_json(j["sampled"]);
  if (step.empty() && !sampled)
    throw structural_error("function needs step_pieces or sampled data");
  return HybridFunction(std::move(step), std::move(sampled));
}

IntervalExchange exchange_of_json(const Json& j) {
  std::vector<ExchangePiece> pieces;
  for (const Json& piece : need(j, "pieces"))
    pieces.push_back({interval_of_json(need(piece, "src")), interval_of_json(need(piece, "dst"))});
  return IntervalExchange::from_pieces_unchecked(std::move(pieces));
}

CoboundaryCertificate certificate_of_json(const Json& j) {
  CoboundaryCertificate cert;
  cert.f = hybrid_of_json(need(j, "f"));
  cert.t = exchange_of_json(need(j, "T"));
  cert.g = affine_of_json(need(j, "g"));
  cert.eps = rat_of_json(need(j, "epsilon"));
  cert.exact = need(j, "exact").get<bool>();
  cert.residual_bound = rat_of_json(need(j, "residual_bound"));
  cert.norm_ratio = rat_of_json(need(j, "norm_ratio"));
  if (j.contains("converged")) cert.converged = j["converged"].get<bool>();
  if (j.contains("blocks"))
    for (const Json& b : j["blocks"])
      cert.blocks.push_back({need(b, "kind").get<std::string>(),
                             interval_set_of_json(need(b, "set")),
                             rat_of_json(need(b, "residual")), rat_of_json(need(b, "g_norm")),
                             need(b, "exact").get<bool>()});
  if (j.contains("stages"))
    for (const Json& s : j["stages"])
      cert.stages.push_back({need(s, "k").get<int>(), need(s, "level").get<std::size_t>(),
                             need(s, "cells").get<std::size_t>(),
                             rat_of_json(need(s, "h_norm")), rat_of_json(need(s, "g_norm")),
                             need(s, "cyclic").get<bool>(),
                             need(s, "rearrange_tier").get<int>()});
  return cert;
}

ProblemSpec problem_of_json(const Json& j) {
  ProblemSpec spec;
  spec.f = hybrid_of_json(j);
  if (j.contains("epsilon")) spec.eps = rat_of_json(j["epsilon"]);
  if (j.contains("delta")) spec.delta = rat_of_json(j["delta"]);
  if (j.contains("mode")) {
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "exact")
      spec.mode = TowerMode::exact;
    else if (mode == "faithful")
      spec.mode = TowerMode::faithful;
    else
      throw structural_error("unknown mode '" + mode + "' (expected exact|faithful)");
  }
  if (j.contains("depth_max")) spec.depth_max = j["depth_max"].get<std::size_t>();
  if (j.contains("tolerance")) spec.tolerance = rat_of_json(j["tolerance"]);
  if (j.contains("seed")) spec.seed = j["seed"].get<long>();
  return spec;
}

Json json_of(const ProblemSpec& spec) {
  Json j = json_of(spec.f);
  j["epsilon"] = json_of(spec.eps);
  j["delta"] = json_of(spec.delta);
  j["mode"] = spec.mode == TowerMode::exact ? "exact" : "faithful";
  j["depth_max"] = spec.depth_max;
  j["tolerance"] = json_of(spec.tolerance);
  j["seed"] = spec.seed;
  return j;
}

} // namespace coboundary
