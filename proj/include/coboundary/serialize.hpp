#ifndef COBOUNDARY_SERIALIZE_HPP
#define COBOUNDARY_SERIALIZE_HPP

#include "coboundary/pipeline.hpp"
#include "coboundary/verify.hpp"

#include <json.hpp>

#include <string>

namespace coboundary {

// All scalars are rational strings ("p/q" or "n"); ordered_json keeps the
// key order stable so equal inputs serialize byte-identically.
using Json = nlohmann::ordered_json;

Json json_of(const Rat& x);
Json json_of(const Interval& iv);
Json json_of(const IntervalSet& s);
Json json_of(const StepFunction& f);
Json json_of(const PiecewiseAffine& f);
Json json_of(const SampledFunction& f);
Json json_of(const HybridFunction& f);
Json json_of(const IntervalExchange& t);
Json json_of(const CoboundaryCertificate& cert);
Json json_of(const VerificationReport& report);
Json json_of(const DomainDecomposition& dec);
Json json_of(const SolverStage& stage);
Json json_of(const TowerRun& run); // per-level and per-stage trace

Rat rat_of_json(const Json& j);
Interval interval_of_json(const Json& j);
IntervalSet interval_set_of_json(const Json& j);
StepFunction step_of_json(const Json& j);
PiecewiseAffine affine_of_json(const Json& j);
SampledFunction sampled_of_json(const Json& j);
HybridFunction hybrid_of_json(const Json& j);
// Exchanges deserialize unchecked: the verifier reports violations instead
// of the parser rejecting them.
IntervalExchange exchange_of_json(const Json& j);
CoboundaryCertificate certificate_of_json(const Json& j);

// CLI problem description: the function, targets and mode flags.
struct ProblemSpec {
  HybridFunction f;
  Rat eps = Rat(1, 10);
  Rat delta = Rat(1, 1000);
  TowerMode mode = TowerMode::exact;
  std::size_t depth_max = 0; // 0 = default cap
  Rat tolerance = Rat(0);
  long seed = 0;
};

ProblemSpec problem_of_json(const Json& j);
Json json_of(const ProblemSpec& spec);

} // namespace coboundary

#endif
