#ifndef COBOUNDARY_CERTIFICATE_HPP
#define COBOUNDARY_CERTIFICATE_HPP

#include "coboundary/exchange.hpp"
#include "coboundary/piecewise.hpp"

#include <string>
#include <vector>

namespace coboundary {

struct BlockRecord {
  std::string kind; // "atomic-exact" | "tower" | "identity"
  IntervalSet set;
  Rat residual;
  Rat g_norm;
  bool exact = true;
};

struct StageSummary {
  int k = 0;                // stage index within one tower run
  std::size_t level = 0;    // tower level n_k
  std::size_t cell_count = 0;
  Rat h_norm;               // ||h_k|| (||f_{n_0}|| for the base stage)
  Rat g_norm;               // ||g_k||
  bool cyclic = false;
  int rearrange_tier = 0;   // strategy tier used by the matrix rearrangement
};

// The unit of output and of verification: the claim f = g∘T - g on the
// domain, up to residual_bound, with ||g|| <= (1 + eps)||f||.
struct CoboundaryCertificate {
  HybridFunction f;
  IntervalExchange t;
  PiecewiseAffine g;
  Rat eps;
  bool exact = false;      // implies residual_bound == 0
  Rat residual_bound;
  Rat norm_ratio;          // sup|g| / sup|f| (0 when f == 0)
  std::vector<BlockRecord> blocks;
  std::vector<StageSummary> stages;
  bool converged = true;   // false when depth_max stopped a tower early
};

} // namespace coboundary

#endif
