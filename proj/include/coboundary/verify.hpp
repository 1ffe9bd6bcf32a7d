#ifndef COBOUNDARY_VERIFY_HPP
#define COBOUNDARY_VERIFY_HPP

#include "coboundary/certificate.hpp"

#include <string>
#include <vector>

namespace coboundary {

enum class VerifyMode { exact, numeric };

// Everything here is recomputed from (f, T, g) alone; the certificate's own
// bounds and ledgers are treated as claims under test.
struct VerificationReport {
  bool pass = false;

  bool identity_pass = false;
  Rat identity_worst;        // largest |g∘T - g - f| over all atoms / grid points
  Rat identity_worst_point;  // a witness point for the worst deviation
  std::string identity_note;

  bool measure_pass = false;
  std::string measure_note;

  bool norm_pass = false;
  Rat norm_ratio; // recomputed sup|g| / sup|f|
  std::string norm_note;

  std::vector<Rat> exceptional_points; // the finite set where T is undefined
};

// exact mode: the identity g(T(x)) - g(x) = f(x) must hold coefficient-wise
// on every refinement atom. numeric mode: the sup of the defect on each atom
// and the defect at every sample point must stay within
// residual_bound + tol. Both modes check measure preservation and the norm
// bound exactly.
VerificationReport verify_certificate(const CoboundaryCertificate& cert, VerifyMode mode,
                                      const Rat& tol = Rat(0));

struct OrbitResult {
  std::vector<Rat> points; // x, T(x), ..., up to n applications
  bool truncated = false;
  std::string note;
};

OrbitResult orbit(const IntervalExchange& t, const Rat& x, std::size_t n);

} // namespace coboundary

#endif
