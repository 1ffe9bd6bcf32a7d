#ifndef COBOUNDARY_MUTATION_UTIL_HPP
#define COBOUNDARY_MUTATION_UTIL_HPP

#include "coboundary/certificate.hpp"

#include <optional>
#include <random>

namespace coboundary::testutil {

// Tampering helpers for the verifier battery. Every mutant returned is
// provably broken: a witness point with nonzero defect is confirmed before
// the mutant is emitted (a blind local change can be invisible, e.g. adding
// a constant to a single-piece g or swapping targets of identity pieces).

inline std::optional<Rat> defect_at(const CoboundaryCertificate& cert, const Rat& x) {
  try {
    return cert.g.eval(cert.t.apply(x)) - cert.g.eval(x) - cert.f.working().eval(x);
  } catch (...) {
    return std::nullopt;
  }
}

inline std::optional<CoboundaryCertificate> mutate_g(const CoboundaryCertificate& cert) {
  for (std::size_t target = 0; target < cert.g.pieces().size(); ++target) {
    std::vector<AffinePiece> pieces = cert.g.pieces();
    const Interval piece = pieces[target].iv;
    pieces[target].intercept += Rat(1, 997);
    CoboundaryCertificate mutated = cert;
    mutated.g = PiecewiseAffine::from_pieces(std::move(pieces));
    IntervalSet inside(piece);
    IntervalSet leaving = inside.subtract(map_set(invert(mutated.t), inside));
    if (leaving.empty()) continue;
    Rat x = leaving.quantile(leaving.measure() / 2);
    auto dev = defect_at(mutated, x);
    if (dev && *dev != 0) return mutated;
  }
  return std::nullopt;
}

inline std::optional<CoboundaryCertificate> mutate_t(const CoboundaryCertificate& cert,
                                                     std::mt19937_64& rng) {
  const std::size_t n = cert.t.pieces().size();
  if (n < 2) return std::nullopt;
  for (int attempt = 0; attempt < 32; ++attempt) {
    std::size_t i = rng() % n;
    std::size_t j = rng() % n;
    if (i == j) continue;
    std::vector<ExchangePiece> pieces = cert.t.pieces();
    if (pieces[i].src.length() != pieces[j].src.length()) continue;
    std::swap(pieces[i].dst, pieces[j].dst);
    const Rat xi = pieces[i].src.lo + pieces[i].src.length() / 2;
    CoboundaryCertificate mutated = cert;
    mutated.t = IntervalExchange::from_pieces_unchecked(std::move(pieces));
    auto dev = defect_at(mutated, xi);
    if (dev && *dev != 0) return mutated;
  }
  return std::nullopt;
}

inline CoboundaryCertificate mutate_f(const CoboundaryCertificate& cert) {
  CoboundaryCertificate mutated = cert;
  mutated.f = HybridFunction(cert.f.step_part().scale(Rat(1001, 1000)));
  return mutated;
}

} // namespace coboundary::testutil

#endif
