#include "coboundary/verify.hpp"
#include "coboundary/errors.hpp"

#include <algorithm>

namespace coboundary {

namespace {

struct AffineOn {
  Rat slope;
  Rat intercept;
  Rat at(const Rat& x) const { return slope * x + intercept; }
};

// The affine piece of f covering [u, v), assuming the refinement is fine
// enough that exactly one piece does. Binary search on the canonical order.
AffineOn piece_on(const PiecewiseAffine& f, const Interval& atom) {
  const auto& ps = f.pieces();
  std::size_t lo = 0, hi = ps.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (ps[mid].iv.hi <= atom.lo)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < ps.size() && ps[lo].iv.lo <= atom.lo && atom.hi <= ps[lo].iv.hi)
    return {ps[lo].slope, ps[lo].intercept};
  throw structural_error("verify: no affine piece covers atom [" + to_string(atom.lo) + "," +
                         to_string(atom.hi) + ")");
}

} // namespace

VerificationReport verify_certificate(const CoboundaryCertificate& cert, VerifyMode mode,
                                      const Rat& tol) {
  const PiecewiseAffine& work = cert.f.working();
  const IntervalSet domain = cert.f.domain();
  if (domain.empty()) throw structural_error("verify: certificate function has empty domain");
  if (!(cert.g.domain() == domain))
    throw structural_error("verify: g is not defined on the domain of f");
  if (cert.exact && cert.residual_bound != 0)
    throw structural_error("verify: exact certificate with nonzero residual bound");

  VerificationReport report;

  // --- measure preservation and domain coverage
  ExchangeReport ex = verify_measure_preserving(cert.t);
  report.measure_pass = ex.pass && ex.endomorphism && cert.t.domain() == domain;
  if (!ex.pass)
    report.measure_note = ex.failures.front();
  else if (!ex.endomorphism)
    report.measure_note = "sources and targets cover different sets";
  else if (!(cert.t.domain() == domain))
    report.measure_note = "transformation does not cover the domain of f";
  else
    report.measure_note = "measure-preserving exchange with " + std::to_string(ex.piece_count) +
                          " pieces of total measure " + to_string(ex.total_measure);

  // --- norm bound
  const Rat f_norm = cert.f.sup_norm_lower();
  const Rat g_norm = cert.g.empty() ? Rat(0) : sup_norm(cert.g);
  report.norm_ratio = f_norm == 0 ? Rat(0) : g_norm / f_norm;
  report.norm_pass = f_norm == 0 ? g_norm == 0 : g_norm <= (Rat(1) + cert.eps) * f_norm;
  report.norm_note = "sup|g| = " + to_string(g_norm) + ", sup|f| = " + to_string(f_norm) +
                     ", bound (1+eps)|f| = " + to_string((Rat(1) + cert.eps) * f_norm);

  // --- identity on the common refinement
  const std::vector<Rat> g_breaks = breakpoints(cert.g);
  std::vector<Rat> cuts = breakpoints(work);
  cuts.insert(cuts.end(), g_breaks.begin(), g_breaks.end());
  for (const ExchangePiece& p : cert.t.pieces()) {
    cuts.push_back(p.src.lo);
    cuts.push_back(p.src.hi);
  }
  if (report.measure_pass) {
    // Preimages of g's breakpoints; needs a usable inverse, hence the gate.
    for (const ExchangePiece& p : cert.t.pieces()) {
      auto first = std::lower_bound(g_breaks.begin(), g_breaks.end(), p.dst.lo);
      for (auto it = first; it != g_breaks.end() && *it < p.dst.hi; ++it)
        cuts.push_back(*it - p.offset());
    }
  }
  cuts = common_refinement({cuts});
  report.exceptional_points = cuts;

  bool identity_ok = true;
  Rat worst = 0;
  Rat worst_point = domain.inf();
  std::string worst_note;
  const Rat allowance = cert.residual_bound + tol;

  for (std::size_t i = 0; identity_ok && i + 1 < cuts.size(); ++i) {
    Interval atom(cuts[i], cuts[i + 1]);
    const Rat mid = (atom.lo + atom.hi) / 2;
    if (!domain.contains(mid)) continue;
    Rat offset;
    try {
      offset = cert.t.apply(mid) - mid;
    } catch (const undefined_point_error&) {
      identity_ok = false;
      worst_note = "T undefined on a positive-measure atom at " + to_string(mid);
      worst_point = mid;
      break;
    }
    AffineOn f_here, g_here, g_there;
    try {
      f_here = piece_on(work, atom);
      g_here = piece_on(cert.g, atom);
      g_there = piece_on(cert.g, Interval(atom.lo + offset, atom.hi + offset));
    } catch (const structural_error& e) {
      // A tampered T can translate an atom outside g's pieces.
      identity_ok = false;
      worst_note = e.what();
      worst_point = mid;
      break;
    }
    // defect(x) = g(x + offset) - g(x) - f(x), affine on the atom.
    AffineOn defect{g_there.slope - g_here.slope - f_here.slope,
                    g_there.slope * offset + g_there.intercept - g_here.intercept -
                        f_here.intercept};
    if (mode == VerifyMode::exact) {
      if (defect.slope != 0 || defect.intercept != 0) {
        identity_ok = false;
        worst = max(abs(defect.at(atom.lo)), abs(defect.at(atom.hi)));
        worst_point = mid;
        worst_note = "exact identity fails on atom [" + to_string(atom.lo) + "," +
                     to_string(atom.hi) + ")";
      }
    } else {
      const Rat dev = max(abs(defect.at(atom.lo)), abs(defect.at(atom.hi)));
      if (dev > worst) {
        worst = dev;
        worst_point = mid;
      }
      if (dev > allowance) {
        identity_ok = false;
        worst_note = "defect " + to_string(dev) + " exceeds residual+tol " +
                     to_string(allowance) + " on atom [" + to_string(atom.lo) + "," +
                     to_string(atom.hi) + ")";
      }
    }
  }

  // Numeric mode additionally pins the sampled part at its own grid points.
  if (identity_ok && mode == VerifyMode::numeric && cert.f.sampled_part()) {
    const SampledFunction& s = *cert.f.sampled_part();
    for (std::size_t i = 0; i < s.grid().size(); ++i) {
      const Rat& x = s.grid()[i];
      if (!domain.contains(x) || std::binary_search(cuts.begin(), cuts.end(), x)) continue;
      Rat fx = s.values()[i];
      if (!cert.f.step_part().empty() && cert.f.step_part().domain().contains(x))
        fx += cert.f.step_part().value_at(x);
      const Rat dev = abs(cert.g.eval(cert.t.apply(x)) - cert.g.eval(x) - fx);
      if (dev > worst) {
        worst = dev;
        worst_point = x;
      }
      if (dev > allowance) {
        identity_ok = false;
        worst_note = "sample defect " + to_string(dev) + " at " + to_string(x);
        break;
      }
    }
  }

  report.identity_pass = identity_ok;
  report.identity_worst = worst;
  report.identity_worst_point = worst_point;
  report.identity_note = identity_ok ? "identity holds off the exceptional set" : worst_note;

  report.pass = report.identity_pass && report.measure_pass && report.norm_pass;
  return report;
}

OrbitResult orbit(const IntervalExchange& t, const Rat& x, std::size_t n) {
  OrbitResult result;
  result.points.push_back(x);
  Rat cur = x;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      cur = t.apply(cur);
    } catch (const undefined_point_error&) {
      result.truncated = true;
      result.note = "orbit hit the exceptional set after " + std::to_string(i) + " steps";
      return result;
    }
    result.points.push_back(cur);
  }
  return result;
}

} // namespace coboundary
