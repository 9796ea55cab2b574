#include "ldft/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ldft {

namespace {

// B(y) = 1 - 3y^2 + 2|y|^3 on [-1,1]; C1, piecewise cubic, B(0) = 1.
double bump1d(double y) {
  const double a = std::abs(y);
  if (a >= 1) return 0;
  return 1 - 3 * a * a + 2 * a * a * a;
}

double bump_eval(const Bump& b, double t, double x) {
  return bump1d((t - b.t0) / b.ht) * bump1d((x - b.x0) / b.hx);
}

// 6-point Gauss-Legendre nodes/weights on [-1, 1]
const double kGL6x[] = {-0.9324695142031521, -0.6612093864662645,
                        -0.2386191860831969, 0.2386191860831969,
                        0.6612093864662645,  0.9324695142031521};
const double kGL6w[] = {0.1713244923791704, 0.3607615730481386,
                        0.4679139345726910, 0.4679139345726910,
                        0.3607615730481386, 0.1713244923791704};

// Integral of phi(t, x(t)) dt along a straight segment, split at the bump's
// cubic knots so Gauss-Legendre is exact on every smooth piece.
double bump_line_integral(const Bump& b, double t0, double x0, double t1,
                          double x1) {
  if (t1 <= t0) return 0;
  const double slope = (x1 - x0) / (t1 - t0);
  std::vector<double> cuts{t0, t1};
  for (double knot : {-1.0, 0.0, 1.0}) {
    const double tc = b.t0 + knot * b.ht;
    if (tc > t0 && tc < t1) cuts.push_back(tc);
    if (slope != 0) {
      const double xc = b.x0 + knot * b.hx;
      const double tx = t0 + (xc - x0) / slope;
      if (tx > t0 && tx < t1) cuts.push_back(tx);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], c = cuts[i + 1];
    if (c - a <= 0) continue;
    for (int q = 0; q < 6; ++q) {
      const double t = 0.5 * (a + c) + 0.5 * (c - a) * kGL6x[q];
      const double x = x0 + slope * (t - t0);
      total += 0.5 * (c - a) * kGL6w[q] * bump_eval(b, t, x);
    }
  }
  return total;
}

void check_support(const Bump& b, const SolutionView& sol) {
  if (b.t0 - b.ht < sol.t_lo() - 1e-12 || b.t0 + b.ht > sol.t_hi() + 1e-12 ||
      b.x0 - b.hx < sol.x_lo() - 1e-12 || b.x0 + b.hx > sol.x_hi() + 1e-12)
    throw SupportViolation("bump support exceeds the solution domain");
}

}  // namespace

std::vector<Bump> standard_bumps(double T, double L) {
  std::vector<Bump> out;
  for (int level = 0; level < 2; ++level) {
    const double ht = T / 6 / (1 << level);
    const double hx = L / 6 / (1 << level);
    for (int i = 1; i <= 5; ++i)
      for (int j = 1; j <= 5; ++j)
        out.push_back(Bump{T * i / 6.0, ht, L * j / 6.0, hx});
  }
  return out;
}

double weak_residual(const SolutionView& sol, const SystemDef& sys,
                     const std::vector<Bump>& bumps) {
  double worst = 0;
  for (const auto& b : bumps) {
    check_support(b, sol);
    Vec acc = Vec::Zero(sys.n);
    sol.segments([&](const BaseSegment& s) {
      const double w = bump_line_integral(b, s.t0, s.x0, s.t1, s.x1);
      if (w == 0) return;
      const double slope = s.t1 > s.t0 ? (s.x1 - s.x0) / (s.t1 - s.t0) : 0.0;
      acc += w * (slope * (sys.H(s.uR) - sys.H(s.uL)) -
                  (sys.G(s.uR) - sys.G(s.uL)));
    });
    worst = std::max(worst, acc.cwiseAbs().maxCoeff());
  }
  return worst;
}

double entropy_residual(const SolutionView& sol, const SystemDef& sys,
                        const std::vector<Bump>& bumps) {
  if (!sys.entropy) throw NoEntropyPair(sys.name);
  const auto& ep = *sys.entropy;
  double worst = 0;
  for (const auto& b : bumps) {
    check_support(b, sol);
    double acc = 0;
    sol.segments([&](const BaseSegment& s) {
      const double w = bump_line_integral(b, s.t0, s.x0, s.t1, s.x1);
      if (w == 0) return;
      const double slope = s.t1 > s.t0 ? (s.x1 - s.x0) / (s.t1 - s.t0) : 0.0;
      acc += w * (slope * (ep.eta(s.uR) - ep.eta(s.uL)) -
                  (ep.zeta(s.uR) - ep.zeta(s.uL)));
    });
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

Def11Clauses def11_clauses(const SolutionView& sol, const SystemDef& sys,
                           const PiecewiseConstFn& ubar,
                           const PiecewiseConstFn& g1,
                           const PiecewiseConstFn& g2) {
  Def11Clauses out;
  out.init_l1 = l1_dist(sol.sample_time(sol.t_lo()), ubar);
  const auto bl = sol.trace_x(sol.x_lo()).transform(sys.b1.eval);
  const auto br = sol.trace_x(sol.x_hi()).transform(sys.b2.eval);
  out.left_l1 = l1_dist(bl, g1);
  out.right_l1 = l1_dist(br, g2);
  return out;
}

FrontChecks front_checks(const FrontSolution& sol, const SystemDef& sys) {
  FrontChecks out;
  out.np_total_max = sol.np_total_max;
  for (const auto& f : sol.fronts) {
    if (f.physical) {
      ++out.physical;
      out.max_rh = std::max(out.max_rh, rh_residual(sys, f.uL, f.uR, f.speed));
      const double lam = spectrum(sys, f.uL).lambdas[f.family];
      out.max_speed_dev = std::max(out.max_speed_dev, std::abs(f.speed - lam));
    } else {
      ++out.nonphysical;
      out.np_speed_dev =
          std::max(out.np_speed_dev, std::abs(f.speed - sol.lambda_hat));
    }
  }
  return out;
}

SegmentChecks segment_checks(const SolutionView& sol, const SystemDef& sys) {
  SegmentChecks out;
  sol.segments([&](const BaseSegment& s) {
    if (!s.physical) {
      ++out.nonphysical;
      return;
    }
    ++out.physical;
    if (s.t1 <= s.t0) return;
    const double slope = (s.x1 - s.x0) / (s.t1 - s.t0);
    out.max_rh = std::max(out.max_rh, rh_residual(sys, s.uL, s.uR, slope));
  });
  return out;
}

WellPosednessProfile wellposedness_profile(const SolutionView& sol,
                                           int slices) {
  WellPosednessProfile out;
  const double T = sol.t_hi() - sol.t_lo();
  PiecewiseConstFn prev;
  for (int k = 0; k <= slices; ++k) {
    const double t = sol.t_lo() + T * (k + 0.5) / (slices + 1);
    const auto u = sol.sample_time(t);
    out.times.push_back(t);
    out.tv.push_back(u.tv());
    out.tv_max = std::max(out.tv_max, u.tv());
    if (k > 0) {
      const double dt = out.times[k] - out.times[k - 1];
      const double lip = l1_dist(u, prev) / dt;
      out.lipschitz.push_back(lip);
      out.lipschitz_max = std::max(out.lipschitz_max, lip);
    }
    prev = u;
  }
  return out;
}

OracleProfile oracle_compare(const SolutionView& sol, const SystemDef& sys,
                             const PiecewiseConstFn& ubar,
                             const PiecewiseConstFn& g1,
                             const PiecewiseConstFn& g2, OracleKind kind,
                             const std::vector<double>& times,
                             int godunov_cells, double cfl) {
  OracleProfile out;
  out.times = times;
  if (kind == OracleKind::exact_characteristics) {
    const CharacteristicOracle oracle(sys, ubar, g1, g2);
    for (double t : times) {
      const auto ref = oracle.sample_grid(t, 2048);
      const double d = l1_dist(sol.sample_time(t), ref);
      out.l1_error.push_back(d);
      out.max_error = std::max(out.max_error, d);
    }
    return out;
  }
  for (double t : times) {
    const auto ref =
        t <= 1e-14 ? ubar : godunov_reference(sys, ubar, g1, g2, t,
                                              godunov_cells, cfl);
    const double d = l1_dist(sol.sample_time(t), ref);
    out.l1_error.push_back(d);
    out.max_error = std::max(out.max_error, d);
  }
  return out;
}

std::string ResidualReport::to_text() const {
  std::ostringstream os;
  os << "weak_residual " << weak << "\n";
  os << "weak_bound " << weak_bound << "\n";
  if (entropy >= 0) os << "entropy_residual " << entropy << "\n";
  os << "init_l1 " << clauses.init_l1 << "\n";
  os << "left_l1 " << clauses.left_l1 << "\n";
  os << "right_l1 " << clauses.right_l1 << "\n";
  os << "tv_max " << profile.tv_max << "\n";
  os << "lipschitz_max " << profile.lipschitz_max << "\n";
  return os.str();
}

ResidualReport verify_solution(const SolutionView& sol, const SystemDef& sys,
                               const PiecewiseConstFn& ubar,
                               const PiecewiseConstFn& g1,
                               const PiecewiseConstFn& g2) {
  ResidualReport rep;
  const auto bumps =
      standard_bumps(sol.t_hi() - sol.t_lo(), sol.x_hi() - sol.x_lo());
  // bumps are generated in local coordinates; shift to the solution patch
  std::vector<Bump> shifted = bumps;
  for (auto& b : shifted) {
    b.t0 += sol.t_lo();
    b.x0 += sol.x_lo();
  }
  rep.weak = weak_residual(sol, sys, shifted);
  rep.weak_bound =
      (sol.epsilon() + 1e-9) * (sol.t_hi() - sol.t_lo());
  if (sys.entropy) rep.entropy = entropy_residual(sol, sys, shifted);
  rep.clauses = def11_clauses(sol, sys, ubar, g1, g2);
  rep.profile = wellposedness_profile(sol);
  return rep;
}

}  // namespace ldft
