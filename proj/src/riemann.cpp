#include "ldft/riemann.hpp"

#include <cmath>

#include "ldft/ode.hpp"

namespace ldft {

namespace {

void check_ball(const SystemDef& sys, const Vec& u, const char* where) {
  if (u.norm() > sys.r_ball * (1 + 1e-9))
    throw LeftBall(std::string(where) + ": |u| = " + std::to_string(u.norm()) +
                   " > r = " + std::to_string(sys.r_ball));
}

Vec flow(const SystemDef& sys, int family, const Vec& u0, double sigma,
         const CurveOpts& opts) {
  if (sigma == 0.0) return u0;
  auto rhs = [&sys, family](double, const Vec& u) {
    return spectrum(sys, u).right.col(family).eval();
  };
  return integrate_rk45(rhs, u0, 0.0, sigma, opts.tol);
}

}  // namespace

Vec contact_curve(const SystemDef& sys, int family, const Vec& u0,
                  double sigma, const CurveOpts& opts) {
  const double sigma0 = opts.sigma0_factor * sys.r_ball;
  if (std::abs(sigma) > sigma0)
    throw LeftBall("contact_curve: |sigma| exceeds solvability radius");
  const Vec u = flow(sys, family, u0, sigma, opts);
  check_ball(sys, u, "contact_curve");
  return u;
}

Vec contact_manifold(const SystemDef& sys, const Vec& u0,
                     const Vec& sigma_block, const CurveOpts& opts) {
  const int k = sys.mult.k, p = sys.mult.p;
  if (int(sigma_block.size()) != p)
    throw DomainMismatch("sigma_block size != multiplicity p");
  Vec u = u0;
  for (int j = p - 1; j >= 0; --j) u = flow(sys, k + j, u, sigma_block[j], opts);
  check_ball(sys, u, "contact_manifold");
  return u;
}

Vec compose(const SystemDef& sys, const Vec& u0, const Vec& sigma,
            const CurveOpts& opts, bool inverse) {
  const int n = sys.n, k = sys.mult.k, p = sys.mult.p;
  if (int(sigma.size()) != n) throw DomainMismatch("sigma size != n");
  Vec u = u0;
  if (!inverse) {
    int i = 0;
    while (i < n) {
      if (p > 1 && i == k) {
        u = contact_manifold(sys, u, sigma.segment(k, p), opts);
        i += p;
      } else {
        u = flow(sys, i, u, sigma[i], opts);
        ++i;
      }
    }
  } else {
    int i = n - 1;
    while (i >= 0) {
      if (p > 1 && i == k + p - 1) {
        // inverse of the manifold map: ascending order, negated amplitudes
        for (int j = 0; j < p; ++j) u = flow(sys, k + j, u, -sigma[k + j], opts);
        i -= p;
      } else {
        u = flow(sys, i, u, -sigma[i], opts);
        --i;
      }
    }
  }
  check_ball(sys, u, "compose");
  return u;
}

double rh_residual(const SystemDef& sys, const Vec& uL, const Vec& uR,
                   double s) {
  return (sys.G(uR) - sys.G(uL) - s * (sys.H(uR) - sys.H(uL))).norm();
}

namespace {

// Ascending recomposition of a solved amplitude vector into a chained fan.
// The final state is pinned to u_end exactly so region states stay chained.
void build_fan(const SystemDef& sys, const Vec& u_start, const Vec& sigma,
               int fam_lo, int fam_hi, const Vec& u_end, const CurveOpts& opts,
               WaveFan& fan) {
  const int k = sys.mult.k, p = sys.mult.p;
  Vec u = u_start;
  int i = fam_lo;
  struct Piece {
    int family;
    bool is_block;
    Vec amp;
    Vec uL, uR;
  };
  std::vector<Piece> pieces;
  while (i < fam_hi) {
    if (p > 1 && i == k) {
      const Vec amp = sigma.segment(k, p);
      if (amp.cwiseAbs().maxCoeff() > opts.merge_tol) {
        Vec next = contact_manifold(sys, u, amp, opts);
        pieces.push_back({k, true, amp, u, next});
        u = next;
      }
      i += p;
    } else {
      if (std::abs(sigma[i]) > opts.merge_tol) {
        Vec next = flow(sys, i, u, sigma[i], opts);
        pieces.push_back({i, false, Vec::Constant(1, sigma[i]), u, next});
        u = next;
      }
      ++i;
    }
  }
  if (!pieces.empty()) pieces.back().uR = u_end;
  for (auto& pc : pieces) {
    FanFront f;
    f.physical = true;
    f.family = pc.family;
    f.is_block = pc.is_block;
    f.amplitude = pc.amp;
    f.uL = pc.uL;
    f.uR = pc.uR;
    f.speed = spectrum(sys, pc.uL).lambdas[pc.family];
    fan.fronts.push_back(std::move(f));
  }
}

struct NewtonResult {
  Vec sigma;
  int iters = 0;
};

// Damped Newton on F; steps that leave the ball are treated as rejected.
NewtonResult damped_newton(const std::function<Vec(const Vec&)>& F, Vec sigma,
                           const CurveOpts& opts, double fd_step,
                           const char* who) {
  auto safe_eval = [&](const Vec& s, Vec& out) -> bool {
    try {
      out = F(s);
      return true;
    } catch (const LeftBall&) {
      return false;
    }
  };
  Vec r;
  if (!safe_eval(sigma, r)) throw LeftBall(std::string(who) + ": initial state");
  const int dim = int(sigma.size());
  for (int iter = 0; iter < opts.newton_max; ++iter) {
    if (r.norm() <= opts.newton_tol) return {sigma, iter};
    Mat J(r.size(), dim);
    for (int j = 0; j < dim; ++j) {
      Vec sp = sigma, sm = sigma;
      sp[j] += fd_step;
      sm[j] -= fd_step;
      Vec rp, rm;
      if (!safe_eval(sp, rp) || !safe_eval(sm, rm))
        throw NoConvergence(std::string(who) + ": jacobian probe left ball");
      J.col(j) = (rp - rm) / (2 * fd_step);
    }
    Eigen::PartialPivLU<Mat> lu(J);
    if (std::abs(lu.determinant()) < 1e-14)
      throw BadBoundaryMap(std::string(who) + ": singular newton jacobian");
    const Vec step = lu.solve(-r);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 8; ++ls) {
      Vec trial = sigma + alpha * step;
      Vec rt;
      if (safe_eval(trial, rt) && rt.norm() < r.norm() * (1 - 0.25 * alpha)) {
        sigma = trial;
        r = rt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // accept a plain full step once near convergence, else give up
      Vec trial = sigma + step;
      Vec rt;
      if (safe_eval(trial, rt) && rt.norm() < r.norm()) {
        sigma = trial;
        r = rt;
      } else {
        throw NoConvergence(std::string(who) + ": line search stalled, |F| = " +
                            std::to_string(r.norm()));
      }
    }
  }
  if (r.norm() <= opts.newton_tol * 100) return {sigma, opts.newton_max};
  throw NoConvergence(std::string(who) + ": |F| = " + std::to_string(r.norm()));
}

}  // namespace

WaveFan solve_riemann(const SystemDef& sys, const Vec& uL, const Vec& uR,
                      const CurveOpts& opts) {
  WaveFan fan;
  fan.u_boundary = uR;
  if ((uR - uL).norm() <= opts.merge_tol) return fan;

  const SpectralData sd = spectrum(sys, uL);
  const Vec sigma0 = sd.left * (uR - uL);  // exact for constant fields

  auto F = [&](const Vec& s) {
    return (compose(sys, uL, s, opts) - uR).eval();
  };
  const double fd_step = 1e-6 * std::max(1.0, sys.r_ball);
  auto res = damped_newton(F, sigma0, opts, fd_step, "solve_riemann");
  fan.newton_iters = res.iters;

  build_fan(sys, uL, res.sigma, 0, sys.n, uR, opts, fan);
  return fan;
}

WaveFan solve_boundary_left(const SystemDef& sys, const Vec& g,
                            const Vec& u_inner, const CurveOpts& opts) {
  const int n = sys.n, m = sys.m;
  const int nout = n - m;
  WaveFan fan;
  if (nout == 0) {
    fan.u_boundary = u_inner;
    return fan;
  }
  if (int(g.size()) != nout)
    throw DomainMismatch("g size != n-m in solve_boundary_left");

  // u_b(sigma): inverse composition of the outgoing families from u_inner.
  auto wall_state = [&](const Vec& s_out) {
    Vec full = Vec::Zero(n);
    full.tail(nout) = s_out;
    return compose(sys, u_inner, full, opts, /*inverse=*/true);
  };
  auto F = [&](const Vec& s_out) {
    return (sys.b1.eval(wall_state(s_out)) - g).eval();
  };
  const double fd_step = 1e-6 * std::max(1.0, sys.r_ball);
  auto res = damped_newton(F, Vec::Zero(nout), opts, fd_step,
                           "solve_boundary_left");
  fan.newton_iters = res.iters;

  const Vec u_b = wall_state(res.sigma);
  fan.u_boundary = u_b;
  Vec full = Vec::Zero(n);
  full.tail(nout) = res.sigma;
  build_fan(sys, u_b, full, m, n, u_inner, opts, fan);
  return fan;
}

WaveFan solve_boundary_right(const SystemDef& sys, const Vec& g,
                             const Vec& u_inner, const CurveOpts& opts) {
  const int n = sys.n, m = sys.m;
  WaveFan fan;
  if (m == 0) {
    fan.u_boundary = u_inner;
    return fan;
  }
  if (int(g.size()) != m)
    throw DomainMismatch("g size != m in solve_boundary_right");

  auto wall_state = [&](const Vec& s_in) {
    Vec full = Vec::Zero(n);
    full.head(m) = s_in;
    return compose(sys, u_inner, full, opts);
  };
  auto F = [&](const Vec& s_in) {
    return (sys.b2.eval(wall_state(s_in)) - g).eval();
  };
  const double fd_step = 1e-6 * std::max(1.0, sys.r_ball);
  auto res = damped_newton(F, Vec::Zero(m), opts, fd_step,
                           "solve_boundary_right");
  fan.newton_iters = res.iters;

  const Vec u_b = wall_state(res.sigma);
  fan.u_boundary = u_b;
  Vec full = Vec::Zero(n);
  full.head(m) = res.sigma;
  build_fan(sys, u_inner, full, 0, m, u_b, opts, fan);
  return fan;
}

}  // namespace ldft
