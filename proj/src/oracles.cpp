#include "ldft/oracles.hpp"

#include <cmath>

namespace ldft {

CharacteristicOracle::CharacteristicOracle(const SystemDef& sys,
                                           PiecewiseConstFn ubar,
                                           PiecewiseConstFn g1,
                                           PiecewiseConstFn g2)
    : sys_(sys),
      ubar_(std::move(ubar)),
      g1_(std::move(g1)),
      g2_(std::move(g2)),
      L_(ubar_.right()) {
  const Mat A = sys.DH(sys.zero_state())
                    .partialPivLu()
                    .solve(sys.DG(sys.zero_state()));
  // constant-coefficient check: the Jacobian must not vary over the ball
  Vec probe = Vec::Constant(sys.n, 0.3 * sys.r_ball / std::sqrt(double(sys.n)));
  const Mat A2 = sys.DH(probe).partialPivLu().solve(sys.DG(probe));
  if ((A - A2).cwiseAbs().maxCoeff() > 1e-11)
    throw NoOracle("characteristic oracle needs a constant-coefficient system");
  const auto sd = spectrum(sys, sys.zero_state());
  lambdas_ = sd.lambdas;
  right_ = sd.right;
  left_ = sd.left;
}

Vec CharacteristicOracle::wall_state_left(double s, int depth) const {
  // incoming characteristic components at (s, 0+) are the negative families
  const int n = sys_.n, m = sys_.m;
  Vec w_in(m);
  for (int j = 0; j < m; ++j) w_in[j] = wi(j, s, 0.0, depth);
  // solve b1(u) = g1(s) with the incoming components frozen
  const Vec g = g1_.eval(s);
  Vec w_out = Vec::Zero(n - m);
  for (int iter = 0; iter < 50; ++iter) {
    Vec u = Vec::Zero(n);
    for (int j = 0; j < m; ++j) u += w_in[j] * right_.col(j);
    for (int j = 0; j < n - m; ++j) u += w_out[j] * right_.col(m + j);
    const Vec r = sys_.b1.eval(u) - g;
    if (r.norm() < 1e-13) break;
    Mat J(n - m, n - m);
    const Mat db = sys_.b1.jac(u);
    for (int j = 0; j < n - m; ++j) J.col(j) = db * right_.col(m + j);
    w_out -= J.partialPivLu().solve(r);
  }
  Vec u = Vec::Zero(n);
  for (int j = 0; j < m; ++j) u += w_in[j] * right_.col(j);
  for (int j = 0; j < n - m; ++j) u += w_out[j] * right_.col(m + j);
  return u;
}

Vec CharacteristicOracle::wall_state_right(double s, int depth) const {
  const int n = sys_.n, m = sys_.m;
  Vec w_in(n - m);
  for (int j = 0; j < n - m; ++j) w_in[j] = wi(m + j, s, L_, depth);
  const Vec g = g2_.eval(s);
  Vec w_out = Vec::Zero(m);
  for (int iter = 0; iter < 50; ++iter) {
    Vec u = Vec::Zero(n);
    for (int j = 0; j < n - m; ++j) u += w_in[j] * right_.col(m + j);
    for (int j = 0; j < m; ++j) u += w_out[j] * right_.col(j);
    const Vec r = sys_.b2.eval(u) - g;
    if (r.norm() < 1e-13) break;
    Mat J(m, m);
    const Mat db = sys_.b2.jac(u);
    for (int j = 0; j < m; ++j) J.col(j) = db * right_.col(j);
    w_out -= J.partialPivLu().solve(r);
  }
  Vec u = Vec::Zero(n);
  for (int j = 0; j < n - m; ++j) u += w_in[j] * right_.col(m + j);
  for (int j = 0; j < m; ++j) u += w_out[j] * right_.col(j);
  return u;
}

double CharacteristicOracle::wi(int family, double t, double x,
                                int depth) const {
  if (depth > 64) throw NoOracle("characteristic recursion too deep");
  const double lam = lambdas_[family];
  const double x0 = x - lam * t;
  if (x0 > 0 && x0 < L_) return left_.row(family).dot(ubar_.eval(x0));
  if (lam > 0) {
    const double s = t - x / lam;
    return left_.row(family).dot(wall_state_left(s, depth + 1));
  }
  const double s = t - (L_ - x) / (-lam);
  return left_.row(family).dot(wall_state_right(s, depth + 1));
}

Vec CharacteristicOracle::eval(double t, double x) const {
  Vec u = Vec::Zero(sys_.n);
  for (int i = 0; i < sys_.n; ++i) u += wi(i, t, x, 0) * right_.col(i);
  return u;
}

PiecewiseConstFn CharacteristicOracle::sample_grid(double t, int cells) const {
  std::vector<double> breaks;
  std::vector<Vec> vals;
  const double h = L_ / cells;
  for (int i = 0; i < cells; ++i) {
    if (i > 0) breaks.push_back(i * h);
    vals.push_back(eval(t, (i + 0.5) * h));
  }
  return PiecewiseConstFn(0, L_, std::move(breaks), std::move(vals));
}

PiecewiseConstFn godunov_reference(const SystemDef& sys,
                                   const PiecewiseConstFn& ubar,
                                   const PiecewiseConstFn& g1,
                                   const PiecewiseConstFn& g2, double T,
                                   int cells, double cfl) {
  const int n = sys.n, m = sys.m;
  {
    // H = id is all this reference handles
    const Mat dh = sys.DH(sys.zero_state());
    if ((dh - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
      throw NoOracle("finite-volume reference needs H = id");
  }
  const double L = ubar.right();
  const double h = L / cells;
  std::vector<Vec> U(cells);
  for (int i = 0; i < cells; ++i) U[i] = ubar.eval((i + 0.5) * h);

  const auto sd0 = spectrum(sys, sys.zero_state());
  const Mat left0 = sd0.left;
  // one conservative wave speed for the whole run keeps the flux cheap
  const double alpha = 1.1 * lambda_extrema(sys, 64).max_abs;

  // ghost state: boundary condition rows + extrapolated outgoing invariants
  auto ghost = [&](bool left_wall, const Vec& u_in, const Vec& g) {
    Vec u = u_in;
    for (int iter = 0; iter < 60; ++iter) {
      Vec r(n);
      Mat J(n, n);
      if (left_wall) {
        for (int j = 0; j < m; ++j) {
          r[j] = left0.row(j).dot(u - u_in);
          J.row(j) = left0.row(j);
        }
        const Vec bv = sys.b1.eval(u) - g;
        const Mat bj = sys.b1.jac(u);
        for (int j = 0; j < n - m; ++j) {
          r[m + j] = bv[j];
          J.row(m + j) = bj.row(j);
        }
      } else {
        for (int j = 0; j < n - m; ++j) {
          r[j] = left0.row(m + j).dot(u - u_in);
          J.row(j) = left0.row(m + j);
        }
        const Vec bv = sys.b2.eval(u) - g;
        const Mat bj = sys.b2.jac(u);
        for (int j = 0; j < m; ++j) {
          r[n - m + j] = bv[j];
          J.row(n - m + j) = bj.row(j);
        }
      }
      if (r.norm() < 1e-12) break;
      u -= J.partialPivLu().solve(r);
    }
    return u;
  };

  double t = 0;
  while (t < T - 1e-14) {
    const double dt = std::min(cfl * h / alpha, T - t);
    const Vec gl = ghost(true, U[0], g1.eval(t));
    const Vec gr = ghost(false, U[cells - 1], g2.eval(t));

    auto llf = [&](const Vec& a, const Vec& b) {
      return (0.5 * (sys.G(a) + sys.G(b)) - 0.5 * alpha * (b - a)).eval();
    };
    std::vector<Vec> flux(cells + 1);
    flux[0] = llf(gl, U[0]);
    for (int i = 1; i < cells; ++i) flux[i] = llf(U[i - 1], U[i]);
    flux[cells] = llf(U[cells - 1], gr);

    for (int i = 0; i < cells; ++i) U[i] -= (dt / h) * (flux[i + 1] - flux[i]);
    t += dt;
  }

  std::vector<double> breaks;
  std::vector<Vec> vals;
  for (int i = 0; i < cells; ++i) {
    if (i > 0) breaks.push_back(i * h);
    vals.push_back(U[i]);
  }
  return PiecewiseConstFn(0, L, std::move(breaks), std::move(vals));
}

}  // namespace ldft
