#include "ldft/directional.hpp"

#include <algorithm>
#include <cmath>

namespace ldft {

namespace {

double transform_lambda(Orientation o, double lam) {
  switch (o) {
    case Orientation::forward:
      return lam;
    case Orientation::backward:
      return -lam;
    case Orientation::rightward:
      return 1.0 / lam;
    case Orientation::leftward:
      return -1.0 / lam;
  }
  return lam;
}

}  // namespace

BoundaryMap eigenform_map(const SystemDef& effective_sys, int lo, int hi) {
  BoundaryMap bm;
  bm.dim = hi - lo + 1;
  SystemDef snapshot = effective_sys;  // immutable copy for the closure
  bm.eval = [snapshot, lo, hi](const Vec& u) {
    const Mat left = spectrum(snapshot, u).left;
    Vec out(hi - lo + 1);
    for (int i = lo; i <= hi; ++i) out[i - lo] = left.row(i).dot(u);
    return out;
  };
  return bm;  // jacobian installed by finalize() via finite differences
}

SystemDef oriented_system(const SystemDef& sys, Orientation o,
                          BoundaryMap bm_low, BoundaryMap bm_high) {
  if (o == Orientation::forward && !bm_low.eval && !bm_high.eval) return sys;

  const auto sd0 = spectrum(sys, sys.zero_state());
  if (o == Orientation::rightward || o == Orientation::leftward) {
    const double det = sys.DG(sys.zero_state()).determinant();
    if (std::abs(det) < 1e-12)
      throw SingularDG("cannot exchange t and x: det DG = " +
                       std::to_string(det));
  }

  // transformed spectrum at the origin fixes m and the block position
  std::vector<double> tl(sys.n);
  for (int i = 0; i < sys.n; ++i)
    tl[i] = transform_lambda(o, sd0.lambdas[i]);
  const double block_value =
      sys.has_block() ? tl[sys.mult.k] : std::numeric_limits<double>::quiet_NaN();
  std::sort(tl.begin(), tl.end());
  int m_eff = 0;
  while (m_eff < sys.n && tl[m_eff] < 0) ++m_eff;
  MultSpec mult_eff{0, 1};
  if (sys.has_block()) {
    int k = 0;
    while (k < sys.n && std::abs(tl[k] - block_value) > 1e-12) ++k;
    mult_eff = MultSpec{k, sys.mult.p};
  }

  SystemDef eff;
  switch (o) {
    case Orientation::forward:
      eff.name = sys.name;
      eff.H = sys.H;
      eff.G = sys.G;
      eff.DH = sys.DH;
      eff.DG = sys.DG;
      break;
    case Orientation::backward: {
      eff.name = sys.name + "~backward";
      eff.H = sys.H;
      eff.DH = sys.DH;
      auto g = sys.G;
      auto dg = sys.DG;
      eff.G = [g](const Vec& u) { return (-g(u)).eval(); };
      eff.DG = [dg](const Vec& u) { return (-dg(u)).eval(); };
      break;
    }
    case Orientation::rightward:
      eff.name = sys.name + "~rightward";
      eff.H = sys.G;
      eff.DH = sys.DG;
      eff.G = sys.H;
      eff.DG = sys.DH;
      break;
    case Orientation::leftward: {
      eff.name = sys.name + "~leftward";
      auto g = sys.G;
      auto dg = sys.DG;
      eff.H = [g](const Vec& u) { return (-g(u)).eval(); };
      eff.DH = [dg](const Vec& u) { return (-dg(u)).eval(); };
      eff.G = sys.H;
      eff.DG = sys.DH;
      break;
    }
  }
  eff.n = sys.n;
  eff.m = m_eff;
  eff.mult = mult_eff;
  eff.r_ball = sys.r_ball;

  // placeholder maps keep finalize() happy while the eigenframe is built
  {
    Mat P1 = Mat::Zero(sys.n - m_eff, sys.n);
    for (int i = 0; i < sys.n - m_eff; ++i) P1(i, i) = 1;
    Mat P2 = Mat::Zero(m_eff, sys.n);
    for (int i = 0; i < m_eff; ++i) P2(i, i) = 1;
    eff.b1 = BoundaryMap{int(P1.rows()),
                         [P1](const Vec& u) { return (P1 * u).eval(); },
                         [P1](const Vec&) { return P1; }};
    eff.b2 = BoundaryMap{int(P2.rows()),
                         [P2](const Vec& u) { return (P2 * u).eval(); },
                         [P2](const Vec&) { return P2; }};
  }
  eff.finalize();

  if (!bm_low.eval) bm_low = eigenform_map(eff, m_eff, sys.n - 1);
  if (!bm_high.eval) bm_high = eigenform_map(eff, 0, m_eff - 1);
  if (bm_low.dim != sys.n - m_eff || bm_high.dim != m_eff)
    throw DomainMismatch("oriented boundary map dimensions");
  eff.b1 = std::move(bm_low);
  eff.b2 = std::move(bm_high);
  eff.finalize();
  return eff;
}

SystemDef transpose_system(const SystemDef& sys) {
  return oriented_system(sys, Orientation::rightward, {}, {});
}

// ---- OrientedSolution -------------------------------------------------------

OrientedSolution::OrientedSolution(Orientation o, FrontSolution sol,
                                   double t_lo, double t_hi, double x_lo,
                                   double x_hi)
    : o_(o), sol_(std::move(sol)), t_lo_(t_lo), t_hi_(t_hi), x_lo_(x_lo),
      x_hi_(x_hi) {}

void OrientedSolution::to_eff(double t, double x, double& tau,
                              double& y) const {
  switch (o_) {
    case Orientation::forward:
      tau = t - t_lo_;
      y = x - x_lo_;
      break;
    case Orientation::backward:
      tau = t_hi_ - t;
      y = x - x_lo_;
      break;
    case Orientation::rightward:
      tau = x - x_lo_;
      y = t - t_lo_;
      break;
    case Orientation::leftward:
      tau = x_hi_ - x;
      y = t - t_lo_;
      break;
  }
}

Vec OrientedSolution::eval(double t, double x) const {
  double tau, y;
  to_eff(t, x, tau, y);
  tau = std::clamp(tau, 0.0, sol_.T);
  return sol_.eval(tau, y);
}

PiecewiseConstFn OrientedSolution::sample_time(double t) const {
  switch (o_) {
    case Orientation::forward:
      return sol_.sample(t - t_lo_).shifted(x_lo_);
    case Orientation::backward:
      return sol_.sample(t_hi_ - t).shifted(x_lo_);
    case Orientation::rightward:
      return sol_.time_trace(t - t_lo_).shifted(x_lo_);
    case Orientation::leftward:
      return sol_.time_trace(t - t_lo_).reversed().shifted(x_lo_);
  }
  throw OutOfDomain("orientation");
}

PiecewiseConstFn OrientedSolution::trace_x(double x) const {
  switch (o_) {
    case Orientation::forward:
      if (x <= x_lo_) return sol_.trace_left().shifted(t_lo_);
      if (x >= x_hi_) return sol_.trace_right().shifted(t_lo_);
      return sol_.time_trace(x - x_lo_).shifted(t_lo_);
    case Orientation::backward: {
      PiecewiseConstFn tr =
          x <= x_lo_ ? sol_.trace_left()
                     : (x >= x_hi_ ? sol_.trace_right()
                                   : sol_.time_trace(x - x_lo_));
      return tr.reversed().shifted(t_lo_);
    }
    case Orientation::rightward:
      return sol_.sample(std::clamp(x - x_lo_, 0.0, sol_.T)).shifted(t_lo_);
    case Orientation::leftward:
      return sol_.sample(std::clamp(x_hi_ - x, 0.0, sol_.T)).shifted(t_lo_);
  }
  throw OutOfDomain("orientation");
}

void OrientedSolution::segments(
    const std::function<void(const BaseSegment&)>& fn) const {
  auto from_eff = [&](double tau, double y, double& t, double& x) {
    switch (o_) {
      case Orientation::forward:
        t = t_lo_ + tau;
        x = x_lo_ + y;
        break;
      case Orientation::backward:
        t = t_hi_ - tau;
        x = x_lo_ + y;
        break;
      case Orientation::rightward:
        t = t_lo_ + y;
        x = x_lo_ + tau;
        break;
      case Orientation::leftward:
        t = t_lo_ + y;
        x = x_hi_ - tau;
        break;
    }
  };
  for (const auto& f : sol_.fronts) {
    BaseSegment s;
    from_eff(f.birth_t, f.birth_x, s.t0, s.x0);
    from_eff(f.death_t, f.death_x, s.t1, s.x1);
    if (s.t0 > s.t1) {
      std::swap(s.t0, s.t1);
      std::swap(s.x0, s.x1);
    }
    bool swap_sides = false;
    if (o_ == Orientation::rightward) swap_sides = f.speed > 0;
    if (o_ == Orientation::leftward) swap_sides = f.speed < 0;
    s.uL = swap_sides ? f.uR : f.uL;
    s.uR = swap_sides ? f.uL : f.uR;
    s.physical = f.physical;
    s.strength = f.physical ? 0.0 : f.strength();
    fn(s);
  }
}

void ForwardView::segments(
    const std::function<void(const BaseSegment&)>& fn) const {
  for (const auto& f : sol_.fronts) {
    BaseSegment s;
    s.t0 = f.birth_t;
    s.x0 = f.birth_x;
    s.t1 = f.death_t;
    s.x1 = f.death_x;
    s.uL = f.uL;
    s.uR = f.uR;
    s.physical = f.physical;
    s.strength = f.physical ? 0.0 : f.strength();
    fn(s);
  }
}

// ---- glue -------------------------------------------------------------------

GluedSolution::GluedSolution(std::shared_ptr<SolutionView> left,
                             std::shared_ptr<SolutionView> right,
                             double interface_x, double weld_gap)
    : left_(std::move(left)),
      right_(std::move(right)),
      interface_x_(interface_x),
      weld_gap_(weld_gap) {}

Vec GluedSolution::eval(double t, double x) const {
  return x < interface_x_ ? left_->eval(t, x) : right_->eval(t, x);
}

PiecewiseConstFn GluedSolution::sample_time(double t) const {
  auto l = left_->sample_time(t).restrict_to(left_->x_lo(), interface_x_);
  auto r = right_->sample_time(t).restrict_to(interface_x_, right_->x_hi());
  return concat(l, r);
}

PiecewiseConstFn GluedSolution::trace_x(double x) const {
  if (x < interface_x_) return left_->trace_x(x);
  if (x > interface_x_) return right_->trace_x(x);
  return left_->trace_x(x);
}

void GluedSolution::segments(
    const std::function<void(const BaseSegment&)>& fn) const {
  left_->segments(fn);
  right_->segments(fn);
  // weld seam: vertical pieces carrying the interface mismatch
  const auto lt = left_->trace_x(interface_x_);
  const auto rt = right_->trace_x(interface_x_);
  std::vector<double> edges;
  edges.push_back(lt.left());
  std::merge(lt.breaks().begin(), lt.breaks().end(), rt.breaks().begin(),
             rt.breaks().end(), std::back_inserter(edges));
  edges.push_back(lt.right());
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] - edges[i] <= 0) continue;
    const double mid = 0.5 * (edges[i] + edges[i + 1]);
    BaseSegment s;
    s.t0 = edges[i];
    s.t1 = edges[i + 1];
    s.x0 = s.x1 = interface_x_;
    s.uL = lt.eval(mid);
    s.uR = rt.eval(mid);
    if ((s.uR - s.uL).norm() == 0) continue;
    s.physical = false;
    s.strength = 0;  // weld mass is tracked by weld_gap, not the np budget
    fn(s);
  }
}

GluedSolution glue(std::shared_ptr<SolutionView> left,
                   std::shared_ptr<SolutionView> right, double glue_tol) {
  const double xi = left->x_hi();
  if (std::abs(right->x_lo() - xi) > 1e-9)
    throw InterfaceMismatch("half domains do not abut");
  const auto lt = left->trace_x(xi);
  const auto rt = right->trace_x(xi);
  const double gap = l1_dist(lt, rt);
  if (gap > glue_tol)
    throw InterfaceMismatch("interface trace distance " + std::to_string(gap) +
                            " > glue tolerance " + std::to_string(glue_tol));
  return GluedSolution(std::move(left), std::move(right), xi, gap);
}

// ---- oriented solve ---------------------------------------------------------

OrientedSolution solve_oriented(const SystemDef& base, Orientation o,
                                const PiecewiseConstFn& initial_axis_data,
                                const PiecewiseConstFn& bd_low,
                                const PiecewiseConstFn& bd_high,
                                BoundaryMap bm_low, BoundaryMap bm_high,
                                double span, const TrackerOpts& opts,
                                double base_t_anchor, double base_x_anchor) {
  const SystemDef eff =
      oriented_system(base, o, std::move(bm_low), std::move(bm_high));
  FrontSolution sol =
      evolve(eff, initial_axis_data, bd_low, bd_high, span, opts);
  const double width = initial_axis_data.right() - initial_axis_data.left();
  double t_lo = 0, t_hi = 0, x_lo = 0, x_hi = 0;
  switch (o) {
    case Orientation::forward:
      t_lo = base_t_anchor;
      t_hi = t_lo + span;
      x_lo = base_x_anchor;
      x_hi = x_lo + width;
      break;
    case Orientation::backward:
      t_hi = base_t_anchor;
      t_lo = t_hi - span;
      x_lo = base_x_anchor;
      x_hi = x_lo + width;
      break;
    case Orientation::rightward:
      x_lo = base_x_anchor;
      x_hi = x_lo + span;
      t_lo = base_t_anchor;
      t_hi = t_lo + width;
      break;
    case Orientation::leftward:
      x_hi = base_x_anchor;
      x_lo = x_hi - span;
      t_lo = base_t_anchor;
      t_hi = t_lo + width;
      break;
  }
  return OrientedSolution(o, std::move(sol), t_lo, t_hi, x_lo, x_hi);
}

// ---- determinate triangles ----------------------------------------------------

TriangleReport determinate_triangle(const SolutionView& a,
                                    const SolutionView& b,
                                    const SystemDef& sys, bool left_corner,
                                    double x_corner, int slices) {
  const auto ex = lambda_extrema(sys, 128);
  TriangleReport rep;
  const double L = a.x_hi();
  double tau_hat;
  if (left_corner) {
    tau_hat = x_corner / std::abs(ex.lambda_min[0]);
  } else {
    tau_hat = (L - x_corner) / ex.lambda_max[sys.n - 1];
  }
  tau_hat = std::min(tau_hat, a.t_hi() - a.t_lo());
  rep.slices = slices;
  for (int k = 0; k < slices; ++k) {
    const double t = a.t_lo() + tau_hat * (k + 0.5) / slices;
    double lo, hi;
    if (left_corner) {
      lo = 0;
      hi = x_corner * (tau_hat - (t - a.t_lo())) / tau_hat;
    } else {
      lo = x_corner + (L - x_corner) * (t - a.t_lo()) / tau_hat;
      hi = L;
    }
    if (hi - lo < 1e-12) continue;
    const auto fa = a.sample_time(t).restrict_to(lo, hi);
    const auto fb = b.sample_time(t).restrict_to(lo, hi);
    const double d = l1_dist(fa, fb);
    if (d > rep.max_l1) {
      rep.max_l1 = d;
      rep.at_time = t;
    }
  }
  return rep;
}

}  // namespace ldft
