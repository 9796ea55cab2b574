#include "ldft/tracker.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace ldft {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}
}  // namespace

double crossing_time(double bt1, double bx1, double s1, double bt2, double bx2,
                     double s2) {
  if (s1 <= s2 + 1e-14) return kInf;
  return ((bx2 - s2 * bt2) - (bx1 - s1 * bt1)) / (s1 - s2);
}

namespace {

// Applies one physical front's amplitude as a wave-curve map.
Vec apply_front(const SystemDef& sys, const Front& f, const Vec& u,
                const CurveOpts& curve, bool inverse) {
  if (f.is_block) {
    if (!inverse) return contact_manifold(sys, u, f.amplitude, curve);
    Vec v = u;
    for (int j = 0; j < int(f.amplitude.size()); ++j)
      v = contact_curve(sys, sys.mult.k + j, v, -f.amplitude[j], curve);
    return v;
  }
  const double a = inverse ? -f.amplitude[0] : f.amplitude[0];
  return contact_curve(sys, f.family, u, a, curve);
}

struct Engine {
  const SystemDef& sys;
  const TrackerOpts& opts;
  const PiecewiseConstFn& g1;
  const PiecewiseConstFn& g2;
  double T, L;
  double eps;
  double lambda_hat;
  double ball_margin;

  std::vector<Front> ledger;
  std::vector<int> live;
  Vec left_state;
  double np_total = 0;
  double t_cur = 0;
  size_t jump1 = 0, jump2 = 0;  // consumed boundary-data jumps
  std::vector<EventRecord> events;
  std::vector<TimeSlab> slabs;
  double np_total_max = 0;

  Engine(const SystemDef& s, const TrackerOpts& o, const PiecewiseConstFn& a,
         const PiecewiseConstFn& b, double horizon)
      : sys(s), opts(o), g1(a), g2(b), T(horizon), L(0), eps(o.epsilon) {
    ball_margin = 0.9 * sys.r_ball;
    const auto ex = lambda_extrema(sys, opts.extrema_samples);
    lambda_hat = opts.np_fast ? 2.0 * ex.max_abs : 0.5 * ex.c_est;
  }

  Front& F(int id) { return ledger[id]; }
  const Front& F(int id) const { return ledger[id]; }

  Vec g1_now() const { return g1.values()[jump1]; }
  Vec g2_now() const { return g2.values()[jump2]; }

  void check_state(const Vec& u) const {
    if (u.norm() > ball_margin)
      throw BallEscape("|u| = " + std::to_string(u.norm()) + " > 0.9 r = " +
                       std::to_string(ball_margin) + " at t = " +
                       std::to_string(t_cur));
  }

  int new_front(Front f) {
    if (int(ledger.size()) >= opts.front_cap)
      throw EventOverflow("front cap " + std::to_string(opts.front_cap) +
                          " exceeded (epsilon too small for this data?)");
    f.id = int(ledger.size());
    f.death_t = T;
    f.death_x = f.x_at(T);
    check_state(f.uL);
    check_state(f.uR);
    ledger.push_back(std::move(f));
    return ledger.back().id;
  }

  std::vector<int> fronts_from_fan(const WaveFan& fan, double t, double x,
                                   int gen) {
    std::vector<int> ids;
    for (const auto& ff : fan.fronts) {
      Front f;
      f.physical = true;
      f.family = ff.family;
      f.is_block = ff.is_block;
      f.amplitude = ff.amplitude;
      f.speed = ff.speed;
      f.birth_t = t;
      f.birth_x = x;
      f.uL = ff.uL;
      f.uR = ff.uR;
      f.generation = gen;
      ids.push_back(new_front(std::move(f)));
    }
    return ids;
  }

  int make_np(const Vec& uL, const Vec& uR, double t, double x, int gen) {
    Front f;
    f.physical = false;
    f.family = -1;
    f.amplitude = uR - uL;
    f.speed = lambda_hat;
    f.birth_t = t;
    f.birth_x = x;
    f.uL = uL;
    f.uR = uR;
    f.generation = gen;
    np_total += f.strength();
    np_total_max = std::max(np_total_max, np_total);
    if (np_total > eps * (1 + 1e-9))
      throw EpsilonBudgetBlown("nonphysical total " +
                               std::to_string(np_total) + " > epsilon " +
                               std::to_string(eps));
    return new_front(std::move(f));
  }

  void kill(int id, double t, double x) {
    F(id).death_t = t;
    F(id).death_x = x;
    if (!F(id).physical) np_total -= F(id).strength();
  }

  // ---- event queue -------------------------------------------------------

  struct Cand {
    double t = kInf;
    int pri = 99;  // 0 left wall, 1 right wall, 2 jump left, 3 jump right,
                   // 4 crossing
    double x = 0;
    int slot = -1;  // crossing: index into live; walls: front id
    bool better(const Cand& o) const {
      if (t != o.t) return t < o.t;
      if (pri != o.pri) return pri < o.pri;
      if (x != o.x) return x < o.x;
      return slot < o.slot;
    }
  };

  Cand next_event() const {
    Cand best;
    auto offer = [&](const Cand& c) {
      if (c.t < kInf && c.better(best)) best = c;
    };
    // wall hits: only the outermost fronts can reach a wall next
    if (!live.empty()) {
      const Front& head = F(live.front());
      if (head.speed < 0) {
        const double th =
            std::max(head.birth_t - head.birth_x / head.speed, t_cur);
        offer({th, 0, 0.0, live.front()});
      }
      const Front& tail = F(live.back());
      if (tail.speed > 0) {
        const double th =
            std::max(tail.birth_t + (L - tail.birth_x) / tail.speed, t_cur);
        offer({th, 1, L, live.back()});
      }
    }
    if (jump1 < g1.breaks().size())
      offer({g1.breaks()[jump1], 2, 0.0, -1});
    if (jump2 < g2.breaks().size())
      offer({g2.breaks()[jump2], 3, L, -1});
    for (size_t i = 0; i + 1 < live.size(); ++i) {
      const Front& a = F(live[i]);
      const Front& b = F(live[i + 1]);
      const double tc = crossing_time(a.birth_t, a.birth_x, a.speed, b.birth_t,
                                      b.birth_x, b.speed);
      if (tc == kInf) continue;
      const double t = std::max(tc, t_cur);
      offer({t, 4, a.x_at(t), int(i)});
    }
    return best;
  }

  // ---- event handlers ----------------------------------------------------

  void record(EventRecord::Kind kind, double t, double x, std::vector<int> in,
              std::vector<int> out) {
    events.push_back({kind, t, x, std::move(in), std::move(out)});
  }

  void left_wall(int id, double t) {
    kill(id, t, 0.0);
    live.erase(live.begin());
    const Vec u_inner = F(id).uR;
    const auto fan = solve_boundary_left(sys, g1_now(), u_inner, opts.curve);
    auto ids = fronts_from_fan(fan, t, 0.0, F(id).generation + 1);
    live.insert(live.begin(), ids.begin(), ids.end());
    left_state = fan.u_boundary;
    record(EventRecord::kLeftWall, t, 0.0, {id}, std::move(ids));
  }

  void right_wall(int id, double t) {
    kill(id, t, L);
    live.pop_back();
    const Vec u_inner = F(id).uL;
    const auto fan = solve_boundary_right(sys, g2_now(), u_inner, opts.curve);
    auto ids = fronts_from_fan(fan, t, L, F(id).generation + 1);
    live.insert(live.end(), ids.begin(), ids.end());
    record(EventRecord::kRightWall, t, L, {id}, std::move(ids));
  }

  void data_jump_left(double t) {
    ++jump1;
    const Vec u_inner = left_state;
    const auto fan = solve_boundary_left(sys, g1_now(), u_inner, opts.curve);
    auto ids = fronts_from_fan(fan, t, 0.0, 0);
    live.insert(live.begin(), ids.begin(), ids.end());
    left_state = fan.u_boundary;
    record(EventRecord::kDataJumpLeft, t, 0.0, {}, std::move(ids));
  }

  void data_jump_right(double t) {
    ++jump2;
    const Vec u_inner = live.empty() ? left_state : F(live.back()).uR;
    const auto fan = solve_boundary_right(sys, g2_now(), u_inner, opts.curve);
    auto ids = fronts_from_fan(fan, t, L, 0);
    live.insert(live.end(), ids.begin(), ids.end());
    record(EventRecord::kDataJumpRight, t, L, {}, std::move(ids));
  }

  // physical front transmitted through a nonphysical one
  std::vector<int> transmit_np(const Front& A, const Front& B, double t,
                               double x) {
    std::vector<int> out;
    if (!A.physical) {
      // np on the left catches the physical front B
      const Vec w = apply_front(sys, B, A.uL, opts.curve, false);
      Front phys;
      phys.physical = true;
      phys.family = B.family;
      phys.is_block = B.is_block;
      phys.amplitude = B.amplitude;
      phys.speed = spectrum(sys, A.uL).lambdas[B.family];
      phys.birth_t = t;
      phys.birth_x = x;
      phys.uL = A.uL;
      phys.uR = w;
      phys.generation = B.generation;
      const int pid = new_front(std::move(phys));
      const int nid = make_np(w, B.uR, t, x, A.generation);
      if (F(pid).speed < lambda_hat) {
        out = {pid, nid};
      } else {
        out = {nid, pid};
      }
    } else {
      // physical front A catches the np (slow branch, or fast np ahead)
      const Vec w = apply_front(sys, A, B.uR, opts.curve, true);
      const int nid = make_np(A.uL, w, t, x, B.generation);
      Front phys;
      phys.physical = true;
      phys.family = A.family;
      phys.is_block = A.is_block;
      phys.amplitude = A.amplitude;
      phys.speed = spectrum(sys, w).lambdas[A.family];
      phys.birth_t = t;
      phys.birth_x = x;
      phys.uL = w;
      phys.uR = B.uR;
      phys.generation = A.generation;
      const int pid = new_front(std::move(phys));
      out = {nid, pid};
    }
    return out;
  }

  // amplitude slot of a front in a full sigma vector
  void transfer_amplitude(const Front& f, const Vec& sigma_full,
                          Vec& out) const {
    if (f.is_block)
      out.segment(sys.mult.k, sys.mult.p) =
          sigma_full.segment(sys.mult.k, sys.mult.p);
    else
      out[f.family] = sigma_full[f.family];
  }

  std::vector<int> simplified_fan(const Front& A, const Front& B,
                                  const Vec& sigma_full, double t, double x,
                                  int gen) {
    // transmit the incoming families with their accurate amplitudes; the
    // remainder becomes one nonphysical front positioned by speed
    struct Piece {
      const Front* f;
      Vec amp;
    };
    auto slot_amp = [&](const Front& f) {
      if (f.is_block) return Vec(sigma_full.segment(sys.mult.k, sys.mult.p));
      return Vec(Vec::Constant(1, sigma_full[f.family]));
    };
    std::vector<Piece> pieces = {{&B, slot_amp(B)}, {&A, slot_amp(A)}};
    // ascending family order: B (slower, lower family) first
    std::vector<Piece> left_part, right_part;
    for (const auto& pc : pieces) {
      const double lam = spectrum(sys, A.uL).lambdas[pc.f->family];
      (lam < lambda_hat ? left_part : right_part).push_back(pc);
    }
    std::vector<int> out;
    Vec u = A.uL;
    for (const auto& pc : left_part) {
      Front nf;
      nf.physical = true;
      nf.family = pc.f->family;
      nf.is_block = pc.f->is_block;
      nf.amplitude = pc.amp;
      nf.uL = u;
      nf.uR = apply_front(sys, nf, u, opts.curve, false);
      nf.speed = spectrum(sys, u).lambdas[nf.family];
      nf.birth_t = t;
      nf.birth_x = x;
      nf.generation = gen;
      u = nf.uR;
      out.push_back(new_front(std::move(nf)));
    }
    Vec v = B.uR;
    std::vector<int> right_ids;
    for (auto it = right_part.rbegin(); it != right_part.rend(); ++it) {
      Front nf;
      nf.physical = true;
      nf.family = it->f->family;
      nf.is_block = it->f->is_block;
      nf.amplitude = it->amp;
      nf.uL = apply_front(sys, nf, v, opts.curve, true);
      nf.uR = v;
      nf.speed = spectrum(sys, nf.uL).lambdas[nf.family];
      nf.birth_t = t;
      nf.birth_x = x;
      nf.generation = gen;
      v = nf.uL;
      right_ids.push_back(new_front(std::move(nf)));
    }
    if ((v - u).norm() > opts.curve.merge_tol)
      out.push_back(make_np(u, v, t, x, gen));
    out.insert(out.end(), right_ids.rbegin(), right_ids.rend());
    return out;
  }

  void crossing(size_t i, double t, double x) {
    const int ida = live[i], idb = live[i + 1];
    const Front A = F(ida);
    const Front B = F(idb);
    kill(ida, t, x);
    kill(idb, t, x);

    std::vector<int> out;
    if (!A.physical || !B.physical) {
      out = transmit_np(A, B, t, x);
    } else {
      const int gen = std::max(A.generation, B.generation);
      const auto fan = solve_riemann(sys, A.uL, B.uR, opts.curve);
      const bool strong =
          A.strength() * B.strength() >= opts.rho_simp * eps * eps;
      if (gen < opts.gen_cap || strong) {
        out = fronts_from_fan(fan, t, x, gen + 1);
      } else {
        Vec sigma_full = Vec::Zero(sys.n);
        for (const auto& ff : fan.fronts) {
          if (ff.is_block)
            sigma_full.segment(sys.mult.k, sys.mult.p) = ff.amplitude;
          else
            sigma_full[ff.family] = ff.amplitude[0];
        }
        out = simplified_fan(A, B, sigma_full, t, x, gen + 1);
      }
    }
    const auto at = live.begin() + std::ptrdiff_t(i);
    live.erase(at, at + 2);
    live.insert(live.begin() + std::ptrdiff_t(i), out.begin(), out.end());
    record(EventRecord::kCrossing, t, x, {ida, idb}, std::move(out));
  }

  // ---- main loop ---------------------------------------------------------

  void close_slab(double t1) {
    if (t1 <= t_cur) return;
    TimeSlab s;
    s.t0 = t_cur;
    s.t1 = t1;
    s.live = live;
    s.x0.reserve(live.size());
    for (int id : live) s.x0.push_back(F(id).x_at(t_cur));
    s.left_state = left_state;
    s.np_total = np_total;
    slabs.push_back(std::move(s));
    t_cur = t1;
  }

  void init(const PiecewiseConstFn& ubar) {
    L = ubar.right();
    for (const Vec& v : ubar.values()) check_state(v);
    left_state = ubar.first();

    // left corner: compatibility fan at (0, 0)
    {
      const auto fan =
          solve_boundary_left(sys, g1_now(), ubar.first(), opts.curve);
      auto ids = fronts_from_fan(fan, 0, 0, 0);
      live.insert(live.end(), ids.begin(), ids.end());
      left_state = fan.u_boundary;
    }
    // interior Riemann fans at the data breakpoints
    for (size_t j = 0; j < ubar.breaks().size(); ++j) {
      const auto fan = solve_riemann(sys, ubar.values()[j], ubar.values()[j + 1],
                                     opts.curve);
      auto ids = fronts_from_fan(fan, 0, ubar.breaks()[j], 0);
      live.insert(live.end(), ids.begin(), ids.end());
    }
    // right corner
    {
      const auto fan =
          solve_boundary_right(sys, g2_now(), ubar.last(), opts.curve);
      auto ids = fronts_from_fan(fan, 0, L, 0);
      live.insert(live.end(), ids.begin(), ids.end());
    }
  }

  FrontSolution run(const PiecewiseConstFn& ubar) {
    init(ubar);
    int processed = 0;
    while (true) {
      const Cand c = next_event();
      if (c.t >= T) break;
      close_slab(c.t);
      switch (c.pri) {
        case 0:
          left_wall(c.slot, c.t);
          break;
        case 1:
          right_wall(c.slot, c.t);
          break;
        case 2:
          data_jump_left(c.t);
          break;
        case 3:
          data_jump_right(c.t);
          break;
        default:
          crossing(size_t(c.slot), c.t, c.x);
      }
      if (++processed > opts.event_cap)
        throw EventOverflow("event cap " + std::to_string(opts.event_cap) +
                            " exceeded");
    }
    close_slab(T);

    FrontSolution sol;
    sol.T = T;
    sol.L = L;
    sol.epsilon = eps;
    sol.lambda_hat = lambda_hat;
    sol.fronts = std::move(ledger);
    sol.events = std::move(events);
    sol.slabs = std::move(slabs);
    sol.np_total_max = np_total_max;
    return sol;
  }
};

}  // namespace

FrontSolution evolve(const SystemDef& sys, const PiecewiseConstFn& ubar,
                     const PiecewiseConstFn& g1, const PiecewiseConstFn& g2,
                     double T, const TrackerOpts& opts) {
  if (!(T > 0)) throw OutOfDomain("evolve: T must be positive");
  if (std::abs(ubar.left()) > 1e-12)
    throw DomainMismatch("evolve: initial data must start at x = 0");
  if (ubar.dim() != sys.n) throw DomainMismatch("evolve: state dim");
  if (g1.dim() != sys.n - sys.m || g2.dim() != sys.m)
    throw DomainMismatch("evolve: boundary data dims");
  if (std::abs(g1.left()) > 1e-12 || std::abs(g1.right() - T) > 1e-9 ||
      std::abs(g2.left()) > 1e-12 || std::abs(g2.right() - T) > 1e-9)
    throw DomainMismatch("evolve: boundary data must live on (0, T)");

  const double delta =
      opts.delta_cap >= 0 ? opts.delta_cap : 0.25 * sys.r_ball;
  const auto B = budget(ubar, g1, g2, sys.b1.eval, sys.b2.eval);
  if (B.total > delta)
    throw BudgetExceeded("smallness budget " + std::to_string(B.total) +
                         " > delta " + std::to_string(delta));

  Engine eng(sys, opts, g1, g2, T);
  return eng.run(ubar);
}

// ---- FrontSolution evaluation ---------------------------------------------

const TimeSlab& FrontSolution::slab_at(double t) const {
  if (t < 0 || t > T + 1e-12 || slabs.empty())
    throw OutOfDomain("time " + std::to_string(t));
  // last slab whose start is <= t
  size_t lo = 0, hi = slabs.size();
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (slabs[mid].t0 <= t)
      lo = mid;
    else
      hi = mid;
  }
  return slabs[lo];
}

Vec FrontSolution::eval(double t, double x) const {
  const TimeSlab& s = slab_at(t);
  Vec v = s.left_state;
  for (size_t i = 0; i < s.live.size(); ++i) {
    const Front& f = fronts[s.live[i]];
    const double pos = s.x0[i] + f.speed * (t - s.t0);
    if (pos > x) break;
    v = f.uR;
  }
  return v;
}

PiecewiseConstFn FrontSolution::sample(double t) const {
  const TimeSlab& s = slab_at(t);
  std::vector<double> breaks;
  std::vector<Vec> vals;
  vals.push_back(s.left_state);
  const double tiny = 1e-14 * L;
  for (size_t i = 0; i < s.live.size(); ++i) {
    const Front& f = fronts[s.live[i]];
    const double pos = s.x0[i] + f.speed * (t - s.t0);
    if (pos <= tiny) {
      if (breaks.empty()) {
        vals[0] = f.uR;
      } else {
        vals.back() = f.uR;
      }
      continue;
    }
    if (pos >= L - tiny) break;
    if (!breaks.empty() && pos <= breaks.back()) {
      vals.back() = f.uR;
    } else {
      breaks.push_back(pos);
      vals.push_back(f.uR);
    }
  }
  return PiecewiseConstFn(0, L, std::move(breaks), std::move(vals));
}

PiecewiseConstFn FrontSolution::time_trace(double x) const {
  if (x < 0 || x > L) throw OutOfDomain("x = " + std::to_string(x));
  std::vector<double> breaks;
  std::vector<Vec> vals;
  for (const auto& s : slabs) {
    std::vector<double> cuts;
    for (size_t i = 0; i < s.live.size(); ++i) {
      const Front& f = fronts[s.live[i]];
      if (f.speed == 0) continue;
      const double tc = s.t0 + (x - s.x0[i]) / f.speed;
      if (tc > s.t0 + 1e-15 && tc < s.t1 - 1e-15) cuts.push_back(tc);
    }
    std::sort(cuts.begin(), cuts.end());
    double lo = s.t0;
    for (size_t j = 0; j <= cuts.size(); ++j) {
      const double hi = j < cuts.size() ? cuts[j] : s.t1;
      if (hi - lo <= 0) continue;
      const Vec v = eval(0.5 * (lo + hi), x);
      if (vals.empty()) {
        vals.push_back(v);
      } else {
        breaks.push_back(lo);
        vals.push_back(v);
      }
      lo = hi;
    }
  }
  return PiecewiseConstFn(0, T, std::move(breaks), std::move(vals));
}

PiecewiseConstFn FrontSolution::trace_left() const {
  std::vector<double> breaks;
  std::vector<Vec> vals;
  for (const auto& s : slabs) {
    if (vals.empty()) {
      vals.push_back(s.left_state);
    } else {
      breaks.push_back(s.t0);
      vals.push_back(s.left_state);
    }
  }
  return PiecewiseConstFn(0, T, std::move(breaks), std::move(vals));
}

PiecewiseConstFn FrontSolution::trace_right() const {
  std::vector<double> breaks;
  std::vector<Vec> vals;
  for (const auto& s : slabs) {
    const Vec v =
        s.live.empty() ? s.left_state : fronts[s.live.back()].uR;
    if (vals.empty()) {
      vals.push_back(v);
    } else {
      breaks.push_back(s.t0);
      vals.push_back(v);
    }
  }
  return PiecewiseConstFn(0, T, std::move(breaks), std::move(vals));
}

// ---- serialization ----------------------------------------------------------

void write_fronts_csv(std::ostream& os, const FrontSolution& sol) {
  os << "front_id,kind,family,t0,x0,t1,x1";
  const int n = sol.fronts.empty() ? 0 : int(sol.fronts.front().uL.size());
  for (int i = 0; i < n; ++i) os << ",uL" << i + 1;
  for (int i = 0; i < n; ++i) os << ",uR" << i + 1;
  os << "\n";
  std::vector<const Front*> order;
  for (const auto& f : sol.fronts) order.push_back(&f);
  std::stable_sort(order.begin(), order.end(),
                   [](const Front* a, const Front* b) {
                     if (a->birth_t != b->birth_t) return a->birth_t < b->birth_t;
                     return a->id < b->id;
                   });
  for (const Front* f : order) {
    os << f->id << "," << (f->physical ? "p" : "np") << ","
       << (f->physical ? f->family + 1 : 0) << "," << fmt(f->birth_t) << ","
       << fmt(f->birth_x) << "," << fmt(f->death_t) << "," << fmt(f->death_x);
    for (int i = 0; i < f->uL.size(); ++i) os << "," << fmt(f->uL[i]);
    for (int i = 0; i < f->uR.size(); ++i) os << "," << fmt(f->uR[i]);
    os << "\n";
  }
}

void write_diagram_svg(std::ostream& os, const FrontSolution& sol) {
  const double W = 640, Hpx = 480, pad = 40;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  auto X = [&](double x) { return pad + x / sol.L * (W - 2 * pad); };
  auto Y = [&](double t) { return Hpx - pad - t / sol.T * (Hpx - 2 * pad); };
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
     << Hpx << "' viewBox='0 0 " << W << " " << Hpx << "'>\n";
  os << "<rect x='" << pad << "' y='" << pad << "' width='" << W - 2 * pad
     << "' height='" << Hpx - 2 * pad
     << "' fill='white' stroke='black'/>\n";
  for (const auto& f : sol.fronts) {
    const char* color =
        f.physical ? palette[f.family % 8] : "#888888";
    os << "<line x1='" << X(f.birth_x) << "' y1='" << Y(f.birth_t) << "' x2='"
       << X(f.death_x) << "' y2='" << Y(f.death_t) << "' stroke='" << color
       << "' stroke-width='1.2'";
    if (!f.physical) os << " stroke-dasharray='4 3'";
    os << "/>\n";
  }
  os << "</svg>\n";
}

}  // namespace ldft
