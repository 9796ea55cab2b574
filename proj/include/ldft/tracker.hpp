#ifndef LDFT_TRACKER_HPP
#define LDFT_TRACKER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "ldft/bvfun.hpp"
#include "ldft/riemann.hpp"
#include "ldft/system.hpp"

namespace ldft {

struct TrackerOpts {
  double epsilon = 1e-3;
  double delta_cap = -1;   // smallness budget cap; < 0 means 0.25 * r_ball
  int gen_cap = 3;         // interactions below this depth solve accurately
  double rho_simp = 1.0;   // accurate solve when |sA||sB| >= rho * eps^2
  bool np_fast = true;     // nonphysical speed branch: fast (2 max|lambda|)
                           // or slow (c/2)
  int front_cap = 1000000;
  int event_cap = 200000;
  int extrema_samples = 128;
  CurveOpts curve;
};

// One straight-line front over its whole lifetime [birth_t, death_t].
struct Front {
  int id = 0;
  bool physical = true;
  int family = 0;
  bool is_block = false;
  Vec amplitude;  // 1 or p entries; the jump vector for nonphysical fronts
  double speed = 0;
  double birth_t = 0, birth_x = 0;
  double death_t = 0, death_x = 0;
  Vec uL, uR;
  int generation = 0;

  double x_at(double t) const { return birth_x + speed * (t - birth_t); }
  double strength() const { return amplitude.norm(); }
};

struct EventRecord {
  enum Kind {
    kDataJumpLeft,
    kDataJumpRight,
    kLeftWall,
    kRightWall,
    kCrossing
  };
  Kind kind;
  double t = 0, x = 0;
  std::vector<int> in;   // participating front ids
  std::vector<int> out;  // produced front ids
};

// Arrangement state between two consecutive event instants.
struct TimeSlab {
  double t0 = 0, t1 = 0;
  std::vector<int> live;        // front ids, left to right
  std::vector<double> x0;       // positions at t0
  Vec left_state;               // wall-adjacent state at x -> 0+
  double np_total = 0;          // nonphysical strength present in this slab
};

class FrontSolution {
public:
  double T = 0, L = 0;
  double epsilon = 0;
  double lambda_hat = 0;
  std::vector<Front> fronts;
  std::vector<EventRecord> events;
  std::vector<TimeSlab> slabs;
  double np_total_max = 0;

  Vec eval(double t, double x) const;
  PiecewiseConstFn sample(double t) const;       // u(t, .) on (0, L)
  PiecewiseConstFn time_trace(double x) const;   // u(., x) on (0, T)
  PiecewiseConstFn trace_left() const;           // u(., 0+)
  PiecewiseConstFn trace_right() const;          // u(., L-)
  PiecewiseConstFn trace_initial() const { return sample(0); }
  PiecewiseConstFn trace_final() const { return sample(T); }

private:
  const TimeSlab& slab_at(double t) const;
};

// Event-driven front tracking for the mixed initial-boundary value problem.
// ubar lives on (0, L); g1, g2 live on (0, T). The result satisfies every
// Def-2.1 style clause at the configured epsilon; see the verify module for
// the independent checker.
FrontSolution evolve(const SystemDef& sys, const PiecewiseConstFn& ubar,
                     const PiecewiseConstFn& g1, const PiecewiseConstFn& g2,
                     double T, const TrackerOpts& opts = {});

// Crossing instant of two straight fronts given birth anchors, or +inf.
double crossing_time(double bt1, double bx1, double s1, double bt2, double bx2,
                     double s2);

// One row per front: front_id,kind,family,t0,x0,t1,x1,uL...,uR...
// deterministically ordered by (t0, front_id).
void write_fronts_csv(std::ostream& os, const FrontSolution& sol);

// x-t diagram; families colour-coded, nonphysical fronts dashed.
void write_diagram_svg(std::ostream& os, const FrontSolution& sol);

}  // namespace ldft

#endif
