#ifndef LDFT_ORACLES_HPP
#define LDFT_ORACLES_HPP

#include "ldft/bvfun.hpp"
#include "ldft/system.hpp"

namespace ldft {

// Exact solution of the mixed problem for constant-coefficient linear systems
// (H = id, G = Au) by tracing characteristics through wall reflections.
// Boundary maps may be nonlinear; the wall relations are solved by Newton.
class CharacteristicOracle {
public:
  CharacteristicOracle(const SystemDef& sys, PiecewiseConstFn ubar,
                       PiecewiseConstFn g1, PiecewiseConstFn g2);

  Vec eval(double t, double x) const;
  // pointwise samples on a uniform midpoint grid, as a PiecewiseConstFn
  PiecewiseConstFn sample_grid(double t, int cells) const;

private:
  double wi(int family, double t, double x, int depth) const;
  Vec wall_state_left(double s, int depth) const;
  Vec wall_state_right(double s, int depth) const;

  const SystemDef& sys_;
  PiecewiseConstFn ubar_, g1_, g2_;
  double L_;
  Vec lambdas_;
  Mat right_, left_;
};

// First-order finite-volume reference solver (local Lax-Friedrichs flux) for
// systems with H = id; boundary conditions enforced through ghost states with
// outgoing characteristic invariants extrapolated.
PiecewiseConstFn godunov_reference(const SystemDef& sys,
                                   const PiecewiseConstFn& ubar,
                                   const PiecewiseConstFn& g1,
                                   const PiecewiseConstFn& g2, double T,
                                   int cells = 4096, double cfl = 0.45);

}  // namespace ldft

#endif
