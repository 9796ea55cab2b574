#ifndef LDFT_RIEMANN_HPP
#define LDFT_RIEMANN_HPP

#include <vector>

#include "ldft/system.hpp"
#include "ldft/types.hpp"

namespace ldft {

struct FanFront {
  bool physical = true;
  int family = 0;        // 0-based; for a block front, the first block family
  bool is_block = false;
  Vec amplitude;         // 1 entry, p entries (block), or the jump vector (np)
  double speed = 0;
  Vec uL, uR;

  double strength() const { return amplitude.norm(); }
};

struct WaveFan {
  std::vector<FanFront> fronts;  // ascending speed
  Vec u_boundary;                // boundary solves: the new wall state
  int newton_iters = 0;
};

struct CurveOpts {
  double tol = 1e-11;          // local ODE error
  double sigma0_factor = 0.25; // solvability radius as a fraction of r_ball
  double newton_tol = 1e-12;
  int newton_max = 40;
  double merge_tol = 1e-13;    // amplitudes below this are dropped
};

// State reached from u0 along the contact curve of a simple family.
Vec contact_curve(const SystemDef& sys, int family, const Vec& u0,
                  double sigma, const CurveOpts& opts = {});

// Multiplicity-p contact manifold through u0; sigma_block has p entries for
// families k..k+p-1 and is applied in descending family order.
Vec contact_manifold(const SystemDef& sys, const Vec& u0,
                     const Vec& sigma_block, const CurveOpts& opts = {});

// Ascending composition of all wave curves: sigma has n entries (the block
// occupies p consecutive slots). inverse = true applies the exact inverse map.
Vec compose(const SystemDef& sys, const Vec& u0, const Vec& sigma,
            const CurveOpts& opts = {}, bool inverse = false);

// Amplitudes sigma with compose(uL, sigma) = uR; zero-amplitude waves omitted.
WaveFan solve_riemann(const SystemDef& sys, const Vec& uL, const Vec& uR,
                      const CurveOpts& opts = {});

// Outgoing fan at x = 0: fronts of families m..n-1 from a wall state u_b with
// b1(u_b) = g, reaching u_inner. Fan states run u_b -> u_inner.
WaveFan solve_boundary_left(const SystemDef& sys, const Vec& g,
                            const Vec& u_inner, const CurveOpts& opts = {});

// Outgoing fan at x = L: families 0..m-1 from u_inner to the wall state u_b
// with b2(u_b) = g. Fan states run u_inner -> u_b.
WaveFan solve_boundary_right(const SystemDef& sys, const Vec& g,
                             const Vec& u_inner, const CurveOpts& opts = {});

// |G(uR)-G(uL) - s (H(uR)-H(uL))|
double rh_residual(const SystemDef& sys, const Vec& uL, const Vec& uR,
                   double s);

}  // namespace ldft

#endif
