#ifndef LDFT_VERIFY_HPP
#define LDFT_VERIFY_HPP

#include <vector>

#include "ldft/directional.hpp"
#include "ldft/oracles.hpp"
#include "ldft/tracker.hpp"

namespace ldft {

// C1 cubic bump B((t-t0)/ht) * B((x-x0)/hx) with unit sup norm.
struct Bump {
  double t0, ht, x0, hx;
};

// 5x5 interior grid of tensor bumps at two scale levels.
std::vector<Bump> standard_bumps(double T, double L);

// max over bumps and components of | sum of front line integrals | for the
// weak form; exact piecewise Gauss-Legendre along every segment.
double weak_residual(const SolutionView& sol, const SystemDef& sys,
                     const std::vector<Bump>& bumps);

// same line integrals for the (eta, zeta) pair; linear degeneracy makes this
// an equality check, so the absolute value is reported.
double entropy_residual(const SolutionView& sol, const SystemDef& sys,
                        const std::vector<Bump>& bumps);

struct Def11Clauses {
  double init_l1 = 0;
  double left_l1 = 0;
  double right_l1 = 0;
  bool pass(double eps, double margin = 0.01) const {
    const double cap = eps * (1 + margin) + 1e-12;
    return init_l1 <= cap && left_l1 <= cap && right_l1 <= cap;
  }
};

Def11Clauses def11_clauses(const SolutionView& sol, const SystemDef& sys,
                           const PiecewiseConstFn& ubar,
                           const PiecewiseConstFn& g1,
                           const PiecewiseConstFn& g2);

// Per-front checks of the approximate-solution clauses on a native forward
// arrangement: Rankine-Hugoniot and speed residuals for physical fronts,
// speed constancy and total strength for nonphysical ones.
struct FrontChecks {
  double max_rh = 0;
  double max_speed_dev = 0;
  double np_speed_dev = 0;
  double np_total_max = 0;
  int physical = 0;
  int nonphysical = 0;
  bool pass(double eps, double tol_rh = 1e-9) const {
    return max_rh <= tol_rh && max_speed_dev <= 1e-9 &&
           np_speed_dev <= 1e-12 && np_total_max <= eps * (1 + 1e-9);
  }
};

FrontChecks front_checks(const FrontSolution& sol, const SystemDef& sys);

// Re-check an arbitrary solution view against a (possibly different) system:
// every physical segment must satisfy Rankine-Hugoniot with its base slope.
struct SegmentChecks {
  double max_rh = 0;
  int physical = 0;
  int nonphysical = 0;
};

SegmentChecks segment_checks(const SolutionView& sol, const SystemDef& sys);

// TV / L1-Lipschitz time profiles over a uniform slice grid.
struct WellPosednessProfile {
  std::vector<double> times;
  std::vector<double> tv;
  std::vector<double> lipschitz;  // l1(u(t_k), u(t_{k-1})) / dt
  double tv_max = 0;
  double lipschitz_max = 0;
};

WellPosednessProfile wellposedness_profile(const SolutionView& sol,
                                           int slices = 16);

enum class OracleKind { exact_characteristics, fine_godunov };

struct OracleProfile {
  std::vector<double> times;
  std::vector<double> l1_error;
  double max_error = 0;
};

OracleProfile oracle_compare(const SolutionView& sol, const SystemDef& sys,
                             const PiecewiseConstFn& ubar,
                             const PiecewiseConstFn& g1,
                             const PiecewiseConstFn& g2, OracleKind kind,
                             const std::vector<double>& times,
                             int godunov_cells = 4096, double cfl = 0.45);

// Aggregated report in one pass (structured-text serializable).
struct ResidualReport {
  double weak = 0;
  double weak_bound = 0;  // (np total + rh tolerance) * T * bump count scale
  double entropy = -1;    // -1 when the system carries no entropy pair
  Def11Clauses clauses;
  WellPosednessProfile profile;
  std::string to_text() const;
};

ResidualReport verify_solution(const SolutionView& sol, const SystemDef& sys,
                               const PiecewiseConstFn& ubar,
                               const PiecewiseConstFn& g1,
                               const PiecewiseConstFn& g2);

}  // namespace ldft

#endif
