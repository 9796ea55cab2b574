#ifndef LDFT_DIRECTIONAL_HPP
#define LDFT_DIRECTIONAL_HPP

#include <functional>
#include <memory>

#include "ldft/tracker.hpp"

namespace ldft {

enum class Orientation { forward, backward, rightward, leftward };

// Flux transforms realizing each orientation as a forward solve:
//   forward    (H, G)    backward  (H, -G) with reversed time axis
//   rightward  (G, H)    leftward  (-G, H) with the x axis reversed
// The effective system keeps the base ball and inherits the eigenvectors;
// its eigenvalues are sign/reciprocal images of the base ones.
struct OrientedProblem {
  Orientation orientation = Orientation::forward;
  SystemDef base;
  SystemDef effective;
  // base rectangle patch this problem lives on
  double t_lo = 0, t_hi = 0, x_lo = 0, x_hi = 0;
};

// Effective system for an orientation with caller-supplied boundary maps
// (bm_low acts at the low end of the effective space axis). The multiplicity
// block and m are re-derived from the transformed spectrum at u = 0.
SystemDef oriented_system(const SystemDef& sys, Orientation o, BoundaryMap bm_low,
                          BoundaryMap bm_high);

// Plain role swap of t and x with the spec'd default eigenform boundary maps
// l_i(u).u; validated reciprocal spectrum.
SystemDef transpose_system(const SystemDef& sys);

// Boundary map whose rows are u -> l_i(u).u for the effective system's
// families lo..hi (0-based, inclusive); nondegenerate by construction.
BoundaryMap eigenform_map(const SystemDef& effective_sys, int lo, int hi);

// A solution patch seen in base (t, x) coordinates, whatever orientation it
// was computed in. segments() visits every front as a base-coordinates line.
struct BaseSegment {
  double t0, x0, t1, x1;  // t0 <= t1
  Vec uL, uR;             // with respect to increasing base x
  bool physical = true;
  double strength = 0;    // nonphysical budget contribution
};

class SolutionView {
public:
  virtual ~SolutionView() = default;
  virtual double t_lo() const = 0;
  virtual double t_hi() const = 0;
  virtual double x_lo() const = 0;
  virtual double x_hi() const = 0;
  virtual double epsilon() const = 0;
  virtual Vec eval(double t, double x) const = 0;
  virtual PiecewiseConstFn sample_time(double t) const = 0;  // u(t, .)
  virtual PiecewiseConstFn trace_x(double x) const = 0;      // u(., x)
  virtual void segments(
      const std::function<void(const BaseSegment&)>& fn) const = 0;
};

class OrientedSolution : public SolutionView {
public:
  OrientedSolution(Orientation o, FrontSolution sol, double t_lo, double t_hi,
                   double x_lo, double x_hi);

  double t_lo() const override { return t_lo_; }
  double t_hi() const override { return t_hi_; }
  double x_lo() const override { return x_lo_; }
  double x_hi() const override { return x_hi_; }
  double epsilon() const override { return sol_.epsilon; }
  Vec eval(double t, double x) const override;
  PiecewiseConstFn sample_time(double t) const override;
  PiecewiseConstFn trace_x(double x) const override;
  void segments(
      const std::function<void(const BaseSegment&)>& fn) const override;

  Orientation orientation() const { return o_; }
  const FrontSolution& raw() const { return sol_; }

private:
  // base (t,x) -> effective (tau, y)
  void to_eff(double t, double x, double& tau, double& y) const;
  Orientation o_;
  FrontSolution sol_;
  double t_lo_, t_hi_, x_lo_, x_hi_;
};

// Two half-domain patches welded along a vertical interface.
class GluedSolution : public SolutionView {
public:
  GluedSolution(std::shared_ptr<SolutionView> left,
                std::shared_ptr<SolutionView> right, double interface_x,
                double weld_gap);

  double t_lo() const override { return left_->t_lo(); }
  double t_hi() const override { return left_->t_hi(); }
  double x_lo() const override { return left_->x_lo(); }
  double x_hi() const override { return right_->x_hi(); }
  double epsilon() const override {
    return left_->epsilon() + right_->epsilon();
  }
  Vec eval(double t, double x) const override;
  PiecewiseConstFn sample_time(double t) const override;
  PiecewiseConstFn trace_x(double x) const override;
  void segments(
      const std::function<void(const BaseSegment&)>& fn) const override;

  double interface_x() const { return interface_x_; }
  double weld_gap() const { return weld_gap_; }

private:
  std::shared_ptr<SolutionView> left_, right_;
  double interface_x_;
  double weld_gap_;
};

// Sideways / backward solve driven entirely in base-coordinate data:
//   initial_axis_data - data on the effective initial axis
//   bd_low / bd_high  - effective boundary data at the low / high space end
// span is the extent of the effective time axis. The result is remapped so
// callers only ever see base coordinates.
OrientedSolution solve_oriented(const SystemDef& base, Orientation o,
                                const PiecewiseConstFn& initial_axis_data,
                                const PiecewiseConstFn& bd_low,
                                const PiecewiseConstFn& bd_high,
                                BoundaryMap bm_low, BoundaryMap bm_high,
                                double span, const TrackerOpts& opts,
                                double base_t_anchor = 0,
                                double base_x_anchor = 0);

// Weld two half-domain solutions sharing an interface trace; throws
// InterfaceMismatch when the traces differ by more than glue_tol in L1.
GluedSolution glue(std::shared_ptr<SolutionView> left,
                   std::shared_ptr<SolutionView> right, double glue_tol);

struct TriangleReport {
  double max_l1 = 0;       // worst per-slice L1 distance over the triangle
  double at_time = 0;      // slice where the worst value occurred
  int slices = 0;
};

// Per-time-slice L1 distance of two solutions over the determinate triangle
// L(x1) (corner = left) or R(x0) (corner = right) of the base system.
TriangleReport determinate_triangle(const SolutionView& a,
                                    const SolutionView& b,
                                    const SystemDef& sys, bool left_corner,
                                    double x_corner, int slices = 24);

// Wrap a forward FrontSolution in the common view interface.
class ForwardView : public SolutionView {
public:
  explicit ForwardView(FrontSolution sol) : sol_(std::move(sol)) {}
  double t_lo() const override { return 0; }
  double t_hi() const override { return sol_.T; }
  double x_lo() const override { return 0; }
  double x_hi() const override { return sol_.L; }
  double epsilon() const override { return sol_.epsilon; }
  Vec eval(double t, double x) const override { return sol_.eval(t, x); }
  PiecewiseConstFn sample_time(double t) const override {
    return sol_.sample(t);
  }
  PiecewiseConstFn trace_x(double x) const override {
    if (x <= 0) return sol_.trace_left();
    if (x >= sol_.L) return sol_.trace_right();
    return sol_.time_trace(x);
  }
  void segments(
      const std::function<void(const BaseSegment&)>& fn) const override;
  const FrontSolution& raw() const { return sol_; }

private:
  FrontSolution sol_;
};

}  // namespace ldft

#endif
