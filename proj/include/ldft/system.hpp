#ifndef LDFT_SYSTEM_HPP
#define LDFT_SYSTEM_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ldft/types.hpp"

namespace ldft {

// Constant-multiplicity block: families k, ..., k+p-1 (0-based) share one
// eigenvalue. p = 1 means strictly hyperbolic.
struct MultSpec {
  int k = 0;
  int p = 1;
};

struct BoundaryMap {
  int dim = 0;
  std::function<Vec(const Vec&)> eval;
  std::function<Mat(const Vec&)> jac;  // dim x n; filled by finalize() if empty
};

struct EntropyPair {
  std::function<double(const Vec&)> eta;
  std::function<double(const Vec&)> zeta;
  std::function<Vec(const Vec&)> deta;   // gradient
  std::function<Vec(const Vec&)> dzeta;  // gradient
};

// Spectral data of (DH)^-1 DG at one state: lambdas ascending (exact ties on
// the multiplicity block), unit right eigenvectors as columns, left
// eigenvectors as rows of the inverse so that l_i . r_j = delta_ij.
struct SpectralData {
  Vec lambdas;
  Mat right;
  Mat left;
};

class SystemDef {
public:
  std::string name;
  int n = 0;
  int m = 0;  // number of negative eigenvalues
  MultSpec mult;
  double r_ball = 1.0;

  std::function<Vec(const Vec&)> H, G;
  std::function<Mat(const Vec&)> DH, DG;  // finalize() fills with FD if empty
  BoundaryMap b1, b2;
  std::optional<EntropyPair> entropy;

  // Eigenframe at u = 0; orientation anchor for all spectrum() calls.
  Mat anchor;

  // Validates shape, installs finite-difference Jacobians where analytic ones
  // are missing, and computes the anchor frame. Must be called once before
  // use; gallery() and load_system() return finalized systems.
  void finalize();

  bool has_block() const { return mult.p > 1; }
  Vec zero_state() const { return Vec::Zero(n); }
};

SpectralData spectrum(const SystemDef& sys, const Vec& u);

struct HypothesisCheck {
  bool pass = true;
  double margin = 0;
  std::string note;
};

struct ValidationReport {
  std::array<HypothesisCheck, 6> hyp;  // (H1)..(H6)
  int samples = 0;
  double c_gap = 0;        // (H3) constant, 5% safety margin applied
  Vec lambda_min;          // per-family extrema over sampled ball
  Vec lambda_max;
  double max_abs_lambda = 0;

  bool all_pass() const;
  std::string summary() const;
};

// Deterministic low-discrepancy sweep of B_r(0); throws HypothesisViolated on
// the first failing hypothesis. probe_hypotheses() is the non-throwing probe.
ValidationReport probe_hypotheses(const SystemDef& sys, int samples);
ValidationReport validate(const SystemDef& sys, int samples = 512);

// Named test systems: linear2, linear3_mult2, triangular_ld, chaplygin,
// chaplygin_tracers2.
SystemDef gallery(const std::string& name);
std::vector<std::string> gallery_names();

SystemDef with_boundary_maps(SystemDef sys, BoundaryMap b1, BoundaryMap b2);

// Chaplygin gas p(rho) = -A/rho with `tracers` passive tracer fields, in
// conservative variables stored as deviations from the background
// (rho0, rho0*u0, 0, ...). The gallery uses (1, 0) and (1, 0.3).
SystemDef chaplygin_system(int tracers, double rho0, double u0, double A,
                           double r_ball = 0.2);

// Structured text config loader (grammar documented in the README).
SystemDef load_system(const std::string& config_text);
SystemDef load_system_file(const std::string& path);

// Deterministic Halton points in the closed ball |u| <= r, first point 0.
std::vector<Vec> ball_samples(int dim, double r, int count);

// Sampled per-family eigenvalue extrema over B_r(0) (no hypothesis checks).
struct SpectralExtrema {
  Vec lambda_min, lambda_max;
  double max_abs = 0;
  double c_est = 0;  // sampled spectral gap constant, 5% safety margin
};
SpectralExtrema lambda_extrema(const SystemDef& sys, int samples = 128);

// 4th-order central-difference Jacobian.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& u,
                double h);

}  // namespace ldft

#endif
