#include "ldft/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include "ldft/config.hpp"

namespace ldft {

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& u,
                double h) {
  const int n = int(u.size());
  const int rows = int(f(u).size());
  Mat J(rows, n);
  for (int j = 0; j < n; ++j) {
    Vec up2 = u, up1 = u, um1 = u, um2 = u;
    up2[j] += 2 * h;
    up1[j] += h;
    um1[j] -= h;
    um2[j] -= 2 * h;
    J.col(j) = (-f(up2) + 8 * f(up1) - 8 * f(um1) + f(um2)) / (12 * h);
  }
  return J;
}

namespace {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

}  // namespace

std::vector<Vec> ball_samples(int dim, double r, int count) {
  std::vector<Vec> out;
  out.reserve(count);
  out.push_back(Vec::Zero(dim));
  int idx = 1;
  while (int(out.size()) < count) {
    Vec u(dim);
    for (int j = 0; j < dim; ++j) u[j] = 2 * halton(idx, kPrimes[j]) - 1;
    ++idx;
    if (u.norm() <= 1.0) out.push_back(r * u);
  }
  return out;
}

namespace {

// Orthonormal basis of the p-dimensional (near-)null space of M.
Mat null_space(const Mat& M, int p) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const int n = int(M.cols());
  return svd.matrixV().rightCols(p).eval();
  (void)n;
}

void canonical_sign(Eigen::Ref<Vec> v) {
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[imax]) + 1e-14) imax = i;
  if (v[imax] < 0) v = -v;
}

// Orthogonal factor Q maximizing overlap of V*Q with the anchor block.
Mat procrustes(const Mat& V, const Mat& anchor_block) {
  const Mat M = V.transpose() * anchor_block;
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

SpectralData spectrum_impl(const SystemDef& sys, const Vec& u,
                           bool use_anchor) {
  const int n = sys.n;
  const Mat dh = sys.DH(u);
  Eigen::PartialPivLU<Mat> lu(dh);
  const double det = std::abs(lu.determinant());
  if (det < 1e-12) throw SingularDH("det DH = " + std::to_string(det));
  const Mat A = lu.solve(sys.DG(u));

  Eigen::EigenSolver<Mat> es(A);
  if (es.info() != Eigen::Success)
    throw ComplexSpectrum("eigen solver failed");
  Vec re(n), im(n);
  for (int i = 0; i < n; ++i) {
    re[i] = es.eigenvalues()[i].real();
    im[i] = es.eigenvalues()[i].imag();
  }
  const double scale = 1.0 + re.cwiseAbs().maxCoeff();
  if (im.cwiseAbs().maxCoeff() > 1e-7 * scale)
    throw ComplexSpectrum("imaginary part " +
                          std::to_string(im.cwiseAbs().maxCoeff()));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return re[a] < re[b]; });

  SpectralData sd;
  sd.lambdas = Vec(n);
  for (int i = 0; i < n; ++i) sd.lambdas[i] = re[order[i]];

  const int k = sys.mult.k, p = sys.mult.p;
  if (p > 1) {
    const double mean = sd.lambdas.segment(k, p).mean();
    for (int i = k; i < k + p; ++i) sd.lambdas[i] = mean;
  }

  sd.right = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    if (p > 1 && i == k) {
      Mat V = null_space(A - sd.lambdas[k] * Mat::Identity(n, n), p);
      if (use_anchor) {
        V = V * procrustes(V, sys.anchor.middleCols(k, p));
      } else {
        for (int j = 0; j < p; ++j) canonical_sign(V.col(j));
      }
      sd.right.middleCols(k, p) = V;
      i += p - 1;
      continue;
    }
    Vec r = null_space(A - sd.lambdas[i] * Mat::Identity(n, n), 1).col(0);
    if (use_anchor) {
      if (r.dot(sys.anchor.col(i)) < 0) r = -r;
    } else {
      canonical_sign(r);
    }
    sd.right.col(i) = r;
  }

  sd.left = sd.right.inverse();
  return sd;
}

}  // namespace

SpectralData spectrum(const SystemDef& sys, const Vec& u) {
  return spectrum_impl(sys, u, true);
}

void SystemDef::finalize() {
  if (n < 1) throw ConfigError("system dimension must be >= 1");
  if (m < 0 || m > n) throw ConfigError("bad negative-eigenvalue count m");
  if (mult.p < 1 || mult.k < 0 || mult.k + mult.p > n)
    throw ConfigError("bad multiplicity block");
  if (!H || !G) throw ConfigError("missing flux maps");
  if (b1.dim != n - m) throw ConfigError("b1 must have n-m components");
  if (b2.dim != m) throw ConfigError("b2 must have m components");

  const double h = 1e-5 * r_ball;
  if (!DH) {
    auto f = H;
    DH = [f, h](const Vec& u) { return fd_jacobian(f, u, h); };
  }
  if (!DG) {
    auto f = G;
    DG = [f, h](const Vec& u) { return fd_jacobian(f, u, h); };
  }
  if (b1.eval && !b1.jac) {
    auto f = b1.eval;
    b1.jac = [f, h](const Vec& u) { return fd_jacobian(f, u, h); };
  }
  if (b2.eval && !b2.jac) {
    auto f = b2.eval;
    b2.jac = [f, h](const Vec& u) { return fd_jacobian(f, u, h); };
  }
  if (entropy) {
    if (!entropy->deta) {
      auto f = entropy->eta;
      entropy->deta = [f, h](const Vec& u) {
        auto g = [f](const Vec& v) { return Vec::Constant(1, f(v)).eval(); };
        return fd_jacobian(g, u, h).row(0).transpose().eval();
      };
    }
    if (!entropy->dzeta) {
      auto f = entropy->zeta;
      entropy->dzeta = [f, h](const Vec& u) {
        auto g = [f](const Vec& v) { return Vec::Constant(1, f(v)).eval(); };
        return fd_jacobian(g, u, h).row(0).transpose().eval();
      };
    }
  }

  anchor = spectrum_impl(*this, zero_state(), false).right;
}

bool ValidationReport::all_pass() const {
  return std::all_of(hyp.begin(), hyp.end(),
                     [](const HypothesisCheck& h) { return h.pass; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (size_t i = 0; i < hyp.size(); ++i) {
    os << "(H" << i + 1 << ") " << (hyp[i].pass ? "pass" : "FAIL")
       << "  margin=" << hyp[i].margin;
    if (!hyp[i].note.empty()) os << "  " << hyp[i].note;
    os << "\n";
  }
  os << "samples=" << samples << "  c=" << c_gap << "\n";
  return os.str();
}

SpectralExtrema lambda_extrema(const SystemDef& sys, int samples) {
  SpectralExtrema ex;
  const int n = sys.n;
  ex.lambda_min = Vec::Constant(n, 1e300);
  ex.lambda_max = Vec::Constant(n, -1e300);
  for (const Vec& u : ball_samples(n, sys.r_ball, samples)) {
    const Vec lam = spectrum(sys, u).lambdas;
    ex.lambda_min = ex.lambda_min.cwiseMin(lam);
    ex.lambda_max = ex.lambda_max.cwiseMax(lam);
  }
  ex.max_abs = std::max(ex.lambda_max.cwiseAbs().maxCoeff(),
                        ex.lambda_min.cwiseAbs().maxCoeff());
  if (sys.m >= 1 && sys.m < n)
    ex.c_est = 0.95 * std::min(-ex.lambda_max[sys.m - 1], ex.lambda_min[sys.m]);
  else
    ex.c_est = 0.95 * (sys.m == 0 ? ex.lambda_min[0] : -ex.lambda_max[n - 1]);
  return ex;
}

ValidationReport probe_hypotheses(const SystemDef& sys, int samples) {
  ValidationReport rep;
  rep.samples = samples;
  const int n = sys.n;
  rep.lambda_min = Vec::Constant(n, 1e300);
  rep.lambda_max = Vec::Constant(n, -1e300);

  double min_det_dh = 1e300;
  double min_gap = 1e300, max_spread = 0;
  double min_c = 1e300;
  bool sign_ok = true;
  double max_ld = 0;
  double max_entropy = 0;
  double min_det_b1 = 1e300, min_det_b2 = 1e300;
  std::string fail_note;

  const auto pts = ball_samples(n, sys.r_ball, samples);
  const double hd = 1e-4 * sys.r_ball;

  for (const Vec& u : pts) {
    min_det_dh = std::min(min_det_dh, std::abs(sys.DH(u).determinant()));
    SpectralData sd;
    try {
      sd = spectrum(sys, u);
    } catch (const Error& e) {
      rep.hyp[0] = {false, 0, e.what()};
      return rep;
    }
    for (int i = 0; i < n; ++i) {
      rep.lambda_min[i] = std::min(rep.lambda_min[i], sd.lambdas[i]);
      rep.lambda_max[i] = std::max(rep.lambda_max[i], sd.lambdas[i]);
    }

    // (H2) constant multiplicity pattern
    const int k = sys.mult.k, p = sys.mult.p;
    for (int i = 0; i + 1 < n; ++i) {
      const bool inside_block = p > 1 && i >= k && i + 1 < k + p;
      const double gap = sd.lambdas[i + 1] - sd.lambdas[i];
      if (inside_block)
        max_spread = std::max(max_spread, gap);
      else
        min_gap = std::min(min_gap, gap);
    }

    // (H3) spectral gap around zero
    if (sys.m >= 1 && sys.m < n) {
      if (!(sd.lambdas[sys.m - 1] < 0 && sd.lambdas[sys.m] > 0)) sign_ok = false;
      min_c = std::min(min_c,
                       std::min(-sd.lambdas[sys.m - 1], sd.lambdas[sys.m]));
    } else {
      // one-signed spectrum: gap is distance of the whole spectrum from 0
      const double away = sys.m == 0 ? sd.lambdas[0] : -sd.lambdas[n - 1];
      if (away <= 0) sign_ok = false;
      min_c = std::min(min_c, away);
    }

    // (H4) linear degeneracy, directional difference of lambda along r_i
    for (int i = 0; i < n; ++i) {
      const Vec r = sd.right.col(i);
      const auto lp = spectrum(sys, (u + hd * r).eval()).lambdas[i];
      const auto lm = spectrum(sys, (u - hd * r).eval()).lambdas[i];
      max_ld = std::max(max_ld, std::abs(lp - lm) / (2 * hd));
    }

    // (H5) entropy compatibility
    if (sys.entropy) {
      const Mat A = sys.DH(u).partialPivLu().solve(sys.DG(u));
      const Vec lhs = A.transpose() * sys.entropy->deta(u);
      max_entropy = std::max(
          max_entropy, (lhs - sys.entropy->dzeta(u)).cwiseAbs().maxCoeff());
    }

    // (H6) boundary nondegeneracy
    if (sys.m < n) {
      Mat M1(n - sys.m, n - sys.m);
      const Mat db1 = sys.b1.jac(u);
      for (int j = 0; j < n - sys.m; ++j)
        M1.col(j) = db1 * sd.right.col(sys.m + j);
      min_det_b1 = std::min(min_det_b1, std::abs(M1.determinant()));
    }
    if (sys.m > 0) {
      Mat M2(sys.m, sys.m);
      const Mat db2 = sys.b2.jac(u);
      for (int j = 0; j < sys.m; ++j) M2.col(j) = db2 * sd.right.col(j);
      min_det_b2 = std::min(min_det_b2, std::abs(M2.determinant()));
    }
  }

  rep.hyp[0] = {min_det_dh > 1e-10, min_det_dh, "min |det DH|"};
  const double spread_tol = 1e-7;
  rep.hyp[1] = {max_spread <= spread_tol && min_gap > 1e-9,
                min_gap - max_spread,
                "cluster gap " + std::to_string(min_gap) + ", spread " +
                    std::to_string(max_spread)};
  rep.hyp[2] = {sign_ok && min_c > 0, min_c, "min distance of spectrum to 0"};
  rep.c_gap = sign_ok && min_c > 0 ? 0.95 * min_c : 0;
  const double tol_ld = 1e-6;
  rep.hyp[3] = {max_ld <= tol_ld, max_ld, "max |D lambda . r|"};
  if (sys.entropy)
    rep.hyp[4] = {max_entropy <= 1e-7, max_entropy, "max entropy residual"};
  else
    rep.hyp[4] = {true, 0, "no entropy pair declared"};
  rep.hyp[5] = {min_det_b1 > 1e-10 && min_det_b2 > 1e-10,
                std::min(min_det_b1, min_det_b2), "min boundary determinant"};
  rep.max_abs_lambda = std::max(rep.lambda_max.cwiseAbs().maxCoeff(),
                                rep.lambda_min.cwiseAbs().maxCoeff());
  return rep;
}

ValidationReport validate(const SystemDef& sys, int samples) {
  ValidationReport rep = probe_hypotheses(sys, samples);
  for (size_t i = 0; i < rep.hyp.size(); ++i) {
    if (!rep.hyp[i].pass)
      throw HypothesisViolated("(H" + std::to_string(i + 1) + ") " +
                               rep.hyp[i].note + ", margin " +
                               std::to_string(rep.hyp[i].margin) + " on " +
                               sys.name);
  }
  return rep;
}

namespace {

BoundaryMap linear_map(const Mat& M) {
  BoundaryMap b;
  b.dim = int(M.rows());
  b.eval = [M](const Vec& u) { return (M * u).eval(); };
  b.jac = [M](const Vec&) { return M; };
  return b;
}

void attach_quadratic_entropy(SystemDef& sys, const Mat& A) {
  // eta = u'Qu/2 with Q = L'L; then QA is symmetric and zeta = u'QAu/2.
  const Mat L = spectrum(sys, sys.zero_state()).left;
  const Mat Q = (L.transpose() * L).eval();
  const Mat QA = (Q * A).eval();
  EntropyPair ep;
  ep.eta = [Q](const Vec& u) { return 0.5 * u.dot(Q * u); };
  ep.zeta = [QA](const Vec& u) { return 0.5 * u.dot(QA * u); };
  ep.deta = [Q](const Vec& u) { return (Q * u).eval(); };
  ep.dzeta = [QA](const Vec& u) {
    return (0.5 * (QA + QA.transpose()) * u).eval();
  };
  sys.entropy = ep;
}

SystemDef make_linear(const std::string& name, const Mat& A, int m,
                      MultSpec mult, const Mat& B1, const Mat& B2,
                      double r_ball) {
  SystemDef sys;
  sys.name = name;
  sys.n = int(A.rows());
  sys.m = m;
  sys.mult = mult;
  sys.r_ball = r_ball;
  sys.H = [](const Vec& u) { return u; };
  sys.G = [A](const Vec& u) { return (A * u).eval(); };
  const int n = sys.n;
  sys.DH = [n](const Vec&) { return Mat::Identity(n, n).eval(); };
  sys.DG = [A](const Vec&) { return A; };
  sys.b1 = linear_map(B1);
  sys.b2 = linear_map(B2);
  sys.finalize();
  attach_quadratic_entropy(sys, A);
  return sys;
}

SystemDef make_triangular_ld() {
  SystemDef sys;
  sys.name = "triangular_ld";
  sys.n = 2;
  sys.m = 1;
  sys.r_ball = 1.0;
  sys.H = [](const Vec& u) { return u; };
  sys.G = [](const Vec& u) {
    Vec g(2);
    g << -u[0] + std::sin(u[1]), 2 * u[1];
    return g;
  };
  sys.DH = [](const Vec&) { return Mat::Identity(2, 2).eval(); };
  sys.DG = [](const Vec& u) {
    Mat J(2, 2);
    J << -1, std::cos(u[1]), 0, 2;
    return J;
  };
  Mat B1(1, 2), B2(1, 2);
  B1 << 0, 1;  // w component
  B2 << 1, 0;  // v component
  sys.b1 = linear_map(B1);
  sys.b2 = linear_map(B2);
  sys.finalize();
  return sys;
}

}  // namespace

// Chaplygin gas p(rho) = -A/rho in conservative variables (rho, q = rho u),
// stored as the deviation from a constant background state.
SystemDef chaplygin_system(int tracers, double rho0, double u0, double A,
                           double r_ball) {
  SystemDef sys;
  sys.name = tracers > 0 ? "chaplygin_tracers" + std::to_string(tracers)
                         : "chaplygin";
  const int n = 2 + tracers;
  sys.n = n;
  sys.m = 1;
  sys.mult = tracers > 0 ? MultSpec{1, tracers} : MultSpec{0, 1};
  sys.r_ball = r_ball;

  Vec bg = Vec::Zero(n);
  bg[0] = rho0;
  bg[1] = rho0 * u0;

  auto phys = [bg](const Vec& ut) { return (ut + bg).eval(); };

  sys.H = [](const Vec& ut) { return ut; };
  sys.G = [phys, A, bg, n](const Vec& ut) {
    const Vec w = phys(ut);
    const double rho = w[0], q = w[1];
    Vec g(n);
    g[0] = q;
    g[1] = q * q / rho - A / rho;
    for (int i = 2; i < n; ++i) g[i] = q * w[i] / rho;
    // subtract the background flux so that G(0) = 0
    const double rho_b = bg[0], q_b = bg[1];
    g[0] -= q_b;
    g[1] -= q_b * q_b / rho_b - A / rho_b;
    return g;
  };
  sys.DH = [n](const Vec&) { return Mat::Identity(n, n).eval(); };
  sys.DG = [phys, A, n](const Vec& ut) {
    const Vec w = phys(ut);
    const double rho = w[0], q = w[1];
    Mat J = Mat::Zero(n, n);
    J(0, 1) = 1;
    J(1, 0) = -q * q / (rho * rho) + A / (rho * rho);
    J(1, 1) = 2 * q / rho;
    for (int i = 2; i < n; ++i) {
      J(i, 0) = -q * w[i] / (rho * rho);
      J(i, 1) = w[i] / rho;
      J(i, i) = q / rho;
    }
    return J;
  };

  // b1: tracer concentrations and velocity deviation (incoming from the left:
  // families u, ..., u, u+c); b2: pressure deviation (family u-c).
  BoundaryMap b1;
  b1.dim = n - 1;
  b1.eval = [phys, u0, n](const Vec& ut) {
    const Vec w = phys(ut);
    Vec out(n - 1);
    for (int i = 2; i < n; ++i) out[i - 2] = w[i] / w[0];
    out[n - 2] = w[1] / w[0] - u0;
    return out;
  };
  b1.jac = [phys, n](const Vec& ut) {
    const Vec w = phys(ut);
    const double rho = w[0], q = w[1];
    Mat J = Mat::Zero(n - 1, n);
    for (int i = 2; i < n; ++i) {
      J(i - 2, 0) = -w[i] / (rho * rho);
      J(i - 2, i) = 1 / rho;
    }
    J(n - 2, 0) = -q / (rho * rho);
    J(n - 2, 1) = 1 / rho;
    return J;
  };
  BoundaryMap b2;
  b2.dim = 1;
  b2.eval = [phys, A, rho0](const Vec& ut) {
    const double rho = phys(ut)[0];
    return Vec::Constant(1, A / rho0 - A / rho).eval();
  };
  b2.jac = [phys, A, n](const Vec& ut) {
    const double rho = phys(ut)[0];
    Mat J = Mat::Zero(1, n);
    J(0, 0) = -A / (rho * rho);
    return J;
  };
  sys.b1 = b1;
  sys.b2 = b2;

  // mechanical energy pair
  EntropyPair ep;
  ep.eta = [phys, A, n](const Vec& ut) {
    const Vec w = phys(ut);
    double s = w[1] * w[1];
    for (int i = 2; i < n; ++i) s += w[i] * w[i];
    return (s + A) / (2 * w[0]);
  };
  ep.zeta = [phys, A, n](const Vec& ut) {
    const Vec w = phys(ut);
    double s = w[1] * w[1];
    for (int i = 2; i < n; ++i) s += w[i] * w[i];
    return w[1] * (s - A) / (2 * w[0] * w[0]);
  };
  ep.deta = [phys, A, n](const Vec& ut) {
    const Vec w = phys(ut);
    const double rho = w[0];
    double s = w[1] * w[1];
    for (int i = 2; i < n; ++i) s += w[i] * w[i];
    Vec d(n);
    d[0] = -(s + A) / (2 * rho * rho);
    d[1] = w[1] / rho;
    for (int i = 2; i < n; ++i) d[i] = w[i] / rho;
    return d;
  };
  ep.dzeta = [phys, A, n](const Vec& ut) {
    const Vec w = phys(ut);
    const double rho = w[0], q = w[1];
    double s = q * q;
    for (int i = 2; i < n; ++i) s += w[i] * w[i];
    Vec d(n);
    d[0] = -q * (s - A) / (rho * rho * rho);
    d[1] = (s + 2 * q * q - A) / (2 * rho * rho);
    for (int i = 2; i < n; ++i) d[i] = q * w[i] / (rho * rho);
    return d;
  };
  sys.entropy = ep;

  sys.finalize();
  return sys;
}

std::vector<std::string> gallery_names() {
  return {"linear2", "linear3_mult2", "triangular_ld", "chaplygin",
          "chaplygin_tracers2"};
}

SystemDef gallery(const std::string& name) {
  if (name == "linear2") {
    Mat A(2, 2);
    A << 0.5, 1.5, 1.5, 0.5;  // eigenvalues -1, 2
    Mat B1(1, 2), B2(1, 2);
    B1 << 1, 0;
    B2 << 0, 1;
    return make_linear("linear2", A, 1, MultSpec{0, 1}, B1, B2, 1.0);
  }
  if (name == "linear3_mult2") {
    Mat A(3, 3);
    A << 0, 1, 1, 1, 0, 1, 1, 1, 0;  // eigenvalues -1, -1, 2
    Mat B1(1, 3), B2(2, 3);
    B1 << 1, 0, 1;
    B2 << 1, 0, 0, 0, 1, 0;
    return make_linear("linear3_mult2", A, 2, MultSpec{0, 2}, B1, B2, 1.0);
  }
  if (name == "triangular_ld") return make_triangular_ld();
  if (name == "chaplygin") return chaplygin_system(0, 1.0, 0.0, 1.0);
  if (name == "chaplygin_tracers2") {
    SystemDef sys = chaplygin_system(2, 1.0, 0.3, 1.0);
    sys.name = "chaplygin_tracers2";
    return sys;
  }
  throw UnknownSystem(name);
}

SystemDef with_boundary_maps(SystemDef sys, BoundaryMap b1, BoundaryMap b2) {
  sys.b1 = std::move(b1);
  sys.b2 = std::move(b2);
  sys.finalize();
  return sys;
}

namespace {

struct NonlinearTerm {
  int row = 0;     // 0-based
  double coef = 1;
  std::string func;
  int argcol = 0;  // 0-based
  std::vector<double> params;

  double eval(double x) const {
    if (func == "sin") return std::sin(x);
    if (func == "cos") return std::cos(x);
    if (func == "exp") return std::exp(x);
    if (func == "poly") {
      double s = 0, xn = 1;
      for (double c : params) {
        s += c * xn;
        xn *= x;
      }
      return s;
    }
    throw ConfigError("unknown nonlinearity '" + func + "'");
  }
  double deriv(double x) const {
    if (func == "sin") return std::cos(x);
    if (func == "cos") return -std::sin(x);
    if (func == "exp") return std::exp(x);
    if (func == "poly") {
      double s = 0, xn = 1;
      for (size_t i = 1; i < params.size(); ++i) {
        s += double(i) * params[i] * xn;
        xn *= x;
      }
      return s;
    }
    throw ConfigError("unknown nonlinearity '" + func + "'");
  }
};

Mat parse_matrix(const std::string& text, int rows, int cols,
                 const std::string& what) {
  std::vector<std::vector<double>> data;
  std::istringstream rs(text);
  std::string row;
  while (std::getline(rs, row, '/')) {
    std::istringstream es(row);
    std::vector<double> r;
    double x;
    while (es >> x) r.push_back(x);
    if (!r.empty()) data.push_back(r);
  }
  if (int(data.size()) != rows)
    throw ConfigError(what + ": expected " + std::to_string(rows) + " rows");
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (int(data[i].size()) != cols)
      throw ConfigError(what + ": row " + std::to_string(i + 1) + " needs " +
                        std::to_string(cols) + " entries");
    for (int j = 0; j < cols; ++j) M(i, j) = data[i][j];
  }
  return M;
}

struct FluxSpec {
  bool identity = false;
  Mat A;
  std::vector<NonlinearTerm> terms;

  Vec eval(const Vec& u) const {
    Vec g = identity ? u : Vec(A * u);
    for (const auto& t : terms) g[t.row] += t.coef * t.eval(u[t.argcol]);
    return g;
  }
  Mat jac(const Vec& u) const {
    const int n = int(u.size());
    Mat J = identity ? Mat::Identity(n, n) : A;
    for (const auto& t : terms)
      J(t.row, t.argcol) += t.coef * t.deriv(u[t.argcol]);
    return J;
  }
};

FluxSpec parse_flux(KvFile& kv, const std::string& key, int n,
                    bool default_identity) {
  FluxSpec fs;
  if (kv.has(key) && kv.get(key, "") == "identity") {
    fs.identity = true;
  } else if (kv.has(key + ".matrix")) {
    fs.A = parse_matrix(kv.require(key + ".matrix"), n, n, key + ".matrix");
  } else if (default_identity) {
    fs.identity = true;
  } else {
    throw ConfigError("missing " + key + ".matrix");
  }
  for (const auto& tk : kv.keys_with_prefix(key + ".term")) {
    std::istringstream ts(kv.require(tk));
    NonlinearTerm t;
    std::string params;
    if (!(ts >> t.row >> t.coef >> t.func >> t.argcol))
      throw ConfigError(tk + ": expected 'row coef func argcol [params]'");
    if (ts >> params) t.params = parse_num_list(params);
    if (t.row < 1 || t.row > n || t.argcol < 1 || t.argcol > n)
      throw ConfigError(tk + ": row/argcol out of range");
    --t.row;
    --t.argcol;
    if (t.func == "poly" && t.params.empty())
      throw ConfigError(tk + ": poly needs coefficients");
    fs.terms.push_back(t);
  }
  return fs;
}

}  // namespace

SystemDef load_system(const std::string& config_text) {
  KvFile kv = KvFile::parse(config_text);
  SystemDef sys;
  sys.name = kv.get("name", "config_system");
  sys.n = kv.get_int("n", 0);
  if (sys.n < 1) throw ConfigError("n must be >= 1");
  sys.m = kv.get_int("m", -1);
  if (sys.m < 0) throw ConfigError("m is required");
  sys.r_ball = kv.get_num("r_ball", 1.0);
  if (kv.has("mult")) {
    const auto pair = parse_num_list(kv.require("mult"), ' ');
    if (pair.size() != 2) throw ConfigError("mult must be 'k p'");
    sys.mult = MultSpec{int(pair[0]), int(pair[1])};
  }

  const FluxSpec hs = parse_flux(kv, "H", sys.n, true);
  const FluxSpec gs = parse_flux(kv, "G", sys.n, false);
  sys.H = [hs](const Vec& u) { return hs.eval(u); };
  sys.G = [gs](const Vec& u) { return gs.eval(u); };
  sys.DH = [hs](const Vec& u) { return hs.jac(u); };
  sys.DG = [gs](const Vec& u) { return gs.jac(u); };

  sys.b1 = linear_map(
      parse_matrix(kv.require("b1.matrix"), sys.n - sys.m, sys.n, "b1.matrix"));
  sys.b2 = linear_map(
      parse_matrix(kv.require("b2.matrix"), sys.m, sys.n, "b2.matrix"));

  const std::string ent = kv.get("entropy", "none");
  kv.finish();
  sys.finalize();

  if (ent == "auto") {
    if (!hs.identity || !gs.terms.empty())
      throw ConfigError("entropy = auto needs H = identity and a linear G");
    attach_quadratic_entropy(sys, gs.A);
  } else if (ent != "none") {
    throw ConfigError("entropy must be 'auto' or 'none'");
  }
  return sys;
}

SystemDef load_system_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open system config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_system(ss.str());
}

}  // namespace ldft
