#include <doctest.h>

#include <cmath>

#include "ldft/system.hpp"

using namespace ldft;

namespace {

SystemDef symmetric_linear2() {
  // H = id, G = Au with A = [[0,1],[1,0]]: eigenvalues -1, 1
  SystemDef sys;
  sys.name = "swap2";
  sys.n = 2;
  sys.m = 1;
  sys.r_ball = 1.0;
  Mat A(2, 2);
  A << 0, 1, 1, 0;
  sys.H = [](const Vec& u) { return u; };
  sys.G = [A](const Vec& u) { return (A * u).eval(); };
  sys.DH = [](const Vec&) { return Mat::Identity(2, 2).eval(); };
  sys.DG = [A](const Vec&) { return A; };
  Mat B1(1, 2), B2(1, 2);
  B1 << 1, 0;
  B2 << 0, 1;
  sys.b1 = BoundaryMap{1, [B1](const Vec& u) { return (B1 * u).eval(); },
                       [B1](const Vec&) { return B1; }};
  sys.b2 = BoundaryMap{1, [B2](const Vec& u) { return (B2 * u).eval(); },
                       [B2](const Vec&) { return B2; }};
  sys.finalize();
  return sys;
}

SystemDef burgers_like() {
  // 1x1 genuinely nonlinear flux, shifted so the eigenvalue stays positive
  SystemDef sys;
  sys.name = "burgers";
  sys.n = 1;
  sys.m = 0;
  sys.r_ball = 1.0;
  sys.H = [](const Vec& u) { return u; };
  sys.G = [](const Vec& u) {
    return Vec::Constant(1, 0.5 * (u[0] + 2) * (u[0] + 2)).eval();
  };
  sys.b1 = BoundaryMap{1, [](const Vec& u) { return u; },
                       [](const Vec&) { return Mat::Identity(1, 1).eval(); }};
  sys.b2 = BoundaryMap{0, [](const Vec&) { return Vec(0); }, nullptr};
  sys.finalize();
  return sys;
}

}  // namespace

TEST_CASE("spectrum of the symmetric swap matrix") {
  const auto sys = symmetric_linear2();
  const auto sd = spectrum(sys, sys.zero_state());
  CHECK(sd.lambdas[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sd.lambdas[1] == doctest::Approx(1.0).epsilon(1e-12));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(sd.right(0, 0) == doctest::Approx(s));
  CHECK(sd.right(1, 0) == doctest::Approx(-s));
  CHECK(sd.right(0, 1) == doctest::Approx(s));
  CHECK(sd.right(1, 1) == doctest::Approx(s));
  CHECK((sd.left * sd.right - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("chaplygin background spectrum is +-1") {
  const auto sys = gallery("chaplygin");
  const auto sd = spectrum(sys, sys.zero_state());
  CHECK(sd.lambdas[0] == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(sd.lambdas[1] == doctest::Approx(1.0).epsilon(1e-10));

  // cross-check against a plain eigendecomposition of DG at a few states
  for (const Vec& u : ball_samples(2, 0.15, 8)) {
    const auto mine = spectrum(sys, u).lambdas;
    Eigen::EigenSolver<Mat> es(sys.DG(u));
    Vec ref(2);
    ref << es.eigenvalues()[0].real(), es.eigenvalues()[1].real();
    if (ref[0] > ref[1]) std::swap(ref[0], ref[1]);
    CHECK((mine - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("chaplygin with two tracers has the multiplicity-2 middle block") {
  const auto sys = gallery("chaplygin_tracers2");
  const auto sd = spectrum(sys, sys.zero_state());
  CHECK(sd.lambdas[0] == doctest::Approx(-0.7).epsilon(1e-10));
  CHECK(sd.lambdas[1] == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(sd.lambdas[2] == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(sd.lambdas[3] == doctest::Approx(1.3).epsilon(1e-10));
  // the block eigenspace is span{e3, e4}
  for (int j = 1; j <= 2; ++j) {
    CHECK(std::abs(sd.right(0, j)) < 1e-10);
    CHECK(std::abs(sd.right(1, j)) < 1e-10);
  }
}

TEST_CASE("gallery systems all validate") {
  for (const auto& name : gallery_names()) {
    const auto sys = gallery(name);
    const auto rep = probe_hypotheses(sys, 200);
    INFO(name, "\n", rep.summary());
    CHECK(rep.all_pass());
  }
}

TEST_CASE("linear2 gap constant is about 1") {
  const auto rep = validate(gallery("linear2"), 200);
  CHECK(rep.c_gap == doctest::Approx(0.95).epsilon(1e-6));
}

TEST_CASE("genuinely nonlinear flux fails (H4)") {
  const auto sys = burgers_like();
  const auto rep = probe_hypotheses(sys, 64);
  CHECK(rep.hyp[3].pass == false);
  CHECK(rep.hyp[3].margin == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(validate(sys, 64), HypothesisViolated);
}

TEST_CASE("chaplygin at a sonic background fails (H3)") {
  // background velocity u0 = 1 equals the sound speed at rho = 1
  const auto sys = chaplygin_system(0, 1.0, 1.0, 1.0, 0.2);
  const auto rep = probe_hypotheses(sys, 64);
  CHECK(rep.hyp[2].pass == false);
}

TEST_CASE("triangular_ld eigenvectors rotate with w") {
  const auto sys = gallery("triangular_ld");
  const auto sd0 = spectrum(sys, sys.zero_state());
  CHECK(sd0.lambdas[0] == doctest::Approx(-1.0));
  CHECK(sd0.lambdas[1] == doctest::Approx(2.0));

  Vec u(2);
  u << 0.0, 0.6;
  const auto sd = spectrum(sys, u);
  // r2 is parallel to (cos w, 3)
  Vec dir(2);
  dir << std::cos(0.6), 3.0;
  dir.normalize();
  const Vec r2 = sd.right.col(1);
  CHECK(std::abs(std::abs(r2.dot(dir)) - 1.0) < 1e-10);
  CHECK(sd.lambdas[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("eigen frame quality over sampled ball") {
  for (const auto& name : gallery_names()) {
    const auto sys = gallery(name);
    CAPTURE(name);
    double worst_bi = 0, worst_res = 0;
    for (const Vec& u : ball_samples(sys.n, 0.9 * sys.r_ball, 1000)) {
      const auto sd = spectrum(sys, u);
      worst_bi = std::max(worst_bi,
                          (sd.left * sd.right - Mat::Identity(sys.n, sys.n))
                              .cwiseAbs()
                              .maxCoeff());
      const Mat A = sys.DH(u).partialPivLu().solve(sys.DG(u));
      for (int i = 0; i < sys.n; ++i) {
        const double res =
            (A * sd.right.col(i) - sd.lambdas[i] * sd.right.col(i)).norm();
        worst_res = std::max(worst_res, res);
      }
    }
    CHECK(worst_bi <= 1e-10);
    CHECK(worst_res <= 1e-8);
  }
}

TEST_CASE("linear degeneracy residual is tiny on the gallery") {
  for (const auto& name : gallery_names()) {
    const auto rep = probe_hypotheses(gallery(name), 100);
    CAPTURE(name);
    CHECK(rep.hyp[3].margin <= 1e-8);
  }
}

TEST_CASE("eigenvector fields are continuous in u") {
  for (const auto& name : {"chaplygin_tracers2", "triangular_ld"}) {
    const auto sys = gallery(name);
    CAPTURE(name);
    for (const Vec& u : ball_samples(sys.n, 0.8 * sys.r_ball, 50)) {
      Vec du = Vec::Constant(sys.n, 1e-6 / std::sqrt(double(sys.n)));
      const auto a = spectrum(sys, u);
      const auto b = spectrum(sys, (u + du).eval());
      CHECK((a.right - b.right).cwiseAbs().maxCoeff() <= 1e-4);
    }
  }
}

TEST_CASE("spectrum is deterministic") {
  const auto sys = gallery("chaplygin_tracers2");
  Vec u(4);
  u << 0.01, -0.02, 0.005, 0.015;
  const auto a = spectrum(sys, u);
  const auto b = spectrum(sys, u);
  CHECK((a.right - b.right).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.lambdas - b.lambdas).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unknown gallery name") {
  CHECK_THROWS_AS(gallery("nope"), UnknownSystem);
}

static const char* kTriangularCfg = R"(
# two-field triangular system with constant eigenvalues
name = tri_cfg
n = 2
m = 1
r_ball = 1.0
G.matrix = -1 0 / 0 2
G.term.1 = 1 1.0 sin 2
b1.matrix = 0 1
b2.matrix = 1 0
)";

TEST_CASE("system config loader matches the handwritten gallery system") {
  const auto sys = load_system(kTriangularCfg);
  const auto ref = gallery("triangular_ld");
  for (const Vec& u : ball_samples(2, 0.5, 20)) {
    const auto a = spectrum(sys, u), b = spectrum(ref, u);
    CHECK((a.lambdas - b.lambdas).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((sys.G(u) - ref.G(u)).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK(probe_hypotheses(sys, 64).all_pass());
}

TEST_CASE("config loader rejects unknown keys with a line number") {
  const std::string bad = "n = 2\nm = 1\nG.matrix = -1 0 / 0 2\n"
                          "b1.matrix = 0 1\nb2.matrix = 1 0\nwhoops = 3\n";
  try {
    load_system(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 6") != std::string::npos);
    CHECK(std::string(e.what()).find("whoops") != std::string::npos);
  }
}

TEST_CASE("config loader supports poly terms and auto entropy") {
  const std::string cfg =
      "n = 2\nm = 1\nG.matrix = 0 1 / 1 0\nentropy = auto\n"
      "b1.matrix = 1 0\nb2.matrix = 0 1\n";
  const auto sys = load_system(cfg);
  REQUIRE(sys.entropy.has_value());
  CHECK(probe_hypotheses(sys, 64).all_pass());

  const std::string poly =
      "n = 1\nm = 0\nG.matrix = 2\nG.term.1 = 1 0.5 poly 1 0,0,1\n"
      "b1.matrix = 1\nb2.matrix =\n";
  // poly adds 0.5*u^2: genuinely nonlinear, (H4) must fail
  CHECK_THROWS_AS(
      {
        auto s = load_system(poly);
        validate(s, 32);
      },
      Error);
}
