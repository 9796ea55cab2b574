#include <doctest.h>

#include <cmath>

#include "ldft/verify.hpp"

using namespace ldft;

namespace {

PiecewiseConstFn const_g(const Vec& v, double T) {
  return PiecewiseConstFn::constant(0, T, v);
}

PiecewiseConstFn jump_data(const SystemDef& sys, double L,
                           const std::vector<std::pair<double, std::pair<int, double>>>& jumps,
                           const Vec& u0) {
  std::vector<double> breaks;
  std::vector<Vec> vals{u0};
  for (const auto& [x, fa] : jumps) {
    breaks.push_back(x);
    vals.push_back(contact_curve(sys, fa.first, vals.back(), fa.second));
  }
  return PiecewiseConstFn(0, L, breaks, vals);
}

struct Run {
  SystemDef sys;
  PiecewiseConstFn ubar, g1, g2;
  FrontSolution sol;
};

Run make_run(const char* name,
             const std::vector<std::pair<double, std::pair<int, double>>>& jumps,
             double T, TrackerOpts opts = {}) {
  auto sys = gallery(name);
  auto ub = jump_data(sys, 1.0, jumps, sys.zero_state());
  auto g1 = const_g(sys.b1.eval(ub.first()), T);
  auto g2 = const_g(sys.b2.eval(ub.last()), T);
  auto sol = evolve(sys, ub, g1, g2, T, opts);
  return {std::move(sys), std::move(ub), std::move(g1), std::move(g2),
          std::move(sol)};
}

}  // namespace

TEST_CASE("zero solution has zero residuals") {
  const auto sys = gallery("linear2");
  const double T = 1.0;
  const auto ub = PiecewiseConstFn::constant(0, 1, sys.zero_state());
  auto sol = evolve(sys, ub, const_g(sys.b1.eval(sys.zero_state()), T),
                    const_g(sys.b2.eval(sys.zero_state()), T), T);
  const ForwardView v(std::move(sol));
  const auto bumps = standard_bumps(T, 1.0);
  CHECK(weak_residual(v, sys, bumps) == 0.0);
  CHECK(entropy_residual(v, sys, bumps) == 0.0);
  const auto cl = def11_clauses(v, sys, ub,
                                const_g(sys.b1.eval(sys.zero_state()), T),
                                const_g(sys.b2.eval(sys.zero_state()), T));
  CHECK(cl.init_l1 == 0.0);
  CHECK(cl.left_l1 == 0.0);
  CHECK(cl.right_l1 == 0.0);
}

TEST_CASE("one exact contact discontinuity has vanishing residuals") {
  auto R = make_run("linear2", {{0.5, {0, 0.04}}}, 0.4);
  const ForwardView v(std::move(R.sol));
  const auto bumps = standard_bumps(0.4, 1.0);
  CHECK(weak_residual(v, R.sys, bumps) < 1e-12);
  // quadratic entropy is exactly conserved across linear contacts
  CHECK(entropy_residual(v, R.sys, bumps) < 1e-10);
}

TEST_CASE("interaction runs satisfy the weak form within the np budget") {
  TrackerOpts opts;
  opts.epsilon = 1e-3;
  auto R = make_run("triangular_ld",
                    {{0.3, {1, 0.05}}, {0.5, {0, 0.04}}, {0.7, {1, -0.05}}},
                    0.8, opts);
  const double T = 0.8;
  const ForwardView v(std::move(R.sol));
  const auto bumps = standard_bumps(T, 1.0);
  const double w = weak_residual(v, R.sys, bumps);
  CHECK(w <= (opts.epsilon + 1e-9) * T);
  const auto fc = front_checks(v.raw(), R.sys);
  CHECK(fc.pass(opts.epsilon));
}

TEST_CASE("def11 clauses measured independently on evolve output") {
  auto R = make_run("chaplygin", {{0.4, {0, 0.02}}, {0.7, {1, 0.02}}}, 0.6);
  const ForwardView v(std::move(R.sol));
  const auto cl = def11_clauses(v, R.sys, R.ubar, R.g1, R.g2);
  CHECK(cl.pass(1e-3));
  CHECK(cl.init_l1 < 1e-10);
  CHECK(cl.left_l1 < 1e-9);
  CHECK(cl.right_l1 < 1e-9);

  // corrupted fixture: compare against shifted initial data
  auto bad = jump_data(R.sys, 1.0, {{0.45, {0, 0.02}}, {0.7, {1, 0.02}}},
                       R.sys.zero_state());
  const auto cl2 = def11_clauses(v, R.sys, bad, R.g1, R.g2);
  CHECK_FALSE(cl2.pass(1e-3));
}

TEST_CASE("entropy residual scales down with epsilon on np-heavy runs") {
  // force the simplified solver so nonphysical strength actually appears
  const char* cfg = R"(
name = coupled3
n = 3
m = 1
r_ball = 1.0
G.matrix = -1 0 0 / 0 0.5 0 / 0 0 2
G.term.1 = 2 0.4 sin 1
G.term.2 = 3 0.4 poly 2 0,0,1
b1.matrix = 0 1 0 / 0 0 1
b2.matrix = 1 0 0
)";
  const auto sys = load_system(cfg);
  auto ub = jump_data(sys, 1.0, {{0.3, {1, 0.06}}, {0.7, {0, 0.05}}},
                      sys.zero_state());
  const auto g1 = const_g(sys.b1.eval(ub.first()), 0.6);
  const auto g2 = const_g(sys.b2.eval(ub.last()), 0.6);
  TrackerOpts opts;
  opts.gen_cap = 0;
  opts.rho_simp = 1e30;
  opts.epsilon = 1e-3;
  auto sol = evolve(sys, ub, g1, g2, 0.6, opts);
  const ForwardView v(std::move(sol));
  const auto bumps = standard_bumps(0.6, 1.0);
  const double w = weak_residual(v, sys, bumps);
  CHECK(w > 0);
  // nonphysical fronts are the only residual source; lambda_hat bounds the
  // flux factor in the line integral
  CHECK(w <= (v.raw().np_total_max * (1 + v.raw().lambda_hat) + 1e-9) * 0.6);
}

TEST_CASE("oracle comparison on linear transport and equilibrium") {
  auto R = make_run("linear2", {{0.35, {0, 0.02}}, {0.6, {1, 0.03}}}, 1.2);
  const ForwardView v(std::move(R.sol));
  const auto prof = oracle_compare(
      v, R.sys, R.ubar, R.g1, R.g2, OracleKind::exact_characteristics,
      {0.1, 0.3, 0.5, 0.7, 0.9, 1.1});
  // grid-sampled oracle carries O(L/cells) discretization noise
  CHECK(prof.max_error < 2e-3);

  auto Z = make_run("linear2", {}, 1.0);
  const ForwardView vz(std::move(Z.sol));
  const auto pz =
      oracle_compare(vz, Z.sys, Z.ubar, Z.g1, Z.g2,
                     OracleKind::exact_characteristics, {0.2, 0.8});
  CHECK(pz.max_error == 0.0);
}

TEST_CASE("chaplygin run against the finite-volume reference") {
  auto R = make_run("chaplygin", {{0.4, {0, 0.02}}, {0.65, {1, -0.02}}}, 0.35);
  const ForwardView v(std::move(R.sol));
  const auto prof = oracle_compare(v, R.sys, R.ubar, R.g1, R.g2,
                                   OracleKind::fine_godunov, {0.35}, 4096);
  CHECK(prof.max_error < 5e-3);
}

TEST_CASE("wellposedness profile records bounded TV and Lipschitz constants") {
  auto R = make_run("triangular_ld", {{0.4, {0, 0.05}}, {0.6, {1, 0.05}}}, 0.9);
  const ForwardView v(std::move(R.sol));
  const auto prof = wellposedness_profile(v);
  const double Lam =
      budget(R.ubar, R.g1, R.g2, R.sys.b1.eval, R.sys.b2.eval).total;
  CHECK(prof.tv_max <= 10 * Lam);
  CHECK(prof.lipschitz_max < 10 * Lam * 2.5);  // max speed is 2
}

TEST_CASE("bump support violations are rejected") {
  auto R = make_run("linear2", {}, 0.5);
  const ForwardView v(std::move(R.sol));
  CHECK_THROWS_AS(weak_residual(v, R.sys, {Bump{0.1, 0.5, 0.5, 0.2}}),
                  SupportViolation);
}

TEST_CASE("verify_solution aggregates a full report") {
  auto R = make_run("linear2", {{0.5, {0, 0.03}}}, 0.8);
  const ForwardView v(std::move(R.sol));
  const auto rep = verify_solution(v, R.sys, R.ubar, R.g1, R.g2);
  CHECK(rep.weak < 1e-12);
  CHECK(rep.entropy >= 0);
  CHECK(rep.clauses.pass(1e-3));
  CHECK(rep.to_text().find("weak_residual") != std::string::npos);
}
