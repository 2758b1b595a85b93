#include <doctest.h>

#include <cmath>

#include "fts/monitor.hpp"
#include "fts/simulator.hpp"

using namespace fts;

namespace {

Vec v1(double a) {
  Vec x(1);
  x << a;
  return x;
}

}  // namespace

TEST_CASE("condition (i) sums V changes across switch instants") {
  // Constant state, V1 = x'x, V2 = 2 x'x: each 1->2 switch adds +|x|^2,
  // each 2->1 switch adds -|x|^2.
  HybridSystem sys;
  sys.dimension = 1;
  sys.flows.push_back([](const Vec& x) { return Vec(0.0 * x); });
  sys.flows.push_back([](const Vec& x) { return Vec(0.0 * x); });
  SwitchingPolicy pol;
  pol.table.intervals = {{0.5, 1}, {0.5, 2}};
  pol.table.repeat = true;
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 1.9;  // stop short of the 2.0 boundary switch
  cfg.stop_norm = 0.0;
  auto traj = simulate(sys, pol, v1(3.0), cfg);

  std::vector<LyapunovFunction> lyap{
      LyapunovFunction::quadratic(Mat::Identity(1, 1)),
      LyapunovFunction::quadratic(2.0 * Mat::Identity(1, 1))};
  auto s = condition_i_sum(traj, lyap);
  REQUIRE(s.terms.size() == 3);  // switches at 0.5, 1.0, 1.5
  CHECK(s.terms[0] == doctest::Approx(9.0));
  CHECK(s.terms[1] == doctest::Approx(-9.0));
  CHECK(s.terms[2] == doctest::Approx(9.0));
  CHECK(s.prefix_max == doctest::Approx(9.0));
  CHECK(s.final_sum == doctest::Approx(9.0));
}

TEST_CASE("condition (ii) measures flow growth and excludes jump increments") {
  // f = 0, one jump halving the state: flow growth is exactly zero while the
  // jump increment lands in condition (iii).
  HybridSystem sys;
  sys.dimension = 1;
  sys.flows.push_back([](const Vec& x) { return Vec(0.0 * x); });
  sys.jumps.push_back([](const Vec& x) { return Vec(0.5 * x); });
  SwitchingPolicy pol;
  pol.table.intervals = {{1.0, 1}};
  pol.table.repeat = false;
  pol.table.jump_offsets = {{0.5, 1}};
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 1.0;
  cfg.stop_norm = 0.0;
  auto traj = simulate(sys, pol, v1(2.0), cfg);

  std::vector<LyapunovFunction> lyap{
      LyapunovFunction::quadratic(Mat::Identity(1, 1))};
  auto ii = condition_ii_sum(traj, lyap);
  CHECK(ii.final_sum == doctest::Approx(0.0));
  CHECK(ii.prefix_max <= kIneqTol);

  auto iii = condition_iii_sum(traj, lyap, 1);
  REQUIRE(iii.terms.size() == 1);
  CHECK(iii.terms[0] == doctest::Approx(0.25 * 4.0 - 4.0));  // 1 - 4 = -3
  CHECK(condition_iii_sum(traj, lyap, 1).final_sum == doctest::Approx(-3.0));
}

TEST_CASE("condition (ii) on a decaying flow equals the V endpoint change") {
  HybridSystem sys;
  sys.dimension = 1;
  sys.flows.push_back([](const Vec& x) { return Vec(-x); });
  SwitchingPolicy pol;
  pol.table.intervals = {{1.0, 1}};
  pol.table.repeat = false;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.stop_norm = 0.0;
  auto traj = simulate(sys, pol, v1(1.0), cfg);
  std::vector<LyapunovFunction> lyap{
      LyapunovFunction::quadratic(Mat::Identity(1, 1))};
  auto ii = condition_ii_sum(traj, lyap);
  double v_end = traj.samples.back().x(0) * traj.samples.back().x(0);
  CHECK(ii.final_sum == doctest::Approx(v_end - 1.0).epsilon(1e-9));
  CHECK(ii.prefix_max <= kIneqTol);
}

TEST_CASE("fit_decay recovers exact power decay") {
  // xdot = -sgnpow(x, 0.5), V = x^2: dV/dt = -2 V^{3/4}.
  HybridSystem sys;
  sys.dimension = 1;
  sys.flows.push_back([](const Vec& x) { return v1(-sgnpow(x(0), 0.5)); });
  SwitchingPolicy pol;
  pol.table.intervals = {{5.0, 1}};
  pol.table.repeat = true;
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 1.0;
  cfg.stop_norm = 1e-10;
  auto traj = simulate(sys, pol, v1(1.0), cfg);
  auto fit = fit_decay(traj, 1, LyapunovFunction::quadratic(Mat::Identity(1, 1)));
  CHECK(fit.c_hat == doctest::Approx(2.0).epsilon(0.02));
  CHECK(fit.beta_hat == doctest::Approx(0.75).epsilon(0.02));
  CHECK(fit.strictly_fts);
  CHECK(fit.n_samples > 100);
}

TEST_CASE("fit_decay throws on nondecreasing V") {
  HybridSystem sys;
  sys.dimension = 1;
  sys.flows.push_back([](const Vec& x) { return Vec(x); });  // growing
  SwitchingPolicy pol;
  pol.table.intervals = {{1.0, 1}};
  pol.table.repeat = true;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.stop_norm = 0.0;
  auto traj = simulate(sys, pol, v1(1.0), cfg);
  CHECK_THROWS(fit_decay(traj, 1,
                         LyapunovFunction::quadratic(Mat::Identity(1, 1))));
}

TEST_CASE("budget closed forms") {
  // alpha0(r) = r^2, others zero, c = 2, beta = 0.75:
  // gamma = (r0^2)^{1/4} / (2 * 1/4) = 2 sqrt(r0).
  double g = gamma_budget(4.0, gk_power(1.0, 2.0), gk_zero(), gk_zero(),
                          gk_zero(), 5, 2.0, 0.75);
  CHECK(g == doctest::Approx(2.0 * std::sqrt(4.0)));
  // Corollary-1 form: M * alpha(r0)^{1-beta} / (c (1-beta)).
  double gb = corollary1_budget(4.0, gk_power(1.0, 2.0), 3, 2.0, 0.75);
  CHECK(gb == doctest::Approx(3.0 * std::pow(16.0, 0.25) / 0.5));
  // Settling time of Vdot = -c V^beta: V0^{1-beta} / (c (1-beta)).
  CHECK(settling_time_scalar(1.0, 1.0, 0.5) == doctest::Approx(2.0));
  CHECK(settling_time_scalar(16.0, 2.0, 0.75) ==
        doctest::Approx(std::pow(16.0, 0.25) / 0.5));
}

TEST_CASE("enclosing radius and level inverse round-trip (quadratic)") {
  Mat P(2, 2);
  P << 2.0, 0.0, 0.0, 3.0;
  std::vector<LyapunovFunction> lyap{LyapunovFunction::quadratic(P)};
  CHECK(enclosing_radius(lyap, 8.0) == doctest::Approx(2.0));
  CHECK(level_for_radius(lyap, 2.0) == doctest::Approx(8.0));
}

TEST_CASE("enclosing radius for non-quadratic V via sampling") {
  // V = 10/(2*0.98) |x1|^{1.96} + x2^2/2. At level L the x2-axis extent
  // sqrt(2L) dominates for L large.
  std::vector<LyapunovFunction> lyap{LyapunovFunction::power_form(10.0, 0.98)};
  double L = 50.0;
  double want = std::sqrt(2.0 * L);
  CHECK(enclosing_radius(lyap, L) == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("certify a clean finite-time run end to end") {
  HybridSystem sys;
  sys.dimension = 1;
  sys.flows.push_back([](const Vec& x) { return v1(-sgnpow(x(0), 0.5, 1e-8)); });
  SwitchingPolicy pol;
  pol.table.intervals = {{10.0, 1}};
  pol.table.repeat = true;
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 5.0;
  cfg.stop_norm = 1e-10;
  auto traj = simulate(sys, pol, v1(1.0), cfg);
  REQUIRE(traj.converged());

  CertificateInputs in;
  in.lyapunov_set = {LyapunovFunction::quadratic(Mat::Identity(1, 1))};
  in.F = 1;
  in.c = 2.0;
  in.beta = 0.75;
  in.alpha0 = gk_power(1.1, 2.0);
  in.alpha1 = gk_power(0.01, 2.0);
  in.alpha2 = gk_power(0.01, 2.0);
  in.alpha3 = gk_power(0.01, 2.0);
  in.N_f = 1;
  in.t_d = 0.1;
  in.scheduled_Tbar_F = 5.0;  // single-mode table over [0, t_end]
  auto rep = certify(traj, in);
  CHECK(rep.certified);
  CHECK(rep.corollary2_path);  // no jumps
  CHECK(rep.activation_count_M == 1);
  CHECK(rep.m_bound_ok);
  CHECK(rep.cond_i.pass);
  CHECK(rep.cond_ii.pass);
  CHECK(rep.cond_iii.pass);
  CHECK(rep.cond_iv.pass);
  CHECK(rep.cond_v.pass);
  // Jump-free budget drops the alpha3 term: alpha = 1.12 r^2, bar = 0.02 r^2.
  double want_gamma = (std::pow(1.12, 0.25) + std::pow(0.02, 0.25)) / 0.5;
  CHECK(rep.gamma == doctest::Approx(want_gamma));

  auto js = rep.to_json();
  CHECK(js["condition_v"]["pass"].get<bool>());
  CHECK(js["gamma"].get<double>() == doctest::Approx(rep.gamma));
  CHECK(rep.to_text().find("certified: true") != std::string::npos);
}
