#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "fts/core.hpp"
#include "fts/simulator.hpp"

namespace fts {

struct CertificateInputs {
  std::vector<LyapunovFunction> lyapunov_set;  // one V_i per flow index
  int F = 1;
  double c = 1.0;
  double beta = 0.5;  // in (0,1)
  GKFunction alpha0, alpha1, alpha2, alpha3;
  int N_f = 1;
  double t_d = 0.0;
  // Cumulative jump-free F-time promised by the schedule over [0, t_end];
  // condition (v) passes on max(achieved, scheduled). Only meaningful for
  // time-table policies.
  std::optional<double> scheduled_Tbar_F;
};

struct PrefixSum {
  double prefix_max = 0.0;  // max over prefixes p of the running sum
  double final_sum = 0.0;
  std::vector<double> terms;  // per-event terms for diagnostics
};

// Condition (i): sum over switch instants of V_new(x) - V_old(x).
PrefixSum condition_i_sum(const HybridTrajectory& traj,
                          const std::vector<LyapunovFunction>& lyap);
// Condition (ii): per mode interval, flow growth of the active V summed over
// the interval's maximal jump-free segments (jump increments belong to
// condition (iii), not here).
PrefixSum condition_ii_sum(const HybridTrajectory& traj,
                           const std::vector<LyapunovFunction>& lyap);
// Condition (iii): for mode i, sum over jumps fired while i is active of
// V_i(x+) - V_i(x).
PrefixSum condition_iii_sum(const HybridTrajectory& traj,
                            const std::vector<LyapunovFunction>& lyap, int i);

struct DecayFit {
  double c_hat = 0.0;
  double beta_hat = 0.0;
  // Worst sample margin of c_hat*V^beta_hat - (-dV/dt) minus the slack;
  // <= 0 means the fitted inequality holds at every sample.
  double residual = 0.0;
  bool strictly_fts = false;  // beta_hat < 1 (flagged otherwise)
  int n_samples = 0;
};

// Least-squares fit of log(-dV/dt) = log c + beta log V over the jump-free
// mode-F samples, finite-difference dV/dt (centered where possible).
// Throws when V_F never decreases on the F intervals.
DecayFit fit_decay(const HybridTrajectory& traj, int F,
                   const LyapunovFunction& V_F);

// gamma = alpha^(1-beta)/(c(1-beta)) + alpha_bar^(1-beta)/(c(1-beta)) with
// alpha = a0+a1+a2+N_f*a3 and alpha_bar = a1+a2+N_f*a3 evaluated at r0.
double gamma_budget(double x0_norm, const GKFunction& a0, const GKFunction& a1,
                    const GKFunction& a2, const GKFunction& a3, int N_f,
                    double c, double beta);

// gamma_bar = M * alpha(r0)^(1-beta)/(c(1-beta)).
double corollary1_budget(double x0_norm, const GKFunction& alpha, int M,
                         double c, double beta);

// Time for Vdot = -c V^beta to reach 0 from V0.
double settling_time_scalar(double V0, double c, double beta);

struct ConditionEntry {
  std::string name;
  double bound = 0.0;
  double achieved = 0.0;
  bool pass = false;
};

struct CertificateReport {
  ConditionEntry cond_i, cond_ii, cond_iii, cond_iv, cond_v;
  double fitted_c = 0.0, fitted_beta = 0.0, fit_residual = 0.0;
  double gamma = 0.0;
  double achieved_Tbar_F = 0.0;
  double scheduled_Tbar_F = 0.0;
  int activation_count_M = 0;
  bool m_bound_ok = false;  // M <= gamma / t_d
  bool dwell_ok = false;
  bool dwell_never_active = false;
  bool corollary2_path = false;  // jump-free trajectory
  // Stability chain check: max over switch instants of V_active(x(t_p)),
  // to compare against alpha(r0).
  double max_switch_V = 0.0;
  double alpha_at_r0 = 0.0;
  bool certified = false;

  std::string to_text() const;
  nlohmann::json to_json() const;
};

CertificateReport certify(const HybridTrajectory& traj,
                          const CertificateInputs& in);

// Smallest r such that the sublevel sets {V_i <= level} all fit in B_r.
double enclosing_radius(const std::vector<LyapunovFunction>& lyap,
                        double level);
// Inverse map: largest level whose enclosing radius is <= eps.
double level_for_radius(const std::vector<LyapunovFunction>& lyap, double eps);

}  // namespace fts
