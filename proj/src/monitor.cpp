#include "fts/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fts {

namespace {

double prefix_max_of(const std::vector<double>& terms) {
  double run = 0.0, best = 0.0;  // empty prefix counts as 0
  for (double v : terms) {
    run += v;
    best = std::max(best, run);
  }
  return best;
}

// Inequality slack for the sampled condition (iv) check: absolute plus
// relative term for discretization error.
double iv_slack(double V) { return 1e-6 + 1e-3 * V; }

}  // namespace

PrefixSum condition_i_sum(const HybridTrajectory& traj,
                          const std::vector<LyapunovFunction>& lyap) {
  PrefixSum out;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const auto& prev = traj.samples[k - 1];
    const auto& cur = traj.samples[k];
    if (cur.mode == prev.mode) continue;
    if (cur.mode < 1 || cur.mode > static_cast<int>(lyap.size()) ||
        prev.mode < 1 || prev.mode > static_cast<int>(lyap.size()))
      throw std::invalid_argument("condition_i_sum: missing V for a mode");
    // cur.x is the pre-jump state at the switch instant (flow switch is
    // resolved before any jump on the same grid point).
    out.terms.push_back(lyap[cur.mode - 1](cur.x) -
                        lyap[prev.mode - 1](cur.x));
  }
  out.prefix_max = prefix_max_of(out.terms);
  for (double v : out.terms) out.final_sum += v;
  return out;
}

PrefixSum condition_ii_sum(const HybridTrajectory& traj,
                           const std::vector<LyapunovFunction>& lyap) {
  PrefixSum out;
  double interval_sum = 0.0;
  bool open = false;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const auto& prev = traj.samples[k - 1];
    const auto& cur = traj.samples[k];
    if (cur.j != prev.j) continue;  // jump increment: condition (iii)
    int m = prev.mode;  // the flow step t_{k-1} -> t_k ran under prev's mode
    if (m < 1 || m > static_cast<int>(lyap.size()))
      throw std::invalid_argument("condition_ii_sum: missing V for a mode");
    interval_sum += lyap[m - 1](cur.x) - lyap[m - 1](prev.x);
    open = true;
    if (cur.mode != prev.mode) {  // interval closed at this switch
      out.terms.push_back(interval_sum);
      interval_sum = 0.0;
      open = false;
    }
  }
  if (open) out.terms.push_back(interval_sum);
  out.prefix_max = prefix_max_of(out.terms);
  for (double v : out.terms) out.final_sum += v;
  return out;
}

PrefixSum condition_iii_sum(const HybridTrajectory& traj,
                            const std::vector<LyapunovFunction>& lyap, int i) {
  if (i < 1 || i > static_cast<int>(lyap.size()))
    throw std::invalid_argument("condition_iii_sum: bad mode index");
  PrefixSum out;
  for (const auto& ev : traj.jump_events) {
    if (ev.mode != i) continue;
    out.terms.push_back(lyap[i - 1](ev.x_after) - lyap[i - 1](ev.x_before));
  }
  out.prefix_max = prefix_max_of(out.terms);
  for (double v : out.terms) out.final_sum += v;
  return out;
}

namespace {

struct FSample {
  double V;
  double dVdt;
};

std::vector<FSample> collect_f_samples(const HybridTrajectory& traj, int F,
                                       const LyapunovFunction& V_F) {
  std::vector<FSample> out;
  const auto& s = traj.samples;
  const double dt = traj.dt;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    if (s[k].mode != F) continue;
    bool left_ok = s[k - 1].mode == F && s[k - 1].j == s[k].j &&
                   std::abs(s[k].t - s[k - 1].t - dt) < dt * 1e-6;
    bool right_ok = s[k + 1].mode == F && s[k + 1].j == s[k].j &&
                    std::abs(s[k + 1].t - s[k].t - dt) < dt * 1e-6;
    double dV;
    if (left_ok && right_ok)
      dV = (V_F(s[k + 1].x) - V_F(s[k - 1].x)) / (2.0 * dt);
    else if (right_ok)
      dV = (V_F(s[k + 1].x) - V_F(s[k].x)) / dt;
    else if (left_ok)
      dV = (V_F(s[k].x) - V_F(s[k - 1].x)) / dt;
    else
      continue;
    out.push_back({V_F(s[k].x), dV});
  }
  return out;
}

}  // namespace

DecayFit fit_decay(const HybridTrajectory& traj, int F,
                   const LyapunovFunction& V_F) {
  auto pts = collect_f_samples(traj, F, V_F);
  if (static_cast<double>(pts.size()) * traj.dt < 10.0 * traj.dt)
    throw std::invalid_argument(
        "fit_decay: mode F has too little jump-free activation");

  // Log-log least squares over decreasing samples.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : pts) {
    if (p.V <= 1e-14 || p.dVdt >= 0.0) continue;
    double lx = std::log(p.V), ly = std::log(-p.dVdt);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2)
    throw std::invalid_argument("fit_decay: V_F nondecreasing on F intervals");
  double denom = n * sxx - sx * sx;
  DecayFit fit;
  fit.beta_hat = (n * sxy - sx * sy) / denom;
  fit.c_hat = std::exp((sy - fit.beta_hat * sx) / n);
  fit.strictly_fts = fit.beta_hat < 1.0 - 1e-6;
  fit.n_samples = n;
  fit.residual = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    if (p.V <= 1e-14) continue;
    double margin = fit.c_hat * std::pow(p.V, fit.beta_hat) - (-p.dVdt) -
                    iv_slack(p.V);
    fit.residual = std::max(fit.residual, margin);
  }
  return fit;
}

double gamma_budget(double x0_norm, const GKFunction& a0, const GKFunction& a1,
                    const GKFunction& a2, const GKFunction& a3, int N_f,
                    double c, double beta) {
  if (c <= 0.0 || beta <= 0.0 || beta >= 1.0)
    throw std::invalid_argument("gamma_budget: need c > 0, 0 < beta < 1");
  double a = a0(x0_norm) + a1(x0_norm) + a2(x0_norm) + N_f * a3(x0_norm);
  double ab = a1(x0_norm) + a2(x0_norm) + N_f * a3(x0_norm);
  double d = c * (1.0 - beta);
  return std::pow(a, 1.0 - beta) / d + std::pow(ab, 1.0 - beta) / d;
}

double corollary1_budget(double x0_norm, const GKFunction& alpha, int M,
                         double c, double beta) {
  if (M < 1) throw std::invalid_argument("corollary1_budget: need M >= 1");
  if (c <= 0.0 || beta <= 0.0 || beta >= 1.0)
    throw std::invalid_argument("corollary1_budget: need c > 0, 0 < beta < 1");
  return M * std::pow(alpha(x0_norm), 1.0 - beta) / (c * (1.0 - beta));
}

double settling_time_scalar(double V0, double c, double beta) {
  if (V0 < 0.0 || c <= 0.0 || beta <= 0.0 || beta >= 1.0)
    throw std::invalid_argument("settling_time_scalar: invalid inputs");
  return std::pow(V0, 1.0 - beta) / (c * (1.0 - beta));
}

CertificateReport certify(const HybridTrajectory& traj,
                          const CertificateInputs& in) {
  if (traj.samples.empty())
    throw std::invalid_argument("certify: empty trajectory");
  CertificateReport rep;
  const double r0 = traj.samples.front().x.norm();
  const auto& V = in.lyapunov_set;

  rep.corollary2_path = traj.jump_events.empty();

  auto c1 = condition_i_sum(traj, V);
  rep.cond_i = {"condition_i", in.alpha1(r0), c1.prefix_max,
                c1.prefix_max <= in.alpha1(r0) + kIneqTol};

  auto c2 = condition_ii_sum(traj, V);
  rep.cond_ii = {"condition_ii", in.alpha2(r0), c2.prefix_max,
                 c2.prefix_max <= in.alpha2(r0) + kIneqTol};

  double worst_iii = 0.0;
  for (int i = 1; i <= in.N_f; ++i)
    worst_iii = std::max(worst_iii, condition_iii_sum(traj, V, i).prefix_max);
  rep.cond_iii = {"condition_iii", in.alpha3(r0), worst_iii,
                  worst_iii <= in.alpha3(r0) + kIneqTol};

  // Condition (iv): user-declared (c, beta) verified sample-wise with the
  // discretization slack; fitted values reported alongside.
  double worst_iv = -std::numeric_limits<double>::infinity();
  bool iv_ok = in.beta > 0.0 && in.beta < 1.0 && in.c > 0.0;
  auto pts = collect_f_samples(traj, in.F, V[in.F - 1]);
  if (pts.empty()) {
    iv_ok = false;
    worst_iv = std::numeric_limits<double>::infinity();
  } else {
    for (const auto& p : pts) {
      double margin =
          in.c * std::pow(p.V, in.beta) - (-p.dVdt) - iv_slack(p.V);
      worst_iv = std::max(worst_iv, margin);
    }
    iv_ok = iv_ok && worst_iv <= kIneqTol;
  }
  rep.cond_iv = {"condition_iv", 0.0, worst_iv, iv_ok};
  try {
    auto fit = fit_decay(traj, in.F, V[in.F - 1]);
    rep.fitted_c = fit.c_hat;
    rep.fitted_beta = fit.beta_hat;
    rep.fit_residual = fit.residual;
  } catch (const std::invalid_argument&) {
    rep.fitted_c = rep.fitted_beta = 0.0;
    rep.fit_residual = std::numeric_limits<double>::quiet_NaN();
  }

  // Condition (v): activation budget. The Corollary 2 path (jump-free
  // trajectory) drops the alpha3 terms.
  const GKFunction a3 = rep.corollary2_path ? gk_zero() : in.alpha3;
  rep.gamma = gamma_budget(r0, in.alpha0, in.alpha1, in.alpha2, a3, in.N_f,
                           in.c, in.beta);
  rep.achieved_Tbar_F = mode_timeline(traj, in.F).cumulative_jump_free;
  rep.scheduled_Tbar_F = in.scheduled_Tbar_F.value_or(0.0);
  double tbar = std::max(rep.achieved_Tbar_F, rep.scheduled_Tbar_F);
  rep.cond_v = {"condition_v", rep.gamma, tbar, tbar >= rep.gamma - kIneqTol};

  rep.activation_count_M = 0;
  for (const auto& iv : traj.mode_intervals)
    if (iv.mode == in.F) ++rep.activation_count_M;
  if (in.t_d > 0.0) {
    auto dw = check_dwell(traj, in.F, in.t_d);
    rep.dwell_ok = dw.ok;
    rep.dwell_never_active = dw.never_active;
    rep.m_bound_ok = rep.activation_count_M <= rep.gamma / in.t_d + kIneqTol;
  } else {
    rep.dwell_ok = true;
    rep.m_bound_ok = true;
  }

  rep.alpha_at_r0 = in.alpha0(r0) + in.alpha1(r0) + in.alpha2(r0) +
                    in.N_f * in.alpha3(r0);
  rep.max_switch_V = 0.0;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const auto& prev = traj.samples[k - 1];
    const auto& cur = traj.samples[k];
    if (cur.mode != prev.mode)
      rep.max_switch_V =
          std::max(rep.max_switch_V, V[cur.mode - 1](cur.x));
  }

  rep.certified = rep.cond_i.pass && rep.cond_ii.pass && rep.cond_iii.pass &&
                  rep.cond_iv.pass && rep.cond_v.pass && rep.dwell_ok;
  return rep;
}

std::string CertificateReport::to_text() const {
  std::ostringstream os;
  os.precision(12);
  auto line = [&](const ConditionEntry& e) {
    os << e.name << ".bound: " << e.bound << "\n"
       << e.name << ".achieved: " << e.achieved << "\n"
       << e.name << ".pass: " << (e.pass ? "true" : "false") << "\n";
  };
  line(cond_i);
  line(cond_ii);
  line(cond_iii);
  line(cond_iv);
  line(cond_v);
  os << "fitted_c: " << fitted_c << "\n"
     << "fitted_beta: " << fitted_beta << "\n"
     << "fit_residual: " << fit_residual << "\n"
     << "gamma: " << gamma << "\n"
     << "achieved_Tbar_F: " << achieved_Tbar_F << "\n"
     << "scheduled_Tbar_F: " << scheduled_Tbar_F << "\n"
     << "activation_count_M: " << activation_count_M << "\n"
     << "m_bound_ok: " << (m_bound_ok ? "true" : "false") << "\n"
     << "dwell_ok: " << (dwell_ok ? "true" : "false") << "\n"
     << "corollary2_path: " << (corollary2_path ? "true" : "false") << "\n"
     << "max_switch_V: " << max_switch_V << "\n"
     << "alpha_at_r0: " << alpha_at_r0 << "\n"
     << "certified: " << (certified ? "true" : "false") << "\n";
  return os.str();
}

nlohmann::json CertificateReport::to_json() const {
  auto entry = [](const ConditionEntry& e) {
    return nlohmann::json{
        {"bound", e.bound}, {"achieved", e.achieved}, {"pass", e.pass}};
  };
  return nlohmann::json{
      {"condition_i", entry(cond_i)},
      {"condition_ii", entry(cond_ii)},
      {"condition_iii", entry(cond_iii)},
      {"condition_iv", entry(cond_iv)},
      {"condition_v", entry(cond_v)},
      {"fitted_c", fitted_c},
      {"fitted_beta", fitted_beta},
      {"fit_residual", fit_residual},
      {"gamma", gamma},
      {"achieved_Tbar_F", achieved_Tbar_F},
      {"scheduled_Tbar_F", scheduled_Tbar_F},
      {"activation_count_M", activation_count_M},
      {"m_bound_ok", m_bound_ok},
      {"dwell_ok", dwell_ok},
      {"corollary2_path", corollary2_path},
      {"max_switch_V", max_switch_V},
      {"alpha_at_r0", alpha_at_r0},
      {"certified", certified}};
}

namespace {

// Radius of {V <= level} along sampled directions (2-D sampling).
double sublevel_radius(const LyapunovFunction& V, double level,
                       int directions = 128) {
  double worst = 0.0;
  for (int k = 0; k < directions; ++k) {
    double th = 2.0 * M_PI * k / directions;
    Vec u(2);
    u << std::cos(th), std::sin(th);
    // V(t*u) is increasing in t for positive definite V along rays; find the
    // boundary by bisection.
    double lo = 0.0, hi = 1.0;
    while (V(hi * u) < level && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (V(mid * u) < level ? lo : hi) = mid;
    }
    worst = std::max(worst, hi);
  }
  return worst;
}

}  // namespace

double enclosing_radius(const std::vector<LyapunovFunction>& lyap,
                        double level) {
  if (level < 0.0)
    throw std::invalid_argument("enclosing_radius: negative level");
  double r = 0.0;
  for (const auto& V : lyap) {
    if (!V.positive_definite())
      throw std::invalid_argument("enclosing_radius: V not positive definite");
    if (V.kind() == LyapunovFunction::Kind::Quadratic)
      r = std::max(r, std::sqrt(level / V.lambda_min()));
    else
      r = std::max(r, sublevel_radius(V, level));
  }
  return r;
}

double level_for_radius(const std::vector<LyapunovFunction>& lyap,
                        double eps) {
  if (eps < 0.0) throw std::invalid_argument("level_for_radius: negative eps");
  bool all_quadratic = true;
  double lam = std::numeric_limits<double>::infinity();
  for (const auto& V : lyap) {
    if (!V.positive_definite())
      throw std::invalid_argument("level_for_radius: V not positive definite");
    if (V.kind() == LyapunovFunction::Kind::Quadratic)
      lam = std::min(lam, V.lambda_min());
    else
      all_quadratic = false;
  }
  if (all_quadratic) return lam * eps * eps;
  double lo = 0.0, hi = 1.0;
  while (enclosing_radius(lyap, hi) < eps && hi < 1e12) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (enclosing_radius(lyap, mid) <= eps ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace fts
