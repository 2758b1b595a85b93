#include "fts/simulator.hpp"

#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fts/switchlaw.hpp"

namespace fts {

namespace {

constexpr double kDivergenceNorm = 1e12;

void close_interval(HybridTrajectory& traj, int mode, double t_begin,
                    double t_end) {
  if (t_end <= t_begin) return;
  traj.mode_intervals.push_back({mode, t_begin, t_end});
}

// Largest connected sub-interval of [a, b) whose interior contains no jump.
std::pair<double, double> largest_jump_free(
    double a, double b, const std::vector<JumpEvent>& events) {
  std::vector<double> cuts;
  for (const auto& ev : events)
    if (ev.t > a && ev.t < b) cuts.push_back(ev.t);
  double best_a = a, best_b = b, prev = a;
  double best_len = -1.0;
  cuts.push_back(b);
  for (double c : cuts) {
    if (c - prev > best_len) {
      best_len = c - prev;
      best_a = prev;
      best_b = c;
    }
    prev = c;
  }
  return {best_a, best_b};
}

}  // namespace

HybridTrajectory simulate(const HybridSystem& sys,
                          const SwitchingPolicy& policy, const Vec& x0,
                          const SimConfig& cfg) {
  if (cfg.dt <= 0.0) throw std::invalid_argument("simulate: dt must be > 0");
  if (cfg.stop_norm < 0.0)
    throw std::invalid_argument("simulate: stop_norm must be >= 0");
  if (cfg.zeno_max_jumps < 1)
    throw std::invalid_argument("simulate: zeno_max_jumps must be >= 1");
  if (!x0.allFinite()) throw std::invalid_argument("simulate: x0 not finite");
  if (policy.variant == SwitchingPolicy::Variant::StateLaw && !policy.law)
    throw std::invalid_argument("simulate: state-law policy without a law");

  HybridTrajectory traj;
  traj.dt = cfg.dt;

  const bool use_law = policy.variant == SwitchingPolicy::Variant::StateLaw;
  std::vector<std::pair<double, int>> jump_sched;
  std::size_t next_jump = 0;
  int mode = policy.initial_mode;
  if (use_law) {
    mode = policy.initial_mode;
  } else {
    mode = policy.table.mode_at(0.0);
    jump_sched = policy.table.jump_schedule(cfg.t_end);
  }

  Vec x = x0;
  double t = 0.0;
  int j = 0;
  double mode_started = 0.0;
  double elapsed = 0.0;  // time since last switch (state-law dwell clock)
  std::deque<double> recent_jumps;

  traj.samples.push_back({t, j, mode, x});

  auto finish = [&](HybridTrajectory::Status st, const std::string& msg) {
    traj.status = st;
    traj.message = msg;
    traj.t_stop = t;
    close_interval(traj, mode, mode_started, t);
    traj.jump_free_subintervals.reserve(traj.mode_intervals.size());
    for (const auto& iv : traj.mode_intervals)
      traj.jump_free_subintervals.push_back(
          largest_jump_free(iv.t_begin, iv.t_end, traj.jump_events));
    return traj;
  };

  if (x.norm() <= cfg.stop_norm)
    return finish(HybridTrajectory::Status::Converged, "x0 at stop_norm");

  const long n_steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  for (long step = 1; step <= n_steps; ++step) {
    if (!sys.in_flow_set(x))
      return finish(HybridTrajectory::Status::Completed, "left flow set");

    Vec f = sys.flows[mode - 1](x);
    x += cfg.dt * f;
    t = step * cfg.dt;
    elapsed += cfg.dt;

    if (!x.allFinite() || x.norm() > kDivergenceNorm) {
      // Roll back to the last valid sample for diagnostics.
      x = traj.samples.back().x;
      t = traj.samples.back().t;
      return finish(HybridTrajectory::Status::Diverged,
                    "state diverged (non-finite or > 1e12)");
    }

    // Flow switch first, then jump, when both land on the same grid point.
    int new_mode = mode;
    if (use_law) {
      double band = 1e-2 * cfg.dt * f.norm();
      auto res = next_mode_ex(*policy.law, mode, x, elapsed, band);
      new_mode = res.mode;
      if (res.held_off_interior) ++traj.law_hold_warnings;
    } else {
      // Grid times step*dt can land an ulp below an interval boundary; the
      // epsilon keeps switches on their scheduled grid point.
      new_mode = policy.table.mode_at(t + 1e-9);
    }
    if (new_mode != mode) {
      close_interval(traj, mode, mode_started, t);
      mode = new_mode;
      mode_started = t;
      elapsed = 0.0;
    }
    traj.samples.push_back({t, j, mode, x});

    // Scheduled jumps fire at the first grid point >= their time, gated by
    // the jump set.
    while (!use_law && next_jump < jump_sched.size() &&
           jump_sched[next_jump].first <= t + 1e-9) {
      auto [tj, jidx] = jump_sched[next_jump];
      ++next_jump;
      if (!sys.in_jump_set(x)) continue;
      Vec x_after = sys.jumps[jidx - 1](x);
      traj.jump_events.push_back({t, jidx, mode, x, x_after});
      x = x_after;
      ++j;
      traj.samples.push_back({t, j, mode, x});
      recent_jumps.push_back(t);
      while (!recent_jumps.empty() &&
             recent_jumps.front() < t - cfg.zeno_window)
        recent_jumps.pop_front();
      if (static_cast<int>(recent_jumps.size()) > cfg.zeno_max_jumps)
        return finish(HybridTrajectory::Status::Zeno,
                      "zeno guard tripped: > max jumps within window");
    }

    if (x.norm() <= cfg.stop_norm)
      return finish(HybridTrajectory::Status::Converged,
                    "reached stop_norm");
  }
  return finish(HybridTrajectory::Status::Completed, "reached t_end");
}

ModeTimeline mode_timeline(const HybridTrajectory& traj, int mode) {
  if (mode < 1) throw std::invalid_argument("mode_timeline: bad mode index");
  ModeTimeline tl;
  for (std::size_t k = 0; k < traj.mode_intervals.size(); ++k) {
    const auto& iv = traj.mode_intervals[k];
    if (iv.mode != mode) continue;
    tl.intervals.push_back(iv);
    tl.jump_free.push_back(traj.jump_free_subintervals[k]);
    tl.cumulative_jump_free += traj.jump_free_subintervals[k].second -
                               traj.jump_free_subintervals[k].first;
  }
  for (const auto& ev : traj.jump_events)
    if (ev.mode == mode) tl.jump_times.push_back(ev.t);
  return tl;
}

DwellCheck check_dwell(const HybridTrajectory& traj, int F, double t_d) {
  if (t_d <= 0.0) throw std::invalid_argument("check_dwell: t_d must be > 0");
  DwellCheck res;
  ModeTimeline tl = mode_timeline(traj, F);
  if (tl.intervals.empty()) {
    res.ok = true;
    res.never_active = true;
    return res;
  }
  res.ok = true;
  res.min_length = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tl.jump_free.size(); ++k) {
    double len = tl.jump_free[k].second - tl.jump_free[k].first;
    res.min_length = std::min(res.min_length, len);
    if (len < t_d - traj.dt && res.ok) {
      res.ok = false;
      res.violation_index = static_cast<int>(k);
    }
  }
  return res;
}

void export_trajectory_csv(const HybridTrajectory& traj, std::ostream& os) {
  os << "t,j,mode";
  if (!traj.samples.empty())
    for (int c = 1; c <= traj.samples.front().x.size(); ++c) os << ",x" << c;
  os << "\n";
  os << std::setprecision(12);
  for (const auto& s : traj.samples) {
    os << s.t << "," << s.j << "," << s.mode;
    for (int c = 0; c < s.x.size(); ++c) os << "," << s.x(c);
    os << "\n";
  }
}

void export_jump_events_csv(const HybridTrajectory& traj, std::ostream& os) {
  os << "t,jump_index";
  if (!traj.jump_events.empty()) {
    int n = static_cast<int>(traj.jump_events.front().x_before.size());
    for (int c = 1; c <= n; ++c) os << ",xb" << c;
    for (int c = 1; c <= n; ++c) os << ",xa" << c;
  }
  os << "\n";
  os << std::setprecision(12);
  for (const auto& ev : traj.jump_events) {
    os << ev.t << "," << ev.jump_index;
    for (int c = 0; c < ev.x_before.size(); ++c) os << "," << ev.x_before(c);
    for (int c = 0; c < ev.x_after.size(); ++c) os << "," << ev.x_after(c);
    os << "\n";
  }
}

void export_lyapunov_csv(const HybridTrajectory& traj,
                         const std::vector<LyapunovFunction>& lyap,
                         std::ostream& os) {
  os << "t";
  for (std::size_t i = 1; i <= lyap.size(); ++i) os << ",V" << i;
  os << "\n";
  os << std::setprecision(12);
  for (const auto& s : traj.samples) {
    os << s.t;
    for (const auto& V : lyap) os << "," << V(s.x);
    os << "\n";
  }
}

}  // namespace fts
