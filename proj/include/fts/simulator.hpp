#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fts/core.hpp"

namespace fts {

struct Sample {
  double t;
  int j;     // jump counter
  int mode;  // active flow index (1-based)
  Vec x;
};

struct JumpEvent {
  double t;
  int jump_index;  // 1-based
  int mode;        // flow active when the jump fired
  Vec x_before, x_after;
};

struct ModeInterval {
  int mode;
  double t_begin, t_end;  // [t_begin, t_end)
  double length() const { return t_end - t_begin; }
};

struct HybridTrajectory {
  enum class Status { Completed, Converged, Diverged, Zeno };

  std::vector<Sample> samples;
  std::vector<JumpEvent> jump_events;
  std::vector<ModeInterval> mode_intervals;
  // Largest jump-free connected sub-interval of each mode interval,
  // parallel to mode_intervals.
  std::vector<std::pair<double, double>> jump_free_subintervals;

  double dt = 0.0;
  double t_stop = 0.0;
  Status status = Status::Completed;
  std::string message;
  int law_hold_warnings = 0;  // state-law steps resolved by hold-and-warn

  bool converged() const { return status == Status::Converged; }
  bool failed() const {
    return status == Status::Diverged || status == Status::Zeno;
  }
};

struct SimConfig {
  double dt = 1e-3;
  double t_end = 10.0;
  double stop_norm = 1e-10;
  double zeno_window = 1.0;
  int zeno_max_jumps = 1000;
};

HybridTrajectory simulate(const HybridSystem& sys, const SwitchingPolicy& policy,
                          const Vec& x0, const SimConfig& cfg);

struct ModeTimeline {
  std::vector<ModeInterval> intervals;             // T_{i_k}
  std::vector<double> jump_times;                  // J_i
  std::vector<std::pair<double, double>> jump_free;  // T-bar_{i_k}
  double cumulative_jump_free = 0.0;               // sum |T-bar_{i_k}|
};

ModeTimeline mode_timeline(const HybridTrajectory& traj, int mode);

struct DwellCheck {
  bool ok = false;
  bool never_active = false;
  int violation_index = -1;  // index into the mode's jump-free list
  double min_length = 0.0;
};

// Every jump-free subinterval of mode F must have length >= t_d - dt
// (one-step slack for grid-quantized event times).
DwellCheck check_dwell(const HybridTrajectory& traj, int F, double t_d);

// CSV export: header `t,j,mode,x1..xn`, jump instants duplicated with
// incremented j.
void export_trajectory_csv(const HybridTrajectory& traj, std::ostream& os);
// CSV export: `t,jump_index,xb1..xbn,xa1..xan`.
void export_jump_events_csv(const HybridTrajectory& traj, std::ostream& os);
// CSV export of per-mode Lyapunov time series: `t,V1..VN`.
void export_lyapunov_csv(const HybridTrajectory& traj,
                         const std::vector<LyapunovFunction>& lyap,
                         std::ostream& os);

}  // namespace fts
