#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fts {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Field = std::function<Vec(const Vec&)>;
using Predicate = std::function<bool(const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;

// Absolute tolerance for inequality checks (double accumulation over <=1e5 terms).
inline constexpr double kIneqTol = 1e-9;

// sign(v)*|v|^p with sign(0)*|0|^p = 0. When 0 < |v| < th the power law is
// replaced by the linear interpolation v*th^(p-1) through the origin, which
// removes Euler overshoot chatter near 0 (a discretization mitigation, not
// part of the continuous-time law).
double sgnpow(double v, double p, double th = 0.0);

// ---------------------------------------------------------------------------
// Comparison functions

struct GKFunction {
  std::function<double(double)> eval;
  bool unbounded = false;  // GK-infinity claim
  double operator()(double r) const { return eval(r); }
};

GKFunction gk_zero();
GKFunction gk_power(double a, double b);  // r -> a*r^b
GKFunction gk_compose(const GKFunction& f, const GKFunction& g);
GKFunction gk_add(const GKFunction& f, const GKFunction& g);
GKFunction gk_scale(double s, const GKFunction& f);

struct GKCheckResult {
  bool ok = false;
  double violation_at = 0.0;  // grid point where the check first fails
  std::string reason;
};

// Grid-sampled surrogate for class-GK membership: f(0)=0 and strictly
// increasing along the grid. Grid must be sorted ascending and contain 0.
GKCheckResult check_gk(const GKFunction& f, const std::vector<double>& grid);

// ---------------------------------------------------------------------------
// Lyapunov functions

class LyapunovFunction {
 public:
  enum class Kind { Quadratic, PowerForm, Custom };

  static LyapunovFunction quadratic(const Mat& P);
  // V(x) = k2/(2a)*|x1|^(2a) + |x2|^2/2 on R^2.
  static LyapunovFunction power_form(double k2, double alpha);
  static LyapunovFunction custom(ScalarField v, Field gradient = nullptr);

  Kind kind() const { return kind_; }
  const Mat& P() const { return P_; }
  double k2() const { return k2_; }
  double alpha() const { return alpha_; }

  double operator()(const Vec& x) const;
  bool has_gradient() const;
  Vec gradient(const Vec& x) const;

  // Quadratic: eigenvalue signs. Other kinds: sampling on spheres of the
  // given radii (every sampled direction must give V > 0).
  bool positive_definite(const std::vector<double>& radii = {0.1, 1.0, 10.0},
                         int samples_per_sphere = 64) const;
  // Smallest eigenvalue of P (quadratic kind only).
  double lambda_min() const;

 private:
  Kind kind_ = Kind::Custom;
  Mat P_;
  double k2_ = 0.0, alpha_ = 0.0;
  ScalarField custom_;
  Field grad_;
};

// ---------------------------------------------------------------------------
// Hybrid system and switching policies

struct HybridSystem {
  std::vector<Field> flows;   // f_i, 1-based mode indices i in {1..N_f}
  std::vector<Field> jumps;   // g_j, 1-based jump indices; empty = pure switched system
  Predicate flow_set;         // C; null predicate means R^n
  Predicate jump_set;         // D; null predicate means R^n when jumps exist, else empty
  int dimension = 0;

  int n_flows() const { return static_cast<int>(flows.size()); }
  int n_jumps() const { return static_cast<int>(jumps.size()); }
  bool in_flow_set(const Vec& x) const { return !flow_set || flow_set(x); }
  bool in_jump_set(const Vec& x) const {
    if (jumps.empty()) return false;
    return !jump_set || jump_set(x);
  }
  // Numerical equilibrium check at the origin.
  bool origin_is_equilibrium(double tol = 1e-12) const;
};

struct SwitchLaw;  // module switchlaw

struct TimeTable {
  // (duration, flow index); played in order, then optionally repeated.
  std::vector<std::pair<double, int>> intervals;
  bool repeat = false;
  // Jump offsets within each interval (relative to interval start), with the
  // jump map index to apply. A jump fires at the first grid point >= its time.
  std::vector<std::pair<double, int>> jump_offsets;

  double period() const;
  // Flow index active at time t (right-continuous). Returns the last entry's
  // mode after a non-repeating table is exhausted.
  int mode_at(double t) const;
  // All absolute jump times in [0, t_end), sorted, paired with jump index.
  std::vector<std::pair<double, int>> jump_schedule(double t_end) const;
  // True when consecutive entries (including the wrap of a repeating table)
  // always change mode.
  bool minimal() const;
};

struct SwitchingPolicy {
  enum class Variant { TimeTable, StateLaw };
  Variant variant = Variant::TimeTable;
  TimeTable table;
  std::shared_ptr<const SwitchLaw> law;
  int initial_mode = 1;
};

// ---------------------------------------------------------------------------
// Elementary inequalities

struct GapResult {
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

// sum(a_i^r - b_i^r) <= sum((a_i-b_i)^r) for a>=b>=0, 0<r<1.
GapResult power_gap_inequality(const std::vector<double>& a,
                               const std::vector<double>& b, double r);

struct SandwichResult {
  double low = 0.0, mid = 0.0, high = 0.0;
  bool holds = false;
};

// (sum z)^r <= sum z^r <= M^(1-r) (sum z)^r for z>=0, 0<r<=1.
SandwichResult sum_power_sandwich(const std::vector<double>& z, double r);

}  // namespace fts
