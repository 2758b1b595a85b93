#pragma once

#include <string>
#include <vector>

#include "fts/core.hpp"

namespace fts {

struct MuTable {
  int N = 0;  // number of modes
  // mu[i-1][j-1]; entries may be null (treated as identically zero).
  std::vector<std::vector<ScalarField>> mu;
  std::vector<std::vector<Field>> grad;  // optional gradients, same layout

  static MuTable zeros(int N);
  // Row builders for the named scenario entries: mu_ij(x) = -||x||^2 for all
  // j (gradient -2x), or 0.
  void set_row_neg_norm_squared(int i);
  void set_row_zero(int i);

  double value(int i, int j, const Vec& x) const;
  bool has_gradient(int i, int j) const;
  Vec gradient(int i, int j, const Vec& x) const;

  struct CheckResult {
    bool ok = true;
    std::string what;
    Vec where;
  };
  // mu_ii = 0, mu_ij(0) = 0 and the triangle condition
  // mu_ij + mu_jk <= min{0, mu_ik} at every sample.
  CheckResult check_invariants(const std::vector<Vec>& samples,
                               double tol = kIneqTol) const;
};

struct SwitchLaw {
  MuTable mu_table;
  std::vector<LyapunovFunction> lyapunov;  // V_i per mode
  int F = 1;
  double t_d = 0.0;
  double surface_tol = 1e-6;  // base band half-width around Omega_ij
  // When > 0 the law evaluates V_i and mu_ij on the first state_dim
  // components only (used for observer-augmented states where the law acts
  // on the plant state).
  int state_dim = 0;

  int n_modes() const { return static_cast<int>(lyapunov.size()); }
  Vec project(const Vec& x) const;
  // s_ij(x) = V_i(x) - V_j(x) + mu_ij(x)
  double s(int i, int j, const Vec& x) const;
};

// x in Omega_i: s_ij(x) <= 0 for all j.
bool in_omega_i(const SwitchLaw& law, int i, const Vec& x);

// x in the Omega_ij band: |s_ij(x)| <= surface_tol + extra_band. The band
// replaces the measure-zero exact surface on a discrete grid; the simulator
// widens it by 1e-2*dt*||f|| (local speed term).
bool on_omega_ij(const SwitchLaw& law, int i, int j, const Vec& x,
                 double extra_band = 0.0);

struct NextModeResult {
  int mode;
  bool held_off_interior;  // x left int(Omega_i) with no band hit: hold+warn
};

NextModeResult next_mode_ex(const SwitchLaw& law, int current, const Vec& x_prev,
                            double elapsed, double extra_band = 0.0);
int next_mode(const SwitchLaw& law, int current, const Vec& x_prev,
              double elapsed, double extra_band = 0.0);

enum class SurfaceKind { Transversal, Sliding, Tangent };

// Classifies the crossing geometry at a point of the Omega_ij surface using
// n = grad s_ij: sliding when both fields push into the surface from their
// own sides (n.f_i > 0 and n.f_j < 0).
SurfaceKind sliding_check(const SwitchLaw& law, const HybridSystem& sys, int i,
                          int j, const Vec& x, double tangent_tol = 1e-12);

struct Theorem3Report {
  bool beta_sign_ok = true;   // beta_ij(x) <= 0
  bool eq17_ok = true;        // grad V_i . f_i + sum_j beta_ij s_ij <= 0
  bool eq18_ok = true;        // grad mu_ij . f_i <= 0
  bool mu_ok = true;          // MuTable invariants
  std::string first_violation;
  bool pass() const { return beta_sign_ok && eq17_ok && eq18_ok && mu_ok; }
};

Theorem3Report check_theorem3(
    const SwitchLaw& law, const HybridSystem& sys,
    const std::vector<std::vector<ScalarField>>& beta_table,
    const std::vector<Vec>& samples, double tol = kIneqTol);

}  // namespace fts
