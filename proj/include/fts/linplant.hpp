#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fts/core.hpp"
#include "fts/switchlaw.hpp"

namespace fts {

struct LinearSwitchedPlant {
  std::vector<Mat> A;   // n x n
  std::vector<Vec> B;   // n x 1
  std::vector<Vec> C;   // 1 x n, stored as vectors
  int sigma0 = 1;       // distinguished controllable/observable mode (1-based)

  int n_modes() const { return static_cast<int>(A.size()); }
  int dim() const { return A.empty() ? 0 : static_cast<int>(A[0].rows()); }
  // Canonical shapes for mode sigma0: A = shift matrix, B = e_n, C = e_1^T.
  bool canonical_sigma0() const;
};

struct ObserverConfig {
  Vec l;               // gains l_1..l_n
  double alpha = 0.9;  // 1 - (n-1)/n < alpha < 1
  // Linear clamp threshold for the fractional powers near the origin
  // (discretization mitigation; 0 disables).
  double clamp = 0.0;

  int n() const { return static_cast<int>(l.size()); }
  std::vector<double> exponents() const;  // alpha_i = i*alpha - (i-1)
  // Abar = [-l | [I_{n-1}; 0]] must be Hurwitz.
  Mat abar() const;
  bool abar_hurwitz() const;
  bool exponents_valid() const;  // all alpha_i in (0,1]
};

struct ControllerConfig {
  Vec k;              // gains k_1..k_n
  double beta = 0.9;  // in (0,1)
  double clamp = 0.0;

  int n() const { return static_cast<int>(k.size()); }
  // beta_n = beta, beta_{j-1} = beta_j beta_{j+1} / (2 beta_{j+1} - beta_j)
  // with beta_{n+1} = 1.
  std::vector<double> exponents() const;
  bool exponents_valid() const;  // recursion defined, all beta_j in (0,1]
  // s^n + k_n s^{n-1} + ... + k_2 s + k_1.
  std::vector<double> char_poly() const;
};

// coeffs in descending powers, leading coefficient 1. True iff all roots have
// negative real part (companion-matrix eigenvalues, cross-checked by a Routh
// table for degree <= 6).
bool is_hurwitz_poly(const std::vector<double>& coeffs);

struct CtrbObsvReport {
  std::vector<bool> controllable, observable;
  bool sigma0_ok = false;
};

CtrbObsvReport ctrb_obsv_check(const LinearSwitchedPlant& plant,
                               double sv_tol = 1e-9);

// Observer output injection: (l_i sign(y) |y|^{alpha_i}) when the active mode
// is sigma0, else zero.
Vec observer_step_term(const ObserverConfig& cfg, double y_err,
                       bool active_is_sigma0);

// u = -sum k_i sign(xhat_i) |xhat_i|^{beta_i} when the active mode is sigma0,
// else 0.
double control_input(const ControllerConfig& cfg, const Vec& x_hat,
                     bool active_is_sigma0);

// Jump-free hybrid system over the augmented state (x, xhat), one flow per
// plant mode. The law (F = sigma0) acts on the plant sub-state; callers pass
// it to the simulator with law.state_dim = n.
HybridSystem assemble_closed_loop(const LinearSwitchedPlant& plant,
                                  const ObserverConfig& obs,
                                  const ControllerConfig& ctrl,
                                  const SwitchLaw& law);

}  // namespace fts
