#include "fts/core.hpp"

#include <cmath>
#include <stdexcept>

namespace fts {

double sgnpow(double v, double p, double th) {
  if (v == 0.0) return 0.0;
  double a = std::abs(v);
  if (th > 0.0 && a < th) return v * std::pow(th, p - 1.0);
  return (v > 0.0 ? 1.0 : -1.0) * std::pow(a, p);
}

GKFunction gk_zero() { return {[](double) { return 0.0; }, false}; }

GKFunction gk_power(double a, double b) {
  return {[a, b](double r) { return r == 0.0 ? 0.0 : a * std::pow(r, b); },
          a > 0.0};
}

GKFunction gk_compose(const GKFunction& f, const GKFunction& g) {
  auto fe = f.eval, ge = g.eval;
  return {[fe, ge](double r) { return fe(ge(r)); }, f.unbounded && g.unbounded};
}

GKFunction gk_add(const GKFunction& f, const GKFunction& g) {
  auto fe = f.eval, ge = g.eval;
  return {[fe, ge](double r) { return fe(r) + ge(r); },
          f.unbounded || g.unbounded};
}

GKFunction gk_scale(double s, const GKFunction& f) {
  auto fe = f.eval;
  return {[s, fe](double r) { return s * fe(r); }, s > 0.0 && f.unbounded};
}

GKCheckResult check_gk(const GKFunction& f, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("check_gk: empty grid");
  if (f(0.0) != 0.0) return {false, 0.0, "f(0) != 0"};
  double prev_r = -1.0, prev_v = 0.0;
  bool first = true;
  for (double r : grid) {
    if (r < 0.0) throw std::invalid_argument("check_gk: negative grid point");
    double v = f(r);
    if (!first && r > prev_r && v <= prev_v)
      return {false, r, "not strictly increasing"};
    if (!first && r < prev_r)
      throw std::invalid_argument("check_gk: grid not sorted");
    prev_r = r;
    prev_v = v;
    first = false;
  }
  return {true, 0.0, ""};
}

LyapunovFunction LyapunovFunction::quadratic(const Mat& P) {
  if (P.rows() != P.cols())
    throw std::invalid_argument("quadratic V: P not square");
  if (!P.isApprox(P.transpose(), 1e-12))
    throw std::invalid_argument("quadratic V: P not symmetric");
  LyapunovFunction v;
  v.kind_ = Kind::Quadratic;
  v.P_ = P;
  return v;
}

LyapunovFunction LyapunovFunction::power_form(double k2, double alpha) {
  if (k2 <= 0.0 || alpha <= 0.0)
    throw std::invalid_argument("power-form V: k2, alpha must be positive");
  LyapunovFunction v;
  v.kind_ = Kind::PowerForm;
  v.k2_ = k2;
  v.alpha_ = alpha;
  return v;
}

LyapunovFunction LyapunovFunction::custom(ScalarField v, Field gradient) {
  LyapunovFunction out;
  out.kind_ = Kind::Custom;
  out.custom_ = std::move(v);
  out.grad_ = std::move(gradient);
  return out;
}

double LyapunovFunction::operator()(const Vec& x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return x.dot(P_ * x);
    case Kind::PowerForm:
      return k2_ / (2.0 * alpha_) * std::pow(std::abs(x(0)), 2.0 * alpha_) +
             0.5 * x(1) * x(1);
    case Kind::Custom:
      return custom_(x);
  }
  return 0.0;
}

bool LyapunovFunction::has_gradient() const {
  return kind_ != Kind::Custom || static_cast<bool>(grad_);
}

Vec LyapunovFunction::gradient(const Vec& x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return 2.0 * (P_ * x);
    case Kind::PowerForm: {
      Vec g(2);
      g(0) = k2_ * sgnpow(x(0), 2.0 * alpha_ - 1.0);
      g(1) = x(1);
      return g;
    }
    case Kind::Custom:
      if (!grad_)
        throw std::invalid_argument("custom V: gradient not provided");
      return grad_(x);
  }
  return Vec();
}

bool LyapunovFunction::positive_definite(const std::vector<double>& radii,
                                         int samples_per_sphere) const {
  if (kind_ == Kind::Quadratic) {
    Eigen::SelfAdjointEigenSolver<Mat> es(P_);
    return es.eigenvalues().minCoeff() > 0.0;
  }
  // Sphere sampling (2-D directions; higher dimensions sampled on coordinate
  // planes as well).
  for (double r : radii) {
    for (int k = 0; k < samples_per_sphere; ++k) {
      double th = 2.0 * M_PI * k / samples_per_sphere;
      Vec x = Vec::Zero(2);
      x(0) = r * std::cos(th);
      x(1) = r * std::sin(th);
      if ((*this)(x) <= 0.0) return false;
    }
  }
  return true;
}

double LyapunovFunction::lambda_min() const {
  if (kind_ != Kind::Quadratic)
    throw std::invalid_argument("lambda_min: quadratic kind only");
  Eigen::SelfAdjointEigenSolver<Mat> es(P_);
  return es.eigenvalues().minCoeff();
}

bool HybridSystem::origin_is_equilibrium(double tol) const {
  Vec zero = Vec::Zero(dimension);
  for (const auto& f : flows)
    if (f(zero).norm() > tol) return false;
  for (const auto& g : jumps)
    if (g(zero).norm() > tol) return false;
  return true;
}

double TimeTable::period() const {
  double p = 0.0;
  for (const auto& [len, mode] : intervals) p += len;
  return p;
}

int TimeTable::mode_at(double t) const {
  if (intervals.empty()) throw std::invalid_argument("TimeTable: empty");
  double p = period();
  if (repeat && p > 0.0) t = std::fmod(t, p);
  double acc = 0.0;
  for (const auto& [len, mode] : intervals) {
    acc += len;
    if (t < acc) return mode;
  }
  return intervals.back().second;
}

std::vector<std::pair<double, int>> TimeTable::jump_schedule(
    double t_end) const {
  std::vector<std::pair<double, int>> out;
  if (jump_offsets.empty() || intervals.empty()) return out;
  double start = 0.0;
  std::size_t k = 0;
  while (start < t_end) {
    double len = intervals[k].first;
    for (const auto& [off, jidx] : jump_offsets) {
      double t = start + off;
      if (off < len && t < t_end) out.emplace_back(t, jidx);
    }
    start += len;
    if (++k == intervals.size()) {
      if (!repeat) break;
      k = 0;
    }
  }
  return out;
}

bool TimeTable::minimal() const {
  for (std::size_t k = 1; k < intervals.size(); ++k)
    if (intervals[k].second == intervals[k - 1].second) return false;
  if (repeat && intervals.size() > 1 &&
      intervals.front().second == intervals.back().second)
    return false;
  return true;
}

GapResult power_gap_inequality(const std::vector<double>& a,
                               const std::vector<double>& b, double r) {
  if (a.size() != b.size())
    throw std::invalid_argument("power_gap_inequality: size mismatch");
  if (r <= 0.0 || r >= 1.0)
    throw std::invalid_argument("power_gap_inequality: need 0 < r < 1");
  GapResult out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] < 0.0 || a[i] < b[i])
      throw std::invalid_argument(
          "power_gap_inequality: need a_i >= b_i >= 0");
    out.lhs += std::pow(a[i], r) - std::pow(b[i], r);
    out.rhs += std::pow(a[i] - b[i], r);
  }
  out.holds = out.lhs <= out.rhs + kIneqTol;
  return out;
}

SandwichResult sum_power_sandwich(const std::vector<double>& z, double r) {
  if (r <= 0.0 || r > 1.0)
    throw std::invalid_argument("sum_power_sandwich: need 0 < r <= 1");
  double sum = 0.0;
  SandwichResult out;
  for (double v : z) {
    if (v < 0.0)
      throw std::invalid_argument("sum_power_sandwich: negative entry");
    sum += v;
    out.mid += std::pow(v, r);
  }
  out.low = std::pow(sum, r);
  out.high = std::pow(static_cast<double>(z.size()), 1.0 - r) * out.low;
  out.holds =
      out.low <= out.mid + kIneqTol && out.mid <= out.high + kIneqTol;
  return out;
}

}  // namespace fts
