#include "fts/registry.hpp"

#include <cmath>
#include <stdexcept>

namespace fts {

namespace {

double get(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double require(const Params& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end())
    throw std::invalid_argument("registry: missing parameter '" + key + "'");
  return it->second;
}

}  // namespace

bool flow_exists(const std::string& name) {
  return name == "hyb2_f1" || name == "hyb2_f2" || name == "hyb2_f3" ||
         name == "hyb2_f4" || name == "hyb2_f5" || name == "scalar_power" ||
         name == "linear2";
}

bool jump_exists(const std::string& name) { return name == "scale"; }

Field make_flow(const std::string& name, const Params& p) {
  if (name == "hyb2_f1") {
    return [](const Vec& x) -> Vec {
      Vec f(2);
      f << 0.01 * x(0) * x(0) + x(1), -0.01 * x(0) * x(0) * x(0) + x(1);
      return f;
    };
  }
  if (name == "hyb2_f2") {
    return [](const Vec& x) -> Vec {
      Vec f(2);
      f << 0.01 * x(0) - x(1), -x(0) * x(0) + 0.01 * x(1);
      return f;
    };
  }
  if (name == "hyb2_f3") {
    return [](const Vec& x) -> Vec {
      Vec f(2);
      f << -x(0) - x(1), x(0) - x(1);
      return f;
    };
  }
  if (name == "hyb2_f4") {
    return [](const Vec& x) -> Vec {
      Vec f(2);
      f << 0.01 * x(0) * x(0) + 0.01 * x(0) * x(1),
          -0.01 * x(0) * x(0) * x(0) + x(1) * x(1);
      return f;
    };
  }
  if (name == "hyb2_f5") {
    double k1 = get(p, "k1", 20.0);
    double k2 = get(p, "k2", 10.0);
    double alpha = require(p, "alpha");
    double p1 = get(p, "p1", alpha);
    double p2 = get(p, "p2", 2.0 - 2.0 * alpha);
    double clamp = get(p, "clamp", 0.0);
    return [k1, k2, p1, p2, clamp](const Vec& x) -> Vec {
      Vec f(2);
      f << x(1) - k1 * sgnpow(x(0), p1, clamp),
          -k2 * sgnpow(x(0), p2, clamp);
      return f;
    };
  }
  if (name == "scalar_power") {
    double c = require(p, "c");
    double pw = require(p, "p");
    double clamp = get(p, "clamp", 0.0);
    return [c, pw, clamp](const Vec& x) -> Vec {
      Vec f(1);
      f << -c * sgnpow(x(0), pw, clamp);
      return f;
    };
  }
  if (name == "linear2") {
    double a11 = require(p, "a11"), a12 = require(p, "a12");
    double a21 = require(p, "a21"), a22 = require(p, "a22");
    return [a11, a12, a21, a22](const Vec& x) -> Vec {
      Vec f(2);
      f << a11 * x(0) + a12 * x(1), a21 * x(0) + a22 * x(1);
      return f;
    };
  }
  throw std::invalid_argument("registry: unknown flow '" + name + "'");
}

Field make_jump(const std::string& name, const Params& p) {
  if (name == "scale") {
    double gain = require(p, "gain");
    return [gain](const Vec& x) -> Vec { return gain * x; };
  }
  throw std::invalid_argument("registry: unknown jump '" + name + "'");
}

}  // namespace fts
