#pragma once

#include <map>
#include <string>

#include "fts/core.hpp"

namespace fts {

using Params = std::map<std::string, double>;

// Named built-in vector fields and jump maps for scenario files. Parameters
// come from the scenario (no expression parser in scope).
//
// Flows:
//   hyb2_f1 .. hyb2_f4         fixed planar polynomial fields
//   hyb2_f5                    [x2 - k1*sgnpow(x1,p1,clamp);
//                               -k2*sgnpow(x1,p2,clamp)]
//                              params: k1, k2, alpha (p1=alpha, p2=2-2*alpha
//                              unless p2 given), clamp
//   scalar_power               -c*sgnpow(x,p,clamp), params: c, p, clamp
//   linear2                    [[a11,a12],[a21,a22]] x
// Jumps:
//   scale                      gain * x, params: gain
Field make_flow(const std::string& name, const Params& p);
Field make_jump(const std::string& name, const Params& p);
bool flow_exists(const std::string& name);
bool jump_exists(const std::string& name);

}  // namespace fts
