#pragma once

#include <cmath>
#include <string>

#include "scaffold/common.hpp"

namespace scaffold {

class DomainError : public Error {
 public:
  using Error::Error;
};

// Trapezoid on the knowledge-score axis: rises a->b, plateau b->c, falls c->d.
struct MembershipShape {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  bool ordered() const { return a <= b && b <= c && c <= d; }
  bool in_unit_range() const { return a >= 0.0 && d <= 1.0 && b >= 0.0 && c <= 1.0; }
  double plateau_midpoint() const { return 0.5 * (b + c); }

  bool operator==(const MembershipShape&) const = default;
};

// Degree of membership of x in shape. Zero-width ramps behave as step edges:
// the plateau [b, c] is closed, the support outside it is open.
inline double membership(double x, const MembershipShape& s) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("membership: score " + std::to_string(x) + " outside [0,1]");
  }
  if (x >= s.b && x <= s.c) return 1.0;
  if (x <= s.a || x >= s.d) return 0.0;
  if (x < s.b) return (x - s.a) / (s.b - s.a);
  return (s.d - x) / (s.d - s.c);
}

}  // namespace scaffold
