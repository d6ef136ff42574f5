#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace ppc {

using NodeId = std::int32_t;
using Currency = double;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(squared_distance(a, b));
}

// Relative tolerance used for budget and feasibility comparisons inside
// solvers; absorbs floating-point summation error, nothing more.
inline constexpr double kBudgetTol = 1e-9;

inline bool within_budget(Currency spent, Currency budget) {
  return spent <= budget + kBudgetTol * std::max(1.0, std::abs(budget));
}

// Enumeration caps for the exact (exponential) routines. PPC_ENUM_CAP
// overrides every cap at once.
inline int enumeration_cap(int fallback) {
  if (const char* s = std::getenv("PPC_ENUM_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && v > 0 && v < 64) return static_cast<int>(v);
  }
  return fallback;
}

}  // namespace ppc
