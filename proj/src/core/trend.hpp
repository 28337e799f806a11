#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rfim {

enum class TrendVerdict { decreasing_outside_2se, flat, increasing, inconclusive };

std::string verdict_name(TrendVerdict v);

struct TrendPoint {
  double n = 0;
  double estimate = 0;
  double se = 0;
};

// Finite-size trend over an n-ladder. The verdict applies the 2-SE step
// rule to successive ladder points; the decay exponent comes from a
// log-log least-squares fit when every estimate is positive.
struct TrendReport {
  std::string observable;
  std::vector<TrendPoint> points;  // ascending n
  TrendVerdict verdict = TrendVerdict::inconclusive;
  std::optional<double> decay_exponent;
  std::optional<double> exponent_ci_half_width;  // 2 sigma
  // boundedness summary used by the free-energy variance scan
  std::optional<double> max_min_ratio;
  std::optional<bool> bounded;
  double bound_factor = 4.0;
};

TrendReport analyze_trend(const std::string& observable,
                          std::vector<TrendPoint> points,
                          double bound_factor = 4.0);

}  // namespace rfim
