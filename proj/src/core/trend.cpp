#include "core/trend.hpp"

#include <algorithm>
#include <cmath>

namespace rfim {

std::string verdict_name(TrendVerdict v) {
  switch (v) {
    case TrendVerdict::decreasing_outside_2se: return "decreasing-outside-2SE";
    case TrendVerdict::flat: return "flat";
    case TrendVerdict::increasing: return "increasing";
    case TrendVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

TrendReport analyze_trend(const std::string& observable,
                          std::vector<TrendPoint> points, double bound_factor) {
  TrendReport rep;
  rep.observable = observable;
  std::sort(points.begin(), points.end(),
            [](const TrendPoint& a, const TrendPoint& b) { return a.n < b.n; });
  rep.points = points;
  rep.bound_factor = bound_factor;
  if (points.size() < 2) {
    rep.verdict = TrendVerdict::inconclusive;
    return rep;
  }

  bool all_down = true, all_up = true, all_within = true;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double diff = points[i + 1].estimate - points[i].estimate;
    const double joint =
        std::sqrt(points[i].se * points[i].se + points[i + 1].se * points[i + 1].se);
    if (!(diff < -2.0 * joint)) all_down = false;
    if (!(diff > 2.0 * joint)) all_up = false;
    if (!(std::abs(diff) <= 2.0 * joint)) all_within = false;
  }
  if (all_down)
    rep.verdict = TrendVerdict::decreasing_outside_2se;
  else if (all_up)
    rep.verdict = TrendVerdict::increasing;
  else if (all_within)
    rep.verdict = TrendVerdict::flat;
  else
    rep.verdict = TrendVerdict::inconclusive;

  bool positive = true;
  double emin = points[0].estimate, emax = points[0].estimate;
  for (const auto& p : points) {
    if (!(p.estimate > 0.0)) positive = false;
    emin = std::min(emin, p.estimate);
    emax = std::max(emax, p.estimate);
  }
  if (positive) {
    rep.max_min_ratio = emax / emin;
    rep.bounded = (emax / emin) < bound_factor;
  }

  if (positive && points.size() >= 3) {
    // least squares of log(estimate) on log(n)
    const std::size_t k = points.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : points) {
      const double x = std::log(p.n), y = std::log(p.estimate);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double denom = k * sxx - sx * sx;
    if (denom > 0) {
      const double slope = (k * sxy - sx * sy) / denom;
      const double intercept = (sy - slope * sx) / k;
      double rss = 0;
      for (const auto& p : points) {
        const double r = std::log(p.estimate) - (intercept + slope * std::log(p.n));
        rss += r * r;
      }
      rep.decay_exponent = slope;
      if (k > 2) {
        const double var_slope = rss / static_cast<double>(k - 2) * k / denom;
        rep.exponent_ci_half_width = 2.0 * std::sqrt(std::max(0.0, var_slope));
      }
    }
  }
  return rep;
}

}  // namespace rfim
