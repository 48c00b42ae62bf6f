#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace ralloc {

struct MeanSe {
  double mean = 0;
  double se = 0;
};

// two-pass mean and standard error; the order of xs fixes the result bit for bit
inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  double s = 0;
  for (double x : xs) s += x;
  out.mean = s / double(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / double(xs.size() - 1)) / std::sqrt(double(xs.size()));
  return out;
}

struct Summary {
  std::size_t trials = 0;
  double mean = 0;
  double se = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  std::vector<double> resource_mean;  // by resource position
  std::vector<double> resource_se;

  bool operator==(const Summary&) const = default;
};

// rows: per-trial totals; per_resource[r][k]: trial k's reward from resource r
inline Summary summarize(const std::vector<double>& totals,
                         const std::vector<std::vector<double>>& per_resource) {
  Summary s;
  s.trials = totals.size();
  auto m = mean_se(totals);
  s.mean = m.mean;
  s.se = m.se;
  s.ci_lo = m.mean - 1.96 * m.se;
  s.ci_hi = m.mean + 1.96 * m.se;
  for (const auto& col : per_resource) {
    auto r = mean_se(col);
    s.resource_mean.push_back(r.mean);
    s.resource_se.push_back(r.se);
  }
  return s;
}

}  // namespace ralloc
