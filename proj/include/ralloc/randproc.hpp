#pragma once

// Single-unit availability process: arrivals at sigma_t; if the unit is free
// it becomes busy with probability p_t for a duration drawn from F.

#include <cmath>
#include <string>
#include <vector>

#include "distributions.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace ralloc {

struct ProcessSpec {
  UsageDistribution F;
  std::vector<double> times;
  std::vector<double> probs;
};

inline void check_spec(const ProcessSpec& s) {
  if (s.times.size() != s.probs.size()) throw InvalidArgument("times and probs differ in length");
  for (std::size_t t = 0; t < s.times.size(); ++t) {
    if (!std::isfinite(s.times[t])) throw InvalidArgument("process times must be finite");
    if (t > 0 && !(s.times[t] > s.times[t - 1])) throw InvalidArgument("process times must be strictly increasing");
    if (!(s.probs[t] >= 0 && s.probs[t] <= 1)) throw InvalidArgument("process probabilities must lie in [0,1]");
  }
}

struct FluidProcessResult {
  std::vector<double> eta;  // availability before each arrival
  double reward = 0;
};

// eta_t = eta_{t-1}(1 - p_{t-1}) + sum_{tau<t} eta_tau p_tau [F(s_t - s_tau) - F(s_{t-1} - s_tau)],
// where mass that left at tau = t-1 starts from 0 (so a zero-length use is back by the next arrival)
inline FluidProcessResult fluid_process(const ProcessSpec& s) {
  check_spec(s);
  const std::size_t T = s.times.size();
  FluidProcessResult out;
  out.eta.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    if (t == 0) {
      out.eta[0] = 1.0;
    } else {
      double e = out.eta[t - 1] * (1.0 - s.probs[t - 1]);
      for (std::size_t tau = 0; tau < t; ++tau) {
        double flow = out.eta[tau] * s.probs[tau];
        if (flow == 0) continue;
        double prev = tau + 1 == t ? 0.0 : s.F.cdf(s.times[t - 1] - s.times[tau]);
        e += flow * (s.F.cdf(s.times[t] - s.times[tau]) - prev);
      }
      out.eta[t] = e;
    }
    out.reward += s.probs[t] * out.eta[t];
  }
  return out;
}

struct ProcessSimResult {
  Summary reward;
  std::vector<double> availability;  // fraction of trials with the unit free at arrival t
};

inline ProcessSimResult simulate_process(const ProcessSpec& s, std::uint64_t seed, std::size_t trials) {
  check_spec(s);
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  const std::size_t T = s.times.size();
  std::vector<double> totals(trials, 0.0);
  std::vector<std::size_t> free_count(T, 0);
  for (std::size_t k = 0; k < trials; ++k) {
    StreamRng rng(seed, StreamPurpose::process, std::uint32_t(k), std::uint32_t(k >> 32));
    bool busy = false, dead = false;
    double tau = 0, dur = 0;
    double reward = 0;
    for (std::size_t t = 0; t < T; ++t) {
      if (busy && !dead && s.times[t] - tau >= dur) busy = false;
      double u_move = rng.uniform();
      double u1 = rng.uniform(), u2 = rng.uniform();
      if (busy) continue;
      ++free_count[t];
      if (u_move < s.probs[t]) {
        reward += 1;
        Duration d = s.F.from_uniforms(u1, u2);
        busy = true;
        tau = s.times[t];
        dead = d.is_infinite();
        dur = dead ? 0 : d.value();
      }
    }
    totals[k] = reward;
  }
  ProcessSimResult out;
  out.reward = summarize(totals, {});
  for (std::size_t t = 0; t < T; ++t) out.availability.push_back(double(free_count[t]) / double(trials));
  return out;
}

inline bool check_monotonicity(const UsageDistribution& F, const std::vector<double>& times,
                               const std::vector<double>& p_low, const std::vector<double>& p_high) {
  for (std::size_t t = 0; t < p_low.size() && t < p_high.size(); ++t)
    if (p_low[t] > p_high[t]) throw InvalidArgument("p_low must not exceed p_high");
  double lo = fluid_process({F, times, p_low}).reward;
  double hi = fluid_process({F, times, p_high}).reward;
  return lo <= hi + 1e-12;
}

inline bool check_zero_point_augmentation(const ProcessSpec& s) {
  auto base = fluid_process(s);
  ProcessSpec aug = s;
  for (std::size_t t = 0; t < s.times.size(); ++t)
    if (base.eta[t] <= 1e-12) aug.probs[t] = 1.0;
  auto again = fluid_process(aug);
  for (std::size_t t = 0; t < s.times.size(); ++t)
    if (std::abs(again.eta[t] - base.eta[t]) > 1e-10) return false;
  return true;
}

}  // namespace ralloc
