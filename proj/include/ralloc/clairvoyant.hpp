#pragma once

// Expectimax over the offline DP for tiny instances: the arrival sequence is
// known, durations and choices are revealed as they happen.

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "choice_model.hpp"
#include "errors.hpp"
#include "model.hpp"

namespace ralloc {

namespace detail {

class ClairvoyantDp {
 public:
  explicit ClairvoyantDp(const IndexedInstance& p) : p_(p) {
    for (std::size_t r = 0; r < p.num_resources(); ++r) outcomes_.push_back(p.resource(r).usage.outcomes());
  }

  struct State {
    std::vector<int> avail;
    std::vector<std::vector<std::pair<double, double>>> busy;  // (match time, duration)
  };

  double solve() {
    State s;
    for (std::size_t r = 0; r < p_.num_resources(); ++r) {
      s.avail.push_back(p_.resource(r).capacity);
      s.busy.emplace_back();
    }
    return value(0, s);
  }

 private:
  std::string key(std::size_t t, const State& s) const {
    std::string k = std::to_string(t);
    for (std::size_t r = 0; r < s.avail.size(); ++r) {
      k += '|' + std::to_string(s.avail[r]);
      for (auto [tau, d] : s.busy[r]) {
        k += ',';
        k.append(reinterpret_cast<const char*>(&tau), sizeof tau);
        k.append(reinterpret_cast<const char*>(&d), sizeof d);
      }
    }
    return k;
  }

  // expected value of allocating m units of r at arrival t, continuing to t+1
  double after_allocation(std::size_t t, const State& s, std::size_t r, int m) {
    double total = 0;
    std::vector<std::size_t> pick(std::size_t(m), 0);
    const auto& outs = outcomes_[r];
    const double now = p_.time(t);
    while (true) {
      double prob = 1;
      State next = s;
      next.avail[r] -= m;
      for (int k = 0; k < m; ++k) {
        const auto& [d, pr] = outs[pick[std::size_t(k)]];
        prob *= pr;
        if (d.is_finite()) next.busy[r].emplace_back(now, d.value());
      }
      std::sort(next.busy[r].begin(), next.busy[r].end());
      total += prob * value(t + 1, next);
      int k = 0;
      for (; k < m; ++k) {
        if (++pick[std::size_t(k)] < outs.size()) break;
        pick[std::size_t(k)] = 0;
      }
      if (k == m) break;
    }
    return p_.resource(r).reward * m + total;
  }

  double value(std::size_t t, State s) {
    if (t >= p_.num_arrivals()) return 0.0;
    const double now = p_.time(t);
    for (std::size_t r = 0; r < s.avail.size(); ++r) {
      auto& b = s.busy[r];
      auto it = std::remove_if(b.begin(), b.end(), [&](auto& e) { return now - e.first >= e.second; });
      s.avail[r] += int(b.end() - it);
      b.erase(it, b.end());
    }
    const std::string k = key(t, s);
    if (auto hit = memo_.find(k); hit != memo_.end()) return hit->second;

    double best = value(t + 1, s);
    const auto& edges = p_.edges(t);
    if (p_.mode() != Mode::assortment) {
      for (const auto& e : edges) {
        if (s.avail[e.resource] < 1) continue;
        int m = p_.mode() == Mode::matching ? 1 : std::min(e.bid, s.avail[e.resource]);
        best = std::max(best, after_allocation(t, s, e.resource, m));
      }
    } else {
      const auto& req = std::get<AssortmentRequest>(p_.arrival(t).demand);
      const auto& model = p_.instance().choice_models[std::size_t(req.choice_model)];
      std::vector<const Edge*> offerable;
      for (const auto& e : edges)
        if (s.avail[e.resource] >= 1) offerable.push_back(&e);
      const double skip = best;
      for (std::uint32_t mask = 1; mask < (1u << offerable.size()); ++mask) {
        std::vector<int> ids;
        for (std::size_t j = 0; j < offerable.size(); ++j)
          if (mask >> j & 1u) ids.push_back(p_.resource(offerable[j]->resource).id);
        if (!is_feasible(req.feasible, ids)) continue;
        double v = 0, none = 1;
        for (std::size_t j = 0; j < offerable.size(); ++j) {
          if (!(mask >> j & 1u)) continue;
          const Edge& e = *offerable[j];
          double ph = choice_prob(model, ids, p_.resource(e.resource).id);
          if (ph <= 0) continue;
          none -= ph;
          v += ph * after_allocation(t, s, e.resource, std::min(e.bid, s.avail[e.resource]));
        }
        v += std::max(none, 0.0) * skip;
        best = std::max(best, v);
      }
    }
    memo_.emplace(k, best);
    return best;
  }

  const IndexedInstance& p_;
  std::vector<std::vector<std::pair<Duration, double>>> outcomes_;
  std::map<std::string, double> memo_;
};

}  // namespace detail

struct ClairvoyantLimits {
  std::size_t max_arrivals = 8;
  int max_total_capacity = 6;
};

inline double brute_force_clairvoyant(const IndexedInstance& p, ClairvoyantLimits lim = {}) {
  if (p.num_arrivals() > lim.max_arrivals) throw TooLarge("brute force needs at most 8 arrivals");
  int total = 0;
  for (std::size_t r = 0; r < p.num_resources(); ++r) {
    total += p.resource(r).capacity;
    if (!p.resource(r).usage.has_finite_support())
      throw TooLarge("brute force needs finite-support durations");
  }
  if (total > lim.max_total_capacity) throw TooLarge("brute force needs total capacity at most 6");
  return detail::ClairvoyantDp(p).solve();
}

}  // namespace ralloc
