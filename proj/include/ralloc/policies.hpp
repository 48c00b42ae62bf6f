#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "engine.hpp"
#include "fluid_guide.hpp"
#include "model.hpp"

namespace ralloc {

// argmax r_i over available i in S_t, ties to the lower id
inline std::optional<std::size_t> greedy_decide(const IndexedInstance& p, std::size_t t, const Inventory& inv) {
  std::optional<std::size_t> best;
  double best_r = 0;
  for (const auto& e : p.edges(t)) {
    if (inv.available(e.resource) < 1) continue;
    double r = p.resource(e.resource).reward;
    if (!best || r > best_r) {
      best = e.resource;
      best_r = r;
    }
  }
  return best;
}

// argmax r_i (1 - exp(-y_i / c_i)) over available i in S_t
inline std::optional<std::size_t> balance_decide(const IndexedInstance& p, std::size_t t, const Inventory& inv) {
  std::optional<std::size_t> best;
  double best_s = 0;
  for (const auto& e : p.edges(t)) {
    int y = inv.available(e.resource);
    if (y < 1) continue;
    const auto& res = p.resource(e.resource);
    double s = reduced_price(res.reward, y, res.capacity);
    if (!best || s > best_s) {
      best = e.resource;
      best_s = s;
    }
  }
  return best;
}

// reduced price on the highest available unit; returns (resource, unit rank)
inline std::optional<std::pair<std::size_t, int>> rba_decide(const IndexedInstance& p, std::size_t t,
                                                             const Inventory& inv) {
  std::optional<std::pair<std::size_t, int>> best;
  double best_s = 0;
  for (const auto& e : p.edges(t)) {
    int z = inv.top(e.resource);
    if (z < 1) continue;
    const auto& res = p.resource(e.resource);
    double s = reduced_price(res.reward, z, res.capacity);
    if (!best || s > best_s) {
      best = {e.resource, z};
      best_s = s;
    }
  }
  return best;
}

// sum of reduced prices over the top min(b, avail) available units
inline double rba_budget_score(const IndexedInstance& p, std::size_t r, int b, const Inventory& inv) {
  const auto& res = p.resource(r);
  double s = 0;
  int k = 0;
  for (int z = inv.top(r); z > 0 && k < b; z = inv.next_below(r, z), ++k)
    s += reduced_price(res.reward, z, res.capacity);
  return s;
}

inline std::optional<std::pair<std::size_t, std::vector<int>>> rba_budgeted_decide(const IndexedInstance& p,
                                                                                   std::size_t t,
                                                                                   const Inventory& inv) {
  std::optional<std::size_t> best;
  double best_s = 0;
  for (const auto& e : p.edges(t)) {
    if (e.bid < 1 || inv.available(e.resource) < 1) continue;
    double s = rba_budget_score(p, e.resource, e.bid, inv);
    if (!best || s > best_s) {
      best = e.resource;
      best_s = s;
    }
  }
  if (!best) return std::nullopt;
  int b = p.bid(t, *best);
  return std::make_pair(*best, inv.top_units(*best, std::min(b, inv.available(*best))));
}

struct Greedy {
  Decision decide(const ArrivalContext& c) const {
    auto r = greedy_decide(c.problem, c.t, c.inventory);
    if (!r) return NoAction{};
    return Allocate{*r, {c.inventory.top(*r)}};
  }
};

struct Balance {
  Decision decide(const ArrivalContext& c) const {
    auto r = balance_decide(c.problem, c.t, c.inventory);
    if (!r) return NoAction{};
    return Allocate{*r, {c.inventory.top(*r)}};
  }
};

struct Rba {
  Decision decide(const ArrivalContext& c) const {
    auto r = rba_decide(c.problem, c.t, c.inventory);
    if (!r) return NoAction{};
    return Allocate{r->first, {r->second}};
  }
};

struct RbaBudgeted {
  Decision decide(const ArrivalContext& c) const {
    auto r = rba_budgeted_decide(c.problem, c.t, c.inventory);
    if (!r) return NoAction{};
    return Allocate{r->first, std::move(r->second)};
  }
};

// sqrt(2 ln c / c), taken as 0 when ln c <= 0
inline double salg_delta(double c) {
  double l = std::log(c);
  return l > 0 ? std::sqrt(2.0 * l / c) : 0.0;
}

enum class SampleOutcome { none, matched, blocked };

struct SalgChoice {
  SampleOutcome outcome = SampleOutcome::none;
  std::size_t resource = 0;
};

// x: (resource, x_it) in ascending id order; intervals laid out in that order
inline SalgChoice salg_decide(const IndexedInstance& p, const std::vector<std::pair<std::size_t, double>>& x,
                              const Inventory& inv, StreamRng& rng) {
  double u = rng.uniform(), acc = 0;
  for (auto [r, xv] : x) {
    acc += xv / (1.0 + salg_delta(p.resource(r).capacity));
    if (u < acc) return {inv.available(r) > 0 ? SampleOutcome::matched : SampleOutcome::blocked, r};
  }
  return {};
}

// Samples from a precomputed fluid guide. The guide never looks at realized
// durations, so one run serves every trial.
class Salg {
 public:
  explicit Salg(const IndexedInstance& p, GuideOptions opt = {})
      : guide_(std::make_shared<const GuideRun>(run_guide(p, opt))) {}
  explicit Salg(std::shared_ptr<const GuideRun> guide) : guide_(std::move(guide)) {}

  const GuideRun& guide() const { return *guide_; }

  Decision decide(const ArrivalContext& c) const {
    auto ch = salg_decide(c.problem, guide_->steps[c.t].x, c.inventory, c.rng);
    switch (ch.outcome) {
      case SampleOutcome::matched: return Allocate{ch.resource, {c.inventory.top(ch.resource)}};
      case SampleOutcome::blocked: return Blocked{ch.resource};
      default: return NoAction{};
    }
  }

 private:
  std::shared_ptr<const GuideRun> guide_;
};

}  // namespace ralloc
