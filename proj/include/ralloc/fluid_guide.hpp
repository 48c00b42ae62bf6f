#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace ralloc {

inline constexpr double kFluidTol = 1e-12;

inline double reduced_price(double reward, double rank, double capacity) {
  return reward * -std::expm1(-rank / capacity);
}

// Fluid inventory: every resource is a column of slots. A slot is one unit
// (exact layout) or a bucket of units sharing one rank (quantized layout).
// Matched mass comes back continuously along the usage CDF.
class FluidInventory {
 public:
  enum class Layout { exact, quantized };

  struct Entry {
    double tau;   // match time
    double mass;
    double prev;  // cdf value already credited back
  };
  struct Slot {
    int rank;      // price rank
    double cap;    // number of units it stands for
    double Y;      // available fluid
    double dead = 0;
    std::vector<Entry> entries;
  };

  FluidInventory(const IndexedInstance& p, Layout layout = Layout::exact, double eps = 0)
      : problem_(&p) {
    const std::size_t n = p.num_resources();
    slots_.resize(n);
    hint_.assign(n, -1);
    for (std::size_t r = 0; r < n; ++r) {
      const int c = p.resource(r).capacity;
      if (layout == Layout::exact) {
        for (int k = 1; k <= c; ++k) slots_[r].push_back({k, 1.0, 1.0, 0, {}});
      } else {
        auto lv = quantized_levels(c, eps);
        for (std::size_t j = 0; j < lv.size(); ++j) {
          int hi = j + 1 < lv.size() ? lv[j + 1] - 1 : c;
          double m = double(hi - lv[j] + 1);
          slots_[r].push_back({lv[j], m, m, 0, {}});
        }
      }
      hint_[r] = int(slots_[r].size()) - 1;
    }
  }

  // distinct values floor((1+eps)^j) for j = 0.. while <= c
  static std::vector<int> quantized_levels(int c, double eps) {
    if (!(eps > 0)) throw InvalidArgument("quantization eps must be positive");
    std::vector<int> lv{1};
    const double lg = std::log1p(eps);
    while (true) {
      double target = std::log(double(lv.back()) + 1.0) / lg;
      double j = std::ceil(target - 1e-9);
      double v = std::floor(std::exp(j * lg) * (1 + 1e-14));
      if (v <= lv.back()) v = lv.back() + 1;  // rounding guard
      if (v > c) break;
      lv.push_back(int(v));
    }
    return lv;
  }

  std::size_t num_slots(std::size_t r) const { return slots_[r].size(); }
  const Slot& slot(std::size_t r, std::size_t s) const { return slots_[r][s]; }

  // credit returns for all mass matched before `now`
  void advance_to(double now) {
    for (std::size_t r = 0; r < slots_.size(); ++r) {
      const UsageDistribution& F = problem_->resource(r).usage;
      const double fin = F.finite_mass();
      for (std::size_t s = 0; s < slots_[r].size(); ++s) {
        Slot& sl = slots_[r][s];
        if (sl.entries.empty()) continue;
        double before = sl.Y;
        std::size_t keep = 0;
        for (auto& e : sl.entries) {
          double f = F.cdf(now - e.tau);
          if (f > e.prev) {
            sl.Y += (f - e.prev) * e.mass;
            e.prev = f;
          }
          if (fin - e.prev <= 1e-15) {  // finite part is home; the rest never returns
            sl.Y += (fin - e.prev) * e.mass;
            sl.dead += (1.0 - fin) * e.mass;
          } else {
            sl.entries[keep++] = e;
          }
        }
        sl.entries.resize(keep);
        if (sl.Y > sl.cap) sl.Y = sl.cap;
        if (sl.Y > before && int(s) > hint_[r]) hint_[r] = int(s);
      }
    }
  }

  // highest slot of r whose available fluid exceeds `thr` (or reaches it when inclusive)
  int top_slot(std::size_t r, double thr, bool inclusive = false) const {
    int s = std::min<int>(hint_[r], int(slots_[r].size()) - 1);
    for (; s >= 0; --s) {
      double y = slots_[r][std::size_t(s)].Y;
      if (inclusive ? y >= thr : y > thr) break;
    }
    // every slot above s is below kFluidTol only when thr >= kFluidTol
    if (thr >= kFluidTol) hint_[r] = s;
    return s;
  }

  // take `amount` out of slot s of r at time `now`
  void consume(std::size_t r, std::size_t s, double amount, double now) {
    Slot& sl = slots_[r][s];
    amount = std::min(amount, sl.Y);
    if (amount <= 0) return;
    sl.Y -= amount;
    if (sl.Y < 0) sl.Y = 0;
    const UsageDistribution& F = problem_->resource(r).usage;
    if (F.finite_mass() == 0.0) {
      sl.dead += amount;
    } else {
      sl.entries.push_back({now, amount, 0.0});
    }
  }

  // Seed a state by hand: the removed fluid is booked as dead mass.
  void set_available(std::size_t r, std::size_t s, double y) {
    Slot& sl = slots_[r][s];
    if (!(y >= 0 && y <= sl.Y)) throw InvalidArgument("can only lower available fluid");
    sl.dead += sl.Y - y;
    sl.Y = y;
  }

  // max over slots of |Y + outstanding + dead - cap| / cap
  double conservation_error() const {
    double worst = 0;
    for (const auto& col : slots_)
      for (const auto& sl : col) {
        double out = 0;
        for (const auto& e : sl.entries) out += e.mass * (1.0 - e.prev);
        worst = std::max(worst, std::abs(sl.Y + out + sl.dead - sl.cap) / sl.cap);
      }
    return worst;
  }

 private:
  const IndexedInstance* problem_;
  std::vector<std::vector<Slot>> slots_;
  mutable std::vector<int> hint_;
};

enum class GuideVariant { exact, quantized, threshold };

struct GuideOptions {
  GuideVariant variant = GuideVariant::exact;
  double eps = 0;  // quantization step or availability threshold
};

struct UnitAllocation {
  std::size_t resource;
  int rank;  // slot price rank
  double amount;
};

struct GuideStep {
  std::vector<UnitAllocation> units;
  std::vector<std::pair<std::size_t, double>> x;  // (resource, x_it), ascending id, x > 0
  int iterations = 0;
};

// Fluid guide for matching mode; one call to step() per arrival, in order.
class FluidGuide {
 public:
  FluidGuide(const IndexedInstance& p, GuideOptions opt = {})
      : p_(&p),
        opt_(opt),
        inv_(p, opt.variant == GuideVariant::quantized ? FluidInventory::Layout::quantized
                                                       : FluidInventory::Layout::exact,
             opt.eps) {
    if (p.mode() != Mode::matching) throw UnsupportedMode("fluid guide needs matching mode");
    if (opt.variant == GuideVariant::threshold && !(opt.eps > 0 && opt.eps < 1))
      throw InvalidArgument("threshold eps must be in (0,1)");
    for (std::size_t r = 0; r < p.num_resources(); ++r) cap_total_ += std::size_t(p.resource(r).capacity);
  }

  std::size_t next_arrival() const { return t_; }
  const FluidInventory& inventory() const { return inv_; }
  FluidInventory& inventory() { return inv_; }

  GuideStep step() {
    if (t_ >= p_->num_arrivals()) throw InvalidArgument("no arrivals left");
    const std::size_t t = t_++;
    const double now = p_->time(t);
    inv_.advance_to(now);
    const bool thresh = opt_.variant == GuideVariant::threshold;
    const double thr = thresh ? opt_.eps : kFluidTol;

    GuideStep out;
    double eta = 0;
    const auto& edges = p_->edges(t);
    std::vector<double> x(edges.size(), 0.0);
    const std::size_t cap = cap_total_ + edges.size() + 1;
    while (1.0 - eta > kFluidTol && std::size_t(out.iterations) < cap) {
      int best = -1, best_slot = -1;
      double best_score = -1;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        std::size_t r = edges[e].resource;
        int s = inv_.top_slot(r, thr, thresh);
        if (s < 0) continue;
        const auto& res = p_->resource(r);
        double score = reduced_price(res.reward, inv_.slot(r, std::size_t(s)).rank, res.capacity);
        if (score > best_score) {
          best_score = score;
          best = int(e);
          best_slot = s;
        }
      }
      if (best < 0) break;
      ++out.iterations;
      std::size_t r = edges[std::size_t(best)].resource;
      const auto& sl = inv_.slot(r, std::size_t(best_slot));
      double amt = std::min(sl.Y, 1.0 - eta);
      int rank = sl.rank;
      inv_.consume(r, std::size_t(best_slot), amt, now);
      if (1.0 - eta - amt <= kFluidTol) eta = 1.0; else eta += amt;
      x[std::size_t(best)] += amt;
      out.units.push_back({r, rank, amt});
    }
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (x[e] > 0) out.x.emplace_back(edges[e].resource, x[e]);
    return out;
  }

 private:
  const IndexedInstance* p_;
  GuideOptions opt_;
  FluidInventory inv_;
  std::size_t t_ = 0;
  std::size_t cap_total_ = 0;
};

struct GuideRun {
  std::vector<GuideStep> steps;
  double total_reward = 0;
  std::vector<double> resource_reward;  // by position
  double max_conservation_error = 0;
};

inline GuideRun run_guide(const IndexedInstance& p, GuideOptions opt = {}, bool check_conservation = false) {
  FluidGuide g(p, opt);
  GuideRun run;
  run.resource_reward.assign(p.num_resources(), 0.0);
  run.steps.reserve(p.num_arrivals());
  for (std::size_t t = 0; t < p.num_arrivals(); ++t) {
    run.steps.push_back(g.step());
    for (auto [r, x] : run.steps.back().x) run.resource_reward[r] += p.resource(r).reward * x;
    if (check_conservation)
      run.max_conservation_error = std::max(run.max_conservation_error, g.inventory().conservation_error());
  }
  for (double v : run.resource_reward) run.total_reward += v;
  return run;
}

inline GuideRun run_galg(const IndexedInstance& p) { return run_guide(p); }

}  // namespace ralloc
