#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "choice_model.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "fluid_guide.hpp"
#include "model.hpp"
#include "policies.hpp"

namespace ralloc {

struct WeightedAssortment {
  std::vector<int> set;  // sorted ids
  double weight;
};
using WeightedAssortmentCollection = std::vector<WeightedAssortment>;

namespace detail {

inline void check_targets(const ChoiceModel& model, const std::vector<int>& S, const std::vector<double>& p) {
  if (p.size() != S.size()) throw InvalidArgument("one target per item is required");
  for (std::size_t k = 0; k < S.size(); ++k) {
    double phi = choice_prob(model, S, S[k]);
    if (p[k] < 0 || p[k] > phi * (1 + 1e-12) + 1e-15)
      throw TargetTooLarge("target for item " + std::to_string(S[k]) + " exceeds its choice probability");
  }
}

inline constexpr double kWeightFloor = 1e-14;

}  // namespace detail

// Nested collection reproducing per-item choice targets. S holds distinct
// ids, p[k] is the target for S[k]. Works for any weakly substituting model.
inline WeightedAssortmentCollection probability_match_generic(const ChoiceModel& model, std::vector<int> S,
                                                              std::vector<double> p) {
  detail::check_targets(model, S, p);
  {  // sort by id, keeping targets aligned
    std::vector<std::size_t> idx(S.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return S[a] < S[b]; });
    std::vector<int> s2;
    std::vector<double> p2;
    for (auto i : idx) {
      s2.push_back(S[i]);
      p2.push_back(p[i]);
    }
    S = std::move(s2);
    p = std::move(p2);
  }
  WeightedAssortmentCollection out;
  while (!S.empty()) {
    std::vector<double> phi(S.size());
    std::size_t star = 0;
    double zmin = 0;
    for (std::size_t k = 0; k < S.size(); ++k) {
      phi[k] = choice_prob(model, S, S[k]);
      double z = phi[k] > 0 ? std::max(p[k], 0.0) / phi[k] : 0.0;
      if (k == 0 || z < zmin) {
        zmin = z;
        star = k;
      }
    }
    if (zmin > detail::kWeightFloor) out.push_back({S, zmin});
    for (std::size_t k = 0; k < S.size(); ++k) p[k] -= zmin * phi[k];
    S.erase(S.begin() + std::ptrdiff_t(star));
    p.erase(p.begin() + std::ptrdiff_t(star));
  }
  return out;
}

// MNL closed form: the removal order is ascending p_s / v_s, fixed up front.
inline WeightedAssortmentCollection probability_match_mnl(const Mnl& m, std::vector<int> S, std::vector<double> p) {
  detail::check_targets(ChoiceModel(m), S, p);
  const std::size_t n = S.size();
  std::vector<double> rho(n), v(n);
  double V = m.v0;
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = m.weight(S[k]);
    rho[k] = v[k] > 0 ? std::max(p[k], 0.0) / v[k] : 0.0;
    V += v[k];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (rho[a] != rho[b]) return rho[a] < rho[b];
    return S[a] < S[b];
  });
  std::vector<int> current = S;
  std::sort(current.begin(), current.end());
  WeightedAssortmentCollection out;
  double spent = 0;  // sum_k u_k / V_k
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t k = order[j];
    double u = V > 0 ? V * (rho[k] - spent) : 0.0;
    if (u < 0) u = 0;
    if (u > detail::kWeightFloor) out.push_back({current, u});
    if (V > 0) spent += u / V;
    V -= v[k];
    current.erase(std::lower_bound(current.begin(), current.end(), S[k]));
  }
  return out;
}

inline WeightedAssortmentCollection probability_match(const ChoiceModel& model, const std::vector<int>& S,
                                                      const std::vector<double>& p) {
  if (auto m = std::get_if<Mnl>(&model)) return probability_match_mnl(*m, S, p);
  return probability_match_generic(model, S, p);
}

struct MatchCheck {
  bool nested = true;
  double weight_sum = 0;
  double max_target_error = 0;
  bool subsets_of_S = true;
};

inline MatchCheck check_probability_match(const ChoiceModel& model, const std::vector<int>& S,
                                          const std::vector<double>& p, const WeightedAssortmentCollection& col) {
  MatchCheck c;
  std::vector<int> sorted_s = S;
  std::sort(sorted_s.begin(), sorted_s.end());
  for (std::size_t j = 0; j < col.size(); ++j) {
    c.weight_sum += col[j].weight;
    if (!std::includes(sorted_s.begin(), sorted_s.end(), col[j].set.begin(), col[j].set.end())) c.subsets_of_S = false;
    if (j > 0 && !std::includes(col[j - 1].set.begin(), col[j - 1].set.end(), col[j].set.begin(), col[j].set.end()))
      c.nested = false;
  }
  for (std::size_t k = 0; k < S.size(); ++k) {
    double got = 0;
    for (const auto& a : col)
      if (std::binary_search(a.set.begin(), a.set.end(), S[k])) got += a.weight * choice_prob(model, a.set, S[k]);
    c.max_target_error = std::max(c.max_target_error, std::abs(got - p[k]));
  }
  return c;
}

// sum_{i in S} w_i phi(S, i)
inline double assortment_value(const ChoiceModel& model, const std::vector<int>& S, const std::map<int, double>& w) {
  double v = 0;
  for (int i : S) {
    auto it = w.find(i);
    if (it != w.end() && it->second != 0) v += it->second * choice_prob(model, S, i);
  }
  return v;
}

namespace detail {

inline double mnl_value(const Mnl& m, const std::vector<std::pair<int, double>>& items) {
  double num = 0, den = m.v0;
  for (auto [id, w] : items) {
    double v = m.weight(id);
    num += w * v;
    den += v;
  }
  return den > 0 ? num / den : 0.0;
}

inline std::vector<int> ids_of(const std::vector<std::pair<int, double>>& items) {
  std::vector<int> out;
  for (auto& it : items) out.push_back(it.first);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Best offer for values w (id -> w_i >= 0) under the feasible family. Items
// that cannot add value (w <= 0, or zero MNL weight) are never offered.
inline std::vector<int> assortment_oracle(const ChoiceModel& model, const FeasibleSetSpec& feasible,
                                          const std::map<int, double>& w) {
  if (auto cardinality = std::get_if<MaxCardinality>(&feasible); cardinality && cardinality->k <= 0) return {};
  if (auto lst = std::get_if<ExplicitList>(&feasible)) {
    std::vector<int> best;
    double best_v = 0;
    for (auto s : lst->sets) {
      std::sort(s.begin(), s.end());
      bool ok = true;
      for (int id : s) {
        auto it = w.find(id);
        if (it == w.end()) ok = false;
      }
      if (!ok) continue;
      double v = assortment_value(model, s, w);
      if (v > best_v || (v == best_v && v > 0 && (s.size() < best.size() || (s.size() == best.size() && s < best)))) {
        best_v = v;
        best = s;
      }
    }
    return best;
  }
  if (auto m = std::get_if<Mnl>(&model)) {
    std::vector<std::pair<int, double>> items;
    for (auto [id, wi] : w)
      if (wi > 0 && m->weight(id) > 0) items.emplace_back(id, wi);
    std::stable_sort(items.begin(), items.end(), [](auto& a, auto& b) { return a.second > b.second; });
    if (std::holds_alternative<AllSubsets>(feasible)) {
      std::size_t best_k = 0;
      double best_v = 0;
      std::vector<std::pair<int, double>> prefix;
      for (std::size_t k = 0; k < items.size(); ++k) {
        prefix.push_back(items[k]);
        double v = detail::mnl_value(*m, prefix);
        if (v > best_v) {
          best_v = v;
          best_k = k + 1;
        }
      }
      return detail::ids_of({items.begin(), items.begin() + std::ptrdiff_t(best_k)});
    }
    // cardinality bound: parametric search over z, top-k by v_i (w_i - z)
    const std::size_t k = std::size_t(std::get<MaxCardinality>(feasible).k);
    std::vector<std::pair<int, double>> S;
    double z = 0;
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<std::pair<double, std::size_t>> score;
      for (std::size_t i = 0; i < items.size(); ++i) {
        double s = m->weight(items[i].first) * (items[i].second - z);
        if (s > 0) score.emplace_back(s, i);
      }
      std::stable_sort(score.begin(), score.end(), [](auto& a, auto& b) { return a.first > b.first; });
      std::vector<std::pair<int, double>> next;
      for (std::size_t j = 0; j < score.size() && j < k; ++j) next.push_back(items[score[j].second]);
      double v = detail::mnl_value(*m, next);
      if (v <= z * (1 + 1e-15) + 1e-300) break;
      S = std::move(next);
      z = v;
    }
    return detail::ids_of(S);
  }
  // explicit table: exhaustive over subsets of the positive-value items
  std::vector<int> items;
  for (auto [id, wi] : w)
    if (wi > 0) items.push_back(id);
  if (items.size() > 20) throw TooLarge("table oracle limited to 20 items");
  std::vector<int> best;
  double best_v = 0;
  const std::uint32_t full = (1u << items.size());
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    std::vector<int> s;
    for (std::size_t b = 0; b < items.size(); ++b)
      if (mask >> b & 1u) s.push_back(items[b]);
    if (!is_feasible(feasible, s)) continue;
    double v = assortment_value(model, s, w);
    if (v > best_v || (v == best_v && v > 0 && s.size() < best.size())) {
      best_v = v;
      best = s;
    }
  }
  return best;
}

// ---- fluid guide over assortments ----

struct AssortmentStep {
  WeightedAssortmentCollection collection;       // (A(eta,t), u(eta,t))
  std::vector<std::pair<std::size_t, double>> x; // (resource, fluid units consumed), ascending id
  std::vector<UnitAllocation> units;
  int iterations = 0;
};

struct AssortmentGuideRun {
  std::vector<AssortmentStep> steps;
  double total_reward = 0;
  std::vector<double> resource_reward;
  double max_conservation_error = 0;
};

class AssortmentGuide {
 public:
  explicit AssortmentGuide(const IndexedInstance& p) : p_(&p), inv_(p) {
    if (p.mode() != Mode::assortment) throw UnsupportedMode("assortment guide needs assortment mode");
    for (std::size_t r = 0; r < p.num_resources(); ++r) cap_total_ += std::size_t(p.resource(r).capacity);
  }

  const FluidInventory& inventory() const { return inv_; }

  AssortmentStep step() {
    const std::size_t t = t_++;
    const double now = p_->time(t);
    inv_.advance_to(now);
    const auto& req = std::get<AssortmentRequest>(p_->arrival(t).demand);
    const ChoiceModel& model = p_->instance().choice_models[std::size_t(req.choice_model)];
    const auto& edges = p_->edges(t);
    AssortmentStep out;
    std::vector<double> used(edges.size(), 0.0);
    double eta = 0;
    const std::size_t cap = cap_total_ + edges.size() + 1;
    while (1.0 - eta > kFluidTol && std::size_t(out.iterations) < cap) {
      std::map<int, double> w;
      std::map<int, std::pair<std::size_t, int>> where;  // id -> (edge index, slot)
      for (std::size_t e = 0; e < edges.size(); ++e) {
        std::size_t r = edges[e].resource;
        int s = inv_.top_slot(r, kFluidTol);
        if (s < 0) continue;
        const auto& res = p_->resource(r);
        w[res.id] = edges[e].bid * reduced_price(res.reward, inv_.slot(r, std::size_t(s)).rank, res.capacity);
        where[res.id] = {e, s};
      }
      std::vector<int> A = assortment_oracle(model, req.feasible, w);
      std::vector<int> kept;
      for (int id : A)
        if (choice_prob(model, A, id) > 0) kept.push_back(id);
      A = std::move(kept);
      if (A.empty()) break;
      ++out.iterations;
      double u = 1.0 - eta;
      std::vector<double> phi(A.size());
      for (std::size_t k = 0; k < A.size(); ++k) {
        auto [e, s] = where[A[k]];
        phi[k] = choice_prob(model, A, A[k]);
        double y = inv_.slot(edges[e].resource, std::size_t(s)).Y;
        u = std::min(u, y / (edges[e].bid * phi[k]));
      }
      for (std::size_t k = 0; k < A.size(); ++k) {
        auto [e, s] = where[A[k]];
        std::size_t r = edges[e].resource;
        double amt = u * edges[e].bid * phi[k];
        const auto& sl = inv_.slot(r, std::size_t(s));
        if (sl.Y - amt <= kFluidTol) amt = sl.Y;  // the limiting unit runs dry
        int rank = sl.rank;
        inv_.consume(r, std::size_t(s), amt, now);
        used[e] += amt;
        out.units.push_back({r, rank, amt});
      }
      out.collection.push_back({A, u});
      if (1.0 - eta - u <= kFluidTol) eta = 1.0; else eta += u;
    }
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (used[e] > 0) out.x.emplace_back(edges[e].resource, used[e]);
    return out;
  }

 private:
  const IndexedInstance* p_;
  FluidInventory inv_;
  std::size_t t_ = 0;
  std::size_t cap_total_ = 0;
};

inline AssortmentGuideRun run_assortment_guide(const IndexedInstance& p, bool check_conservation = false) {
  AssortmentGuide g(p);
  AssortmentGuideRun run;
  run.resource_reward.assign(p.num_resources(), 0.0);
  for (std::size_t t = 0; t < p.num_arrivals(); ++t) {
    run.steps.push_back(g.step());
    for (auto [r, x] : run.steps.back().x) run.resource_reward[r] += p.resource(r).reward * x;
    if (check_conservation)
      run.max_conservation_error = std::max(run.max_conservation_error, g.inventory().conservation_error());
  }
  for (double v : run.resource_reward) run.total_reward += v;
  return run;
}

// Samples a guide collection, keeps the items with at least b_it units free,
// and re-matches their choice probabilities (scaled by 1/(1+delta)).
class Astalg {
 public:
  Astalg(const IndexedInstance& p, std::optional<double> gamma_hat = std::nullopt)
      : guide_(std::make_shared<const AssortmentGuideRun>(run_assortment_guide(p))) {
    double g = gamma_hat ? *gamma_hat : gamma(p.instance());
    delta_ = salg_delta(g);
  }

  double delta() const { return delta_; }
  const AssortmentGuideRun& guide() const { return *guide_; }

  Decision decide(const ArrivalContext& c) const {
    const auto& step = guide_->steps[c.t];
    double u = c.rng.uniform(), acc = 0;
    const WeightedAssortment* pick = nullptr;
    for (const auto& a : step.collection) {
      acc += a.weight;
      if (u < acc) {
        pick = &a;
        break;
      }
    }
    if (!pick) return Offer{};
    const auto& inst = c.problem.instance();
    const auto& req = std::get<AssortmentRequest>(c.problem.arrival(c.t).demand);
    const ChoiceModel& model = inst.choice_models[std::size_t(req.choice_model)];
    std::vector<int> S;
    std::vector<double> target;
    for (int id : pick->set) {
      std::size_t r = std::size_t(inst.position_of(id));
      int b = c.problem.bid(c.t, r);
      if (c.inventory.available(r) >= b) {
        S.push_back(id);
        target.push_back(choice_prob(model, pick->set, id) / (1.0 + delta_));
      }
    }
    if (S.empty()) return Offer{};
    auto col = probability_match(model, S, target);
    double u2 = c.rng.uniform();
    acc = 0;
    for (const auto& a : col) {
      acc += a.weight;
      if (u2 < acc) {
        Offer o;
        for (int id : a.set) o.items.push_back(std::size_t(inst.position_of(id)));
        return o;
      }
    }
    return Offer{};
  }

 private:
  std::shared_ptr<const AssortmentGuideRun> guide_;
  double delta_ = 0;
};

// RBA for assortments: item value b-unit reduced price sum, then the oracle
struct RbaAssortment {
  Decision decide(const ArrivalContext& c) const {
    const auto& inst = c.problem.instance();
    const auto& req = std::get<AssortmentRequest>(c.problem.arrival(c.t).demand);
    std::map<int, double> w;
    for (const auto& e : c.problem.edges(c.t)) {
      if (c.inventory.available(e.resource) < 1) continue;
      w[c.problem.resource(e.resource).id] = rba_budget_score(c.problem, e.resource, e.bid, c.inventory);
    }
    auto A = assortment_oracle(inst.choice_models[std::size_t(req.choice_model)], req.feasible, w);
    Offer o;
    for (int id : A) o.items.push_back(std::size_t(inst.position_of(id)));
    return o;
  }
};

}  // namespace ralloc
