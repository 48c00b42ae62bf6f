#pragma once

// Canonical instances, the stochastic-rewards conversion and seeded random batteries.

#include <cmath>
#include <string>
#include <vector>

#include "engine.hpp"
#include "errors.hpp"
#include "json_io.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace ralloc {

// 2n arrivals at 0 to resource 1, n at 2,4,..,2n to both, n at 2n+2 to resource 2.
// with_dummies adds one NonReusable unit per arrival priced max{0, 1/(1-1/e) - delta}.
inline Instance example_a1(int n, bool with_dummies = false, double delta = 0.01) {
  if (n < 1) throw InvalidArgument("example_a1 needs n >= 1");
  Instance inst;
  inst.mode = Mode::matching;
  const UsageDistribution F = TwoPointInf{1.0, 0.5};
  inst.resources = {{1, n, 1.0, F}, {2, n, 1.0, F}};
  auto add = [&](double time, std::vector<int> edges) {
    inst.arrivals.push_back({int(inst.arrivals.size()), time, MatchingEdges{std::move(edges)}});
  };
  for (int k = 0; k < 2 * n; ++k) add(0.0, {1});
  for (int k = 1; k <= n; ++k) add(2.0 * k, {1, 2});
  for (int k = 0; k < n; ++k) add(2.0 * n + 2.0, {2});
  if (with_dummies) {
    const double price = std::max(0.0, 1.0 / (1.0 - std::exp(-1.0)) - delta);
    for (auto& a : inst.arrivals) {
      int id = 3 + a.index;
      inst.resources.push_back({id, 1, price, NonReusable{}});
      std::get<MatchingEdges>(a.demand).resources.push_back(id);
    }
  }
  return inst;
}

// r=(1,2), both Exponential{mu}; n-1 arrivals at 0 to resource 2, then t0 at time 1 to both
inline Instance example_a2(int n, double mu) {
  if (n < 2) throw InvalidArgument("example_a2 needs n >= 2");
  if (!(mu > 0)) throw InvalidArgument("example_a2 needs mu > 0");
  Instance inst;
  inst.mode = Mode::matching;
  inst.resources = {{1, n, 1.0, Exponential{mu}}, {2, n, 2.0, Exponential{mu}}};
  for (int k = 0; k < n - 1; ++k) inst.arrivals.push_back({k, 0.0, MatchingEdges{{2}}});
  inst.arrivals.push_back({n - 1, 1.0, MatchingEdges{{1, 2}}});
  return inst;
}

// same graph; a match returns at once w.p. 1-p and is lost for good w.p. p
inline Instance stochastic_rewards_to_reuse(Instance inst, double p) {
  if (!(p > 0 && p <= 1)) throw InvalidArgument("success probability must lie in (0,1]");
  for (auto& r : inst.resources) r.usage = ZeroOrInf{1.0 - p};
  return inst;
}

// n resources with c=1, ZeroOrInf{0.5}, n^2 arrivals at times 0..n^2-1 adjacent to everything
inline Instance omniscient_gap(int n) {
  if (n < 1) throw InvalidArgument("omniscient_gap needs n >= 1");
  Instance inst;
  inst.mode = Mode::matching;
  std::vector<int> all;
  for (int i = 1; i <= n; ++i) {
    inst.resources.push_back({i, 1, 1.0, ZeroOrInf{0.5}});
    all.push_back(i);
  }
  for (int t = 0; t < n * n; ++t) inst.arrivals.push_back({t, double(t), MatchingEdges{all}});
  return inst;
}

// n NonReusable resources with capacity c; block j (c arrivals) is adjacent to resources j..n
inline Instance upper_triangular(int n, int c) {
  if (n < 1 || c < 1) throw InvalidArgument("upper_triangular needs n, c >= 1");
  Instance inst;
  inst.mode = Mode::matching;
  for (int i = 1; i <= n; ++i) inst.resources.push_back({i, c, 1.0, NonReusable{}});
  int t = 0;
  for (int j = 1; j <= n; ++j) {
    std::vector<int> edges;
    for (int i = j; i <= n; ++i) edges.push_back(i);
    for (int k = 0; k < c; ++k, ++t) inst.arrivals.push_back({t, double(t), MatchingEdges{edges}});
  }
  return inst;
}

// Three arrivals at times 1,2,3 over resource 1 (TwoPointInf) and resource 2 (NonReusable).
// t1, t2 see v=(100,1); t3 sees v=(1,100); v0=0.01 throughout.
inline Instance mnl_counterexample() {
  Instance inst;
  inst.mode = Mode::assortment;
  inst.resources = {{1, 1, 1.0, TwoPointInf{0.5, 0.5}}, {2, 1, 1.0, NonReusable{}}};
  inst.choice_models = {Mnl{0.01, {{1, 100.0}, {2, 1.0}}}, Mnl{0.01, {{1, 1.0}, {2, 100.0}}}};
  for (int t = 0; t < 3; ++t)
    inst.arrivals.push_back({t, double(t + 1), AssortmentRequest{t < 2 ? 0 : 1, {{1, 1}, {2, 1}}, AllSubsets{}}});
  return inst;
}

// Matching instance recast as assortments: one MNL with v0 = 0 and unit weights,
// singletons only, so any offered item is taken with certainty.
inline Instance matching_as_assortment(const Instance& m) {
  if (m.mode != Mode::matching) throw InvalidArgument("matching_as_assortment needs a matching instance");
  Instance a;
  a.mode = Mode::assortment;
  a.resources = m.resources;
  Mnl mnl{0.0, {}};
  for (const auto& r : m.resources) mnl.weights[r.id] = 1.0;
  a.choice_models = {mnl};
  for (const auto& arr : m.arrivals) {
    std::map<int, int> bids;
    for (int id : std::get<MatchingEdges>(arr.demand).resources) bids[id] = 1;
    a.arrivals.push_back({arr.index, arr.time, AssortmentRequest{0, bids, MaxCardinality{1}}});
  }
  return a;
}

struct BatteryParams {
  Mode mode = Mode::matching;
  std::size_t count = 5;
  int resources_lo = 2, resources_hi = 5;
  int arrivals_lo = 50, arrivals_hi = 200;
  int capacity_lo = 5, capacity_hi = 20;
  double reward_lo = 0.5, reward_hi = 2.0;
  // distribution type names to draw from (see UsageDistribution::type_name)
  std::vector<std::string> mix = {"deterministic", "two_point_inf", "exponential", "uniform", "weibull", "mixture_inf"};
  double edge_prob = 0.5;
  double arrival_rate = 1.0;
  // mean usage time in units of capacity * resources / arrival_rate (1 = roughly balanced load)
  double duration_scale = 1.0;
  int max_bid = 1;                    // budgeted and assortment modes
  double mnl_lo = 0.01, mnl_hi = 100.0;
  int choice_models = 3;              // assortment: models per instance
  int max_offer = 0;                  // assortment: 0 = all subsets, else a cardinality cap
  int upper_triangular_n = 0;         // > 0 appends upper_triangular(n, capacity_lo)
};

namespace detail {

struct GenRng {
  StreamRng rng;
  GenRng(std::uint64_t seed, std::uint32_t a, std::uint32_t b) : rng(seed, StreamPurpose::generator, a, b) {}
  double u() { return rng.uniform(); }
  double range(double lo, double hi) { return lo + (hi - lo) * u(); }
  double log_range(double lo, double hi) { return std::exp(range(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return lo + int(rng.below(std::uint64_t(hi - lo + 1))); }
};

inline UsageDistribution random_usage(GenRng& g, const std::string& type, double mean) {
  if (type == "deterministic") return Deterministic{mean};
  if (type == "two_point_inf") return TwoPointInf{mean, g.range(0.5, 0.95)};
  if (type == "zero_or_inf") return ZeroOrInf{g.range(0.3, 0.9)};
  if (type == "exponential") return Exponential{1.0 / mean};
  if (type == "uniform") {
    double lo = g.range(0.0, 0.5) * mean;
    return Uniform{lo, 2.0 * mean - lo};
  }
  if (type == "weibull") {
    double k = g.range(1.0, 3.0);
    return WeibullIfr{mean / std::tgamma(1.0 + 1.0 / k), k};
  }
  if (type == "mixture_inf") return MixtureWithInf{g.range(0.7, 0.95), Exponential{1.0 / mean}};
  if (type == "non_reusable") return NonReusable{};
  throw InvalidArgument("unknown distribution type \"" + type + "\" in battery mix");
}

}  // namespace detail

inline Instance random_instance(const BatteryParams& bp, std::uint64_t seed, std::uint32_t index) {
  detail::GenRng g(seed, index, 0);
  Instance inst;
  inst.mode = bp.mode;
  const int n = g.integer(bp.resources_lo, bp.resources_hi);
  const int T = g.integer(bp.arrivals_lo, bp.arrivals_hi);
  for (int i = 1; i <= n; ++i) {
    int c = g.integer(bp.capacity_lo, bp.capacity_hi);
    double r = g.range(bp.reward_lo, bp.reward_hi);
    const std::string& type = bp.mix[std::size_t(g.integer(0, int(bp.mix.size()) - 1))];
    double mean = bp.duration_scale * c * n / bp.arrival_rate * g.range(0.5, 1.5);
    inst.resources.push_back({i, c, r, detail::random_usage(g, type, mean)});
  }
  if (bp.mode == Mode::assortment) {
    for (int k = 0; k < bp.choice_models; ++k) {
      Mnl m;
      m.v0 = g.log_range(bp.mnl_lo, bp.mnl_hi);
      for (int i = 1; i <= n; ++i) m.weights[i] = g.log_range(bp.mnl_lo, bp.mnl_hi);
      inst.choice_models.push_back(m);
    }
  }
  double time = 0;
  for (int t = 0; t < T; ++t) {
    if (t > 0) time += -std::log(g.u()) / bp.arrival_rate;
    std::vector<int> edges;
    for (int i = 1; i <= n; ++i)
      if (g.u() < bp.edge_prob) edges.push_back(i);
    if (edges.empty()) edges.push_back(g.integer(1, n));
    Demand d;
    if (bp.mode == Mode::matching) {
      d = MatchingEdges{edges};
    } else {
      std::map<int, int> bids;
      for (int i : edges) bids[i] = g.integer(1, std::max(1, bp.max_bid));
      if (bp.mode == Mode::budgeted) {
        d = BudgetedBids{bids};
      } else {
        FeasibleSetSpec f = AllSubsets{};
        if (bp.max_offer > 0) f = MaxCardinality{bp.max_offer};
        d = AssortmentRequest{g.integer(0, bp.choice_models - 1), bids, f};
      }
    }
    inst.arrivals.push_back({t, time, d});
  }
  return inst;
}

inline std::vector<Instance> random_battery(const BatteryParams& bp, std::uint64_t seed) {
  if (bp.resources_lo < 1 || bp.resources_hi < bp.resources_lo || bp.resources_hi > 10)
    throw InvalidArgument("battery resources must satisfy 1 <= lo <= hi <= 10");
  if (bp.arrivals_lo < 1 || bp.arrivals_hi < bp.arrivals_lo || bp.arrivals_hi > 5000)
    throw InvalidArgument("battery arrivals must satisfy 1 <= lo <= hi <= 5000");
  if (bp.capacity_lo < 1 || bp.capacity_hi < bp.capacity_lo) throw InvalidArgument("bad battery capacity range");
  if (bp.mix.empty()) throw InvalidArgument("battery distribution mix is empty");
  if (!(bp.arrival_rate > 0) || !(bp.duration_scale > 0)) throw InvalidArgument("rates must be positive");
  if (bp.mode == Mode::assortment && bp.choice_models < 1) throw InvalidArgument("need at least one choice model");
  std::vector<Instance> out;
  for (std::size_t k = 0; k < bp.count; ++k) out.push_back(random_instance(bp, seed, std::uint32_t(k)));
  if (bp.upper_triangular_n > 0 && bp.mode == Mode::matching)
    out.push_back(upper_triangular(bp.upper_triangular_n, bp.capacity_lo));
  return out;
}

inline std::uint64_t battery_hash(const std::vector<Instance>& battery) {
  std::string all;
  for (const auto& inst : battery) all += dump_instance(inst) + "\n";
  return fnv1a(all);
}

// Stochastic-rewards reading of a matching instance: a match succeeds w.p. p and then
// consumes the unit; a failed match leaves the unit where it was. Reward counts successes.
template <Policy P>
TrialTotals simulate_stochastic_rewards(const IndexedInstance& problem, const P& policy, double p,
                                        std::size_t trials, std::uint64_t master_seed) {
  if (problem.mode() != Mode::matching) throw UnsupportedMode("stochastic rewards need matching mode");
  if (!(p > 0 && p <= 1)) throw InvalidArgument("success probability must lie in (0,1]");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  TrialTotals out;
  out.totals.assign(trials, 0.0);
  out.per_resource.assign(problem.num_resources(), std::vector<double>(trials, 0.0));
  for (std::size_t k = 0; k < trials; ++k) {
    const std::uint64_t seed = trial_seed(master_seed, k);
    Inventory inv(problem);
    for (std::size_t t = 0; t < problem.num_arrivals(); ++t) {
      StreamRng rng(seed, StreamPurpose::policy, std::uint32_t(t), 0);
      ArrivalContext ctx{problem, t, inv, rng};
      Decision dec = policy.decide(ctx);
      auto a = std::get_if<Allocate>(&dec);
      if (!a) continue;
      if (problem.bid(t, a->resource) < 1 || a->units.size() != 1 || !inv.is_available(a->resource, a->units[0]))
        throw PolicyProtocolViolation("bad allocation at arrival " + std::to_string(t));
      auto u = keyed_uniforms(seed, StreamPurpose::stochastic_reward, std::uint32_t(t), 0, 0);
      if (u[0] < p) {
        inv.take(a->resource, a->units[0]);
        inv.count_dead(a->resource);
        const double r = problem.resource(a->resource).reward;
        out.totals[k] += r;
        out.per_resource[a->resource][k] += r;
      }
    }
  }
  return out;
}

}  // namespace ralloc
