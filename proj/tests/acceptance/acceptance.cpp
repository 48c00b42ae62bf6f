// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance is fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ralloc/ralloc.hpp"

using namespace ralloc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

double uniform_between(StreamRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }
double log_uniform(StreamRng& rng, double lo, double hi) {
  return std::exp(uniform_between(rng, std::log(lo), std::log(hi)));
}

std::vector<double> random_times(StreamRng& rng, std::size_t T, double gap) {
  std::vector<double> s;
  double t = 0;
  for (std::size_t k = 0; k < T; ++k) {
    s.push_back(t);
    t += 0.01 + gap * rng.uniform();
  }
  return s;
}

// ---- 1: probability match ----
Outcome c1() {
  StreamRng rng(101, StreamPurpose::generator, 1, 0);
  std::size_t bad_nest = 0, bad_sum = 0, bad_match = 0, bad_equiv = 0;
  double worst_err = 0, worst_equiv = 0;
  const int N = 1000;
  for (int rep = 0; rep < N; ++rep) {
    const int n = 1 + int(rng.below(10));
    Mnl m;
    m.v0 = log_uniform(rng, 0.01, 100);
    std::vector<int> S;
    for (int i = 1; i <= n; ++i) {
      m.weights[i] = log_uniform(rng, 0.01, 100);
      S.push_back(i);
    }
    ChoiceModel model = m;
    std::vector<double> p;
    for (int i : S) p.push_back((rng.uniform() < 0.1 ? 0.0 : rng.uniform()) * choice_prob(model, S, i));
    auto fast = probability_match(model, S, p);
    auto gen = probability_match_generic(model, S, p);
    auto chk = check_probability_match(model, S, p, fast);
    auto chk_gen = check_probability_match(model, S, p, gen);
    if (!chk.nested || !chk.subsets_of_S || !chk_gen.nested) ++bad_nest;
    if (chk.weight_sum > 1 + 1e-9 || chk_gen.weight_sum > 1 + 1e-9) ++bad_sum;
    worst_err = std::max({worst_err, chk.max_target_error, chk_gen.max_target_error});
    if (chk.max_target_error > 1e-9 || chk_gen.max_target_error > 1e-9) ++bad_match;
    // same collection: identical sets, weights within 1e-9
    bool same = fast.size() == gen.size();
    for (std::size_t j = 0; same && j < fast.size(); ++j) {
      same = fast[j].set == gen[j].set;
      worst_equiv = std::max(worst_equiv, std::abs(fast[j].weight - gen[j].weight));
      same = same && std::abs(fast[j].weight - gen[j].weight) <= 1e-9;
    }
    if (!same) ++bad_equiv;
  }
  Outcome o;
  o.pass = bad_nest == 0 && bad_sum == 0 && bad_match == 0 && bad_equiv == 0;
  o.detail = "inputs=" + std::to_string(N) + " nest_fail=" + std::to_string(bad_nest) + " sum_fail=" +
             std::to_string(bad_sum) + " match_fail=" + std::to_string(bad_match) + " max_err=" + fmt(worst_err) +
             " fast_vs_generic_fail=" + std::to_string(bad_equiv) + " max_weight_gap=" + fmt(worst_equiv);
  return o;
}

// ---- 2: random vs fluid process ----
Outcome c2() {
  StreamRng rng(202, StreamPurpose::generator, 2, 0);
  const std::size_t N = 200000;
  int arrival_fail = 0, reward_fail = 0;
  double worst_z = 0;
  for (int k = 0; k < 20; ++k) {
    UsageDistribution F = [&]() -> UsageDistribution {
      switch (k % 4) {
        case 0: return TwoPointInf{uniform_between(rng, 0.3, 1.5), uniform_between(rng, 0.2, 0.9)};
        case 1: return Exponential{uniform_between(rng, 0.5, 3.0)};
        case 2: return Deterministic{uniform_between(rng, 0.2, 1.5)};
        default: return Uniform{0.0, uniform_between(rng, 0.5, 2.0)};
      }
    }();
    ProcessSpec s{F, random_times(rng, 12, 0.5), {}};
    for (std::size_t t = 0; t < 12; ++t) s.probs.push_back(uniform_between(rng, 0.1, 1.0));
    auto fl = fluid_process(s);
    auto mc = simulate_process(s, 1000 + std::uint64_t(k), N);
    for (std::size_t t = 0; t < 12; ++t) {
      double eta = fl.eta[t];
      double se = std::sqrt(std::max(0.0, eta * (1 - eta)) / double(N));
      double gap = std::abs(mc.availability[t] - eta);
      if (se > 0) worst_z = std::max(worst_z, gap / se);
      if (gap > 4 * se + 1e-9) ++arrival_fail;
    }
    if (std::abs(mc.reward.mean - fl.reward) > 4 * mc.reward.se + 1e-9) ++reward_fail;
  }
  Outcome o;
  o.pass = arrival_fail == 0 && reward_fail == 0;
  o.detail = "specs=20 trials=200000 arrival_fail=" + std::to_string(arrival_fail) +
             " reward_fail=" + std::to_string(reward_fail) + " max_z=" + fmt(worst_z);
  return o;
}

// ---- 3: monotonicity and zero-point augmentation ----
Outcome c3() {
  StreamRng rng(303, StreamPurpose::generator, 3, 0);
  int mono_fail = 0, zero_fail = 0, zero_points = 0;
  auto any_F = [&]() -> UsageDistribution {
    switch (int(rng.below(5))) {
      case 0: return TwoPointInf{uniform_between(rng, 0.3, 2.0), uniform_between(rng, 0.1, 0.9)};
      case 1: return Exponential{uniform_between(rng, 0.3, 3.0)};
      case 2: return Deterministic{uniform_between(rng, 0.2, 2.0)};
      case 3: return Uniform{0.0, uniform_between(rng, 0.5, 2.0)};
      default: return WeibullIfr{uniform_between(rng, 0.5, 2.0), uniform_between(rng, 1.0, 3.0)};
    }
  };
  for (int k = 0; k < 100; ++k) {
    auto F = any_F();
    auto times = random_times(rng, 40, 0.4);
    std::vector<double> hi, lo;
    for (std::size_t t = 0; t < times.size(); ++t) {
      hi.push_back(rng.uniform());
      lo.push_back(rng.uniform() * hi.back());
    }
    if (!check_monotonicity(F, times, lo, hi)) ++mono_fail;
  }
  for (int k = 0; k < 100; ++k) {
    // a long deterministic use over a dense prefix makes eta hit 0
    double d = uniform_between(rng, 1.0, 3.0);
    ProcessSpec s{Deterministic{d}, {}, {}};
    double t = 0;
    for (int j = 0; j < 40; ++j) {
      s.times.push_back(t);
      s.probs.push_back(j == 0 ? 1.0 : rng.uniform());
      t += j < 10 ? 0.05 : 0.01 + 0.3 * rng.uniform();
    }
    for (double e : fluid_process(s).eta)
      if (e <= 1e-12) ++zero_points;
    if (!check_zero_point_augmentation(s)) ++zero_fail;
  }
  Outcome o;
  o.pass = mono_fail == 0 && zero_fail == 0;
  o.detail = "monotonicity_fail=" + std::to_string(mono_fail) + "/100 zero_point_fail=" + std::to_string(zero_fail) +
             "/100 zero_points=" + std::to_string(zero_points);
  return o;
}

// ---- 4: example_a1 ----
Outcome c4() {
  const int n = 1000;
  IndexedInstance p(example_a1(n));
  auto bal = run_trials(p, Balance{}, 200, 4004);
  auto rba = run_trials(p, Rba{}, 200, 4004);
  double lp50 = lp_value(IndexedInstance(example_a1(50)));
  bool b_ok = bal.mean / n >= 2.40 && bal.mean / n <= 2.60;
  bool r_ok = rba.mean / n >= 2.60;
  bool disjoint = bal.ci_hi < rba.ci_lo || rba.ci_hi < bal.ci_lo;
  bool lp_ok = std::abs(lp50 - 150.0) <= 1e-6;
  Outcome o;
  o.pass = b_ok && r_ok && disjoint && lp_ok;
  o.detail = "balance/n=" + fmt(bal.mean / n, 6) + (b_ok ? "" : "(out of [2.40,2.60])") + " rba/n=" +
             fmt(rba.mean / n, 6) + (r_ok ? "" : "(below 2.60)") + " ci_disjoint=" + (disjoint ? "yes" : "no") +
             " lp(n=50)=" + fmt(lp50, 10) + (lp_ok ? "" : "(expected 150 within 1e-6)");
  return o;
}

// ---- 5: SALG vs GALG ----
Outcome c5() {
  BatteryParams bp;
  bp.count = 5;
  bp.resources_lo = 2;
  bp.resources_hi = 4;
  bp.capacity_lo = 100;
  bp.capacity_hi = 150;
  bp.arrivals_lo = 500;
  bp.arrivals_hi = 700;
  int res_fail = 0, avail_fail = 0, checked = 0;
  double worst_margin = INFINITY, worst_block = 0;
  for (const auto& inst : random_battery(bp, 505)) {
    IndexedInstance p(inst);
    Salg salg(p);
    const auto& galg = salg.guide();
    const std::size_t trials = 1000;
    auto tt = run_trial_totals(p, salg, trials, 55);
    auto s = summarize(tt.totals, tt.per_resource);
    for (std::size_t r = 0; r < p.num_resources(); ++r) {
      double c = p.resource(r).capacity;
      double bound = (1 - 1 / c) / (1 + salg_delta(c)) * galg.resource_reward[r];
      double margin = s.resource_mean[r] - (bound - 3 * s.resource_se[r]);
      worst_margin = std::min(worst_margin, margin);
      ++checked;
      if (margin < 0) ++res_fail;
    }
    std::vector<double> frac;
    for (std::uint64_t k = 0; k < trials; ++k) {
      SimOptions so;
      so.record = false;
      auto tr = simulate(p, salg, 56, k, so);
      double sampled = double(tr.blocked + tr.allocations);
      frac.push_back(sampled > 0 ? double(tr.blocked) / sampled : 0.0);
    }
    auto f = mean_se(frac);
    double cmin = min_capacity(inst);
    worst_block = std::max(worst_block, f.mean * cmin);
    if (f.mean > 1 / cmin + 3 * f.se) ++avail_fail;
  }
  Outcome o;
  o.pass = res_fail == 0 && avail_fail == 0;
  o.detail = "resources=" + std::to_string(checked) + " bound_fail=" + std::to_string(res_fail) +
             " min_margin=" + fmt(worst_margin) + " availability_fail=" + std::to_string(avail_fail) +
             " max_blocked_freq*c_min=" + fmt(worst_block);
  return o;
}

// ---- 6: upper triangular ----
Outcome c6() {
  const double target = 1 - std::exp(-1.0);
  auto ratio = [](int n, int c) {
    IndexedInstance p(upper_triangular(n, c));
    return run_galg(p).total_reward / lp_value(p);
  };
  double r10 = ratio(10, 100);
  double r20 = ratio(20, 100);
  bool band = std::abs(r10 - target) <= 0.02;
  bool trend = std::abs(r20 - target) < std::abs(r10 - target);
  Outcome o;
  o.pass = band && trend;
  o.detail = "ratio(|I|=10)=" + fmt(r10, 6) + (band ? "" : "(outside [0.612,0.652])") + " ratio(|I|=20)=" +
             fmt(r20, 6) + " moves_toward_1-1/e=" + (trend ? "yes" : "no");
  return o;
}

// ---- 7: greedy half ----
Outcome c7() {
  BatteryParams bp;
  bp.count = 20;
  bp.arrivals_lo = 150;
  bp.arrivals_hi = 250;
  bp.capacity_lo = 5;
  bp.capacity_hi = 20;
  int fail = 0;
  double worst = INFINITY;
  for (const auto& inst : random_battery(bp, 707)) {
    IndexedInstance p(inst);
    double lp = lp_value(p);
    auto g = run_trials(p, Greedy{}, 500, 77);
    worst = std::min(worst, g.mean / lp);
    if (g.mean < 0.5 * lp - 3 * g.se) ++fail;
  }
  Outcome o;
  o.pass = fail == 0;
  o.detail = "instances=20 fail=" + std::to_string(fail) + " min_greedy/lp=" + fmt(worst);
  return o;
}

// ---- 8: brute-force clairvoyant ----
Instance tiny_instance(StreamRng& rng) {
  Instance inst;
  const int n = 1 + int(rng.below(2));
  int left = 4;
  for (int i = 0; i < n; ++i) {
    int c = i + 1 == n ? 1 + int(rng.below(std::uint64_t(left))) : 1 + int(rng.below(std::uint64_t(left - 1)));
    c = std::min(c, left - (n - 1 - i));
    left -= c;
    UsageDistribution F = [&]() -> UsageDistribution {
      switch (int(rng.below(3))) {
        case 0: return Deterministic{uniform_between(rng, 0.3, 2.5)};
        case 1: return TwoPointInf{uniform_between(rng, 0.3, 2.0), uniform_between(rng, 0.1, 0.9)};
        default: return ZeroOrInf{uniform_between(rng, 0.1, 0.9)};
      }
    }();
    inst.resources.push_back({i + 1, c, uniform_between(rng, 0.5, 2.0), F});
  }
  const int T = 2 + int(rng.below(5));
  double t = 0;
  for (int k = 0; k < T; ++k) {
    if (k > 0 && rng.uniform() > 0.25) t += uniform_between(rng, 0.1, 1.2);
    MatchingEdges e;
    for (int i = 1; i <= n; ++i)
      if (rng.uniform() < 0.7) e.resources.push_back(i);
    if (e.resources.empty()) e.resources.push_back(1 + int(rng.below(std::uint64_t(n))));
    inst.arrivals.push_back({k, t, e});
  }
  return inst;
}

Outcome c8() {
  StreamRng rng(808, StreamPurpose::generator, 8, 0);
  int lp_fail = 0, dom_fail = 0, half_fail = 0;
  double worst_gap = -INFINITY;
  for (int k = 0; k < 50; ++k) {
    Instance inst = tiny_instance(rng);
    IndexedInstance p(inst);
    double bf = brute_force_clairvoyant(p);
    double lp = lp_value(p);
    if (bf > lp + 1e-9) ++lp_fail;
    const std::size_t trials = 4000;
    const std::uint64_t seed = 8000 + std::uint64_t(k);
    std::vector<Summary> runs = {run_trials(p, Greedy{}, trials, seed), run_trials(p, Balance{}, trials, seed),
                                 run_trials(p, Rba{}, trials, seed), run_trials(p, Salg(p), trials, seed),
                                 run_trials(p, LpRounding::from_instance(p), trials, seed)};
    for (const auto& s : runs) {
      worst_gap = std::max(worst_gap, s.mean - bf - 3 * s.se);
      if (s.mean > bf + 3 * s.se + 1e-12) ++dom_fail;
    }
    if (runs[0].mean < 0.5 * bf - 3 * runs[0].se) ++half_fail;
  }
  Outcome o;
  o.pass = lp_fail == 0 && dom_fail == 0 && half_fail == 0;
  o.detail = "instances=50 bf>lp=" + std::to_string(lp_fail) + " policy>bf=" + std::to_string(dom_fail) +
             " greedy<bf/2=" + std::to_string(half_fail) + " max(policy-bf-3se)=" + fmt(worst_gap);
  return o;
}

// ---- 9: stochastic rewards ----
Outcome c9() {
  BatteryParams bp;
  bp.count = 5;
  bp.resources_lo = 2;
  bp.resources_hi = 4;
  bp.arrivals_lo = 30;
  bp.arrivals_hi = 60;
  bp.capacity_lo = 2;
  bp.capacity_hi = 6;
  int fail = 0, cases = 0;
  double worst_z = 0;
  for (const auto& inst : random_battery(bp, 909)) {
    IndexedInstance orig(inst);
    for (double q : {0.2, 0.5, 1.0}) {
      IndexedInstance conv(stochastic_rewards_to_reuse(inst, q));
      const std::size_t N = 100000;
      auto a = mean_se(run_trial_totals(conv, Balance{}, N, 91).totals);
      auto b = mean_se(simulate_stochastic_rewards(orig, Balance{}, q, N, 92).totals);
      double se = std::sqrt(q * q * a.se * a.se + b.se * b.se);
      double gap = std::abs(q * a.mean - b.mean);
      if (se > 0) worst_z = std::max(worst_z, gap / se);
      ++cases;
      if (gap > 3 * se) ++fail;
    }
  }
  Outcome o;
  o.pass = fail == 0;
  o.detail = "cases=" + std::to_string(cases) + " fail=" + std::to_string(fail) + " max_z=" + fmt(worst_z);
  return o;
}

// ---- 10: ASTALG vs ASTGALG ----
Outcome c10() {
  BatteryParams bp;
  bp.mode = Mode::assortment;
  bp.count = 3;
  bp.resources_lo = 2;
  bp.resources_hi = 4;
  bp.capacity_lo = 200;
  bp.capacity_hi = 200;
  bp.max_bid = 2;
  bp.arrivals_lo = 600;
  bp.arrivals_hi = 800;
  bp.choice_models = 3;
  int res_fail = 0, checked = 0, gamma_off = 0;
  double worst = INFINITY;
  for (const auto& inst : random_battery(bp, 1010)) {
    if (gamma(inst) != 100.0) ++gamma_off;
    IndexedInstance p(inst);
    Astalg alg(p);
    const auto& guide = alg.guide();
    auto s = run_trials(p, alg, 1000, 1011);
    for (std::size_t r = 0; r < p.num_resources(); ++r) {
      double bound = (1 - 1 / 100.0) / (1 + alg.delta()) * guide.resource_reward[r];
      double margin = s.resource_mean[r] - (bound - 3 * s.resource_se[r]);
      worst = std::min(worst, margin);
      ++checked;
      if (margin < 0) ++res_fail;
    }
  }
  // matching recast as singletons with certain purchase
  BatteryParams mb;
  mb.count = 5;
  mb.mix.push_back("non_reusable");
  mb.upper_triangular_n = 4;
  double worst_red = 0;
  for (const auto& inst : random_battery(mb, 1012)) {
    IndexedInstance pm(inst), pa(matching_as_assortment(inst));
    auto gm = run_guide(pm);
    auto ga = run_assortment_guide(pa);
    worst_red = std::max(worst_red, std::abs(gm.total_reward - ga.total_reward));
    for (std::size_t r = 0; r < pm.num_resources(); ++r)
      worst_red = std::max(worst_red, std::abs(gm.resource_reward[r] - ga.resource_reward[r]));
  }
  bool red_ok = worst_red <= 1e-9;
  Outcome o;
  o.pass = res_fail == 0 && gamma_off == 0 && red_ok;
  o.detail = "resources=" + std::to_string(checked) + " bound_fail=" + std::to_string(res_fail) +
             " min_margin=" + fmt(worst) + " gamma_mismatch=" + std::to_string(gamma_off) +
             " reduction_max_gap=" + fmt(worst_red);
  return o;
}

// ---- 11: certificate ----
// Resource 1 (r=1) is what the offline optimum uses for the early arrivals; GALG
// sends them to resource 2 (r=1.2) at high rank and never touches resource 1.
// This is where swapped unit weights undercut condition (3).
Instance scarce_choice(int c) {
  Instance inst;
  inst.resources = {{1, c, 1.0, NonReusable{}}, {2, c, 1.2, NonReusable{}}};
  int t = 0;
  for (; t < c / 4; ++t) inst.arrivals.push_back({t, double(t), MatchingEdges{{1, 2}}});
  for (int k = 0; k < c; ++k, ++t) inst.arrivals.push_back({t, double(t), MatchingEdges{{2}}});
  return inst;
}

Outcome c11() {
  BatteryParams bp;
  bp.count = 4;
  bp.resources_lo = 5;
  bp.resources_hi = 5;
  bp.capacity_lo = 20;
  bp.capacity_hi = 40;
  bp.arrivals_lo = 250;
  bp.arrivals_hi = 350;
  bp.mix = {"non_reusable"};
  bp.upper_triangular_n = 5;
  int c3_fail = 0, c1_fail = 0, control_failures = 0, instances = 0;
  auto battery = random_battery(bp, 1111);
  battery.push_back(scarce_choice(40));
  for (const auto& inst : battery) {
    IndexedInstance p(inst);
    const double cmin = min_capacity(inst);
    CertificateOptions co;
    co.alpha = 0.99 * (1 - std::exp(-1.0)) * std::exp(-1.0 / cmin);
    co.beta = 1.01 * std::exp(1.0 / cmin);
    co.trials = 1000;
    co.seed = 1112;
    auto opt = LpRounding::from_instance(p);
    auto rep = certificate_check(p, CertificateAlg::galg, opt, co);
    ++instances;
    if (!rep.cond3_pass) ++c3_fail;
    if (!rep.cond1_pass) ++c1_fail;
    co.swap_roles = true;
    auto neg = certificate_check(p, CertificateAlg::galg, opt, co);
    for (const auto& rc : neg.resources)
      if (!rc.pass) ++control_failures;
  }
  Outcome o;
  o.pass = c3_fail == 0 && c1_fail == 0 && control_failures >= 1;
  o.detail = "instances=" + std::to_string(instances) + " cond3_fail=" + std::to_string(c3_fail) +
             " cond1_fail=" + std::to_string(c1_fail) + " swapped_resource_failures=" + std::to_string(control_failures);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  std::vector<Criterion> all = {
      {"C1 probability match exactness", c1, 5},
      {"C2 random/fluid process equivalence", c2, 60},
      {"C3 monotonicity and zero-point augmentation", c3, 5},
      {"C4 example_a1 reproduction", c4, 180},
      {"C5 SALG vs GALG", c5, 180},
      {"C6 upper-triangular GALG/LP", c6, 60},
      {"C7 greedy half of LP", c7, 120},
      {"C8 brute-force clairvoyant oracle", c8, 120},
      {"C9 stochastic-rewards equivalence", c9, 120},
      {"C10 ASTALG vs ASTGALG", c10, 180},
      {"C11 GALG certificate", c11, 180},
  };
  int failed = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.budget_s;
    bool ok = o.pass && in_time;
    if (!ok) ++failed;
    std::printf("%s %s: %s time=%.1fs%s\n", ok ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
