#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "choice_model.hpp"
#include "distributions.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace ralloc {

enum class UnitStatus : std::uint8_t { available, in_use, dead };

// Per-resource unit availability as bitsets; rank k lives in bit k-1.
class Inventory {
 public:
  explicit Inventory(const IndexedInstance& p) {
    const std::size_t n = p.num_resources();
    cap_.resize(n);
    avail_.resize(n);
    dead_.assign(n, 0);
    words_.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      int c = p.resource(r).capacity;
      cap_[r] = c;
      avail_[r] = c;
      words_[r].assign(std::size_t((c + 63) / 64), ~std::uint64_t(0));
      if (c % 64) words_[r].back() = (std::uint64_t(1) << (c % 64)) - 1;
    }
  }

  std::size_t num_resources() const { return cap_.size(); }
  int capacity(std::size_t r) const { return cap_[r]; }
  int available(std::size_t r) const { return avail_[r]; }
  int dead(std::size_t r) const { return dead_[r]; }
  int in_use(std::size_t r) const { return cap_[r] - avail_[r] - dead_[r]; }

  bool is_available(std::size_t r, int rank) const {
    if (rank < 1 || rank > cap_[r]) return false;
    return words_[r][std::size_t(rank - 1) / 64] >> ((rank - 1) % 64) & 1u;
  }

  // highest available rank, 0 when none
  int top(std::size_t r) const { return next_below(r, cap_[r] + 1); }

  // highest available rank strictly below `rank`, 0 when none
  int next_below(std::size_t r, int rank) const {
    if (rank <= 1) return 0;
    int bit = rank - 2;  // highest candidate bit
    std::size_t w = std::size_t(bit) / 64;
    std::uint64_t word = words_[r][w];
    int off = bit % 64;
    if (off < 63) word &= (std::uint64_t(1) << (off + 1)) - 1;
    while (true) {
      if (word) return int(w * 64) + 63 - __builtin_clzll(word) + 1;
      if (w == 0) return 0;
      word = words_[r][--w];
    }
  }

  // up to m highest available ranks, descending
  std::vector<int> top_units(std::size_t r, int m) const {
    std::vector<int> out;
    for (int k = top(r); k > 0 && int(out.size()) < m; k = next_below(r, k)) out.push_back(k);
    return out;
  }

  // k-th highest available rank (k >= 1), 0 when fewer than k are available
  int kth_highest(std::size_t r, int k) const {
    int rank = top(r);
    for (int i = 1; i < k && rank > 0; ++i) rank = next_below(r, rank);
    return rank;
  }

  bool conserved() const {
    for (std::size_t r = 0; r < cap_.size(); ++r) {
      int count = 0;
      for (auto w : words_[r]) count += __builtin_popcountll(w);
      if (count != avail_[r] || in_use(r) < 0) return false;
    }
    return true;
  }

  void take(std::size_t r, int rank) {
    words_[r][std::size_t(rank - 1) / 64] &= ~(std::uint64_t(1) << ((rank - 1) % 64));
    --avail_[r];
  }
  void give_back(std::size_t r, int rank) {
    words_[r][std::size_t(rank - 1) / 64] |= std::uint64_t(1) << ((rank - 1) % 64);
    ++avail_[r];
  }
  void count_dead(std::size_t r) { ++dead_[r]; }

 private:
  std::vector<int> cap_, avail_, dead_;
  std::vector<std::vector<std::uint64_t>> words_;
};

// what a policy may do at one arrival (resources by position)
struct NoAction {};
struct Allocate {
  std::size_t resource;
  std::vector<int> units;  // ranks
};
struct Blocked {  // a sampled resource turned out to be unavailable
  std::size_t resource;
};
struct Offer {
  std::vector<std::size_t> items;
};
using Decision = std::variant<NoAction, Allocate, Blocked, Offer>;

struct ArrivalContext {
  const IndexedInstance& problem;
  std::size_t t;
  const Inventory& inventory;
  StreamRng& rng;  // private to this (trial, arrival)
};

template <class P>
concept Policy = requires(const P& p, const ArrivalContext& ctx) {
  { p.decide(ctx) } -> std::same_as<Decision>;
};

// type-erased policy for callers that pick policies by name
struct AnyPolicy {
  std::string name;
  std::function<Decision(const ArrivalContext&)> fn;
  Decision decide(const ArrivalContext& ctx) const { return fn(ctx); }
};

template <Policy P>
AnyPolicy erase_policy(std::string name, P policy) {
  return {std::move(name), [p = std::move(policy)](const ArrivalContext& c) { return p.decide(c); }};
}

enum class DecisionKind { none, allocate, blocked, offer };

inline const char* decision_name(DecisionKind k) {
  switch (k) {
    case DecisionKind::none: return "none";
    case DecisionKind::allocate: return "allocate";
    case DecisionKind::blocked: return "blocked";
    default: return "offer";
  }
}

struct ArrivalRecord {
  std::size_t arrival = 0;
  double time = 0;
  DecisionKind kind = DecisionKind::none;
  int resource = -1;         // id allocated, blocked, or chosen; -1 if none
  std::vector<int> offered;  // ids (assortment mode)
  std::vector<int> units;    // ranks allocated
  std::vector<Duration> durations;
  double reward = 0;
};

struct TrialTrace {
  std::uint64_t trial = 0;
  std::vector<ArrivalRecord> records;
  double total_reward = 0;
  std::vector<double> resource_reward;  // by position
  std::size_t allocations = 0;
  std::size_t blocked = 0;
};

struct SimOptions {
  bool record = true;           // keep per-arrival records
  bool shared_duration = false; // one draw for all units of a multi-unit allocation
  bool check_conservation = false;
};

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return derive_seed(master, StreamPurpose::trial_seed, trial);
}

template <Policy P>
TrialTrace simulate(const IndexedInstance& problem, const P& policy, std::uint64_t master_seed,
                    std::uint64_t trial, const SimOptions& opt = {}) {
  struct Pending {
    double tau, d;
    std::size_t r;
    int rank;
    bool operator>(const Pending& o) const { return tau + d > o.tau + o.d; }
  };
  const Instance& inst = problem.instance();
  const std::uint64_t seed = trial_seed(master_seed, trial);
  Inventory inv(problem);
  std::vector<std::vector<std::uint32_t>> uses(problem.num_resources());
  for (std::size_t r = 0; r < uses.size(); ++r) uses[r].assign(std::size_t(inv.capacity(r)) + 1, 0);
  std::priority_queue<Pending, std::vector<Pending>, std::greater<Pending>> pending;

  TrialTrace tr;
  tr.trial = trial;
  tr.resource_reward.assign(problem.num_resources(), 0.0);
  if (opt.record) tr.records.reserve(problem.num_arrivals());

  for (std::size_t t = 0; t < problem.num_arrivals(); ++t) {
    const double now = problem.time(t);
    while (!pending.empty() && now - pending.top().tau >= pending.top().d) {
      inv.give_back(pending.top().r, pending.top().rank);
      pending.pop();
    }
    StreamRng rng(seed, StreamPurpose::policy, std::uint32_t(t), 0);
    ArrivalContext ctx{problem, t, inv, rng};
    Decision dec = policy.decide(ctx);

    ArrivalRecord rec;
    rec.arrival = t;
    rec.time = now;

    auto allocate = [&](std::size_t r, const std::vector<int>& units) {
      const Resource& res = problem.resource(r);
      Duration shared = Duration::infinite();
      for (std::size_t k = 0; k < units.size(); ++k) {
        int rank = units[k];
        if (!inv.is_available(r, rank))
          throw PolicyProtocolViolation("unit " + std::to_string(rank) + " of resource " +
                                        std::to_string(res.id) + " is not available at arrival " +
                                        std::to_string(t));
        std::uint32_t use = uses[r][std::size_t(rank)]++;
        Duration d = (opt.shared_duration && k > 0)
                         ? shared
                         : res.usage.sample({std::uint32_t(res.id), std::uint32_t(rank), use}, seed);
        if (k == 0) shared = d;
        inv.take(r, rank);
        if (d.is_infinite()) {
          inv.count_dead(r);
        } else {
          pending.push({now, d.value(), r, rank});
        }
        if (opt.record) rec.durations.push_back(d);
      }
      double gain = res.reward * double(units.size());
      tr.total_reward += gain;
      tr.resource_reward[r] += gain;
      ++tr.allocations;
      rec.kind = DecisionKind::allocate;
      rec.resource = res.id;
      rec.reward = gain;
      if (opt.record) rec.units = units;
    };

    if (auto a = std::get_if<Allocate>(&dec)) {
      const int b = problem.bid(t, a->resource);
      if (b < 1)
        throw PolicyProtocolViolation("no edge to resource " + std::to_string(problem.resource(a->resource).id) +
                                      " at arrival " + std::to_string(t));
      const int need = inst.mode == Mode::matching ? 1 : std::min(b, inv.available(a->resource));
      std::vector<int> sorted = a->units;
      std::sort(sorted.begin(), sorted.end());
      if (int(a->units.size()) != need || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw PolicyProtocolViolation("allocation at arrival " + std::to_string(t) + " must use exactly " +
                                      std::to_string(need) + " distinct units");
      allocate(a->resource, a->units);
    } else if (auto bl = std::get_if<Blocked>(&dec)) {
      rec.kind = DecisionKind::blocked;
      rec.resource = problem.resource(bl->resource).id;
      ++tr.blocked;
    } else if (auto of = std::get_if<Offer>(&dec)) {
      if (inst.mode != Mode::assortment) throw PolicyProtocolViolation("offers need assortment mode");
      const auto& req = std::get<AssortmentRequest>(problem.arrival(t).demand);
      const ChoiceModel& model = inst.choice_models[std::size_t(req.choice_model)];
      std::vector<int> ids;
      for (std::size_t r : of->items) {
        if (problem.bid(t, r) < 1 || inv.available(r) < 1)
          throw PolicyProtocolViolation("offered resource " + std::to_string(problem.resource(r).id) +
                                        " is not offerable at arrival " + std::to_string(t));
        ids.push_back(problem.resource(r).id);
      }
      if (!is_feasible(req.feasible, ids))
        throw PolicyProtocolViolation("offered set infeasible at arrival " + std::to_string(t));
      rec.kind = DecisionKind::offer;
      if (opt.record) rec.offered = ids;
      std::vector<std::size_t> order = of->items;
      std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return problem.resource(x).id < problem.resource(y).id;
      });
      StreamRng choice_rng(seed, StreamPurpose::choice, std::uint32_t(t), 0);
      double u = choice_rng.uniform(), acc = 0;
      for (std::size_t r : order) {
        acc += choice_prob(model, ids, problem.resource(r).id);
        if (u < acc) {
          int b = problem.bid(t, r);
          allocate(r, inv.top_units(r, std::min(b, inv.available(r))));
          rec.kind = DecisionKind::offer;
          break;
        }
      }
    }
    if (opt.check_conservation && !inv.conserved())
      throw PolicyProtocolViolation("inventory conservation broken at arrival " + std::to_string(t));
    if (opt.record) tr.records.push_back(std::move(rec));
  }
  return tr;
}

struct RunOptions {
  unsigned threads = 1;
  SimOptions sim{false, false, false};
};

// per-trial totals and per-resource rewards, indexed by trial id
struct TrialTotals {
  std::vector<double> totals;
  std::vector<std::vector<double>> per_resource;
};

template <Policy P>
TrialTotals run_trial_totals(const IndexedInstance& problem, const P& policy, std::size_t trials,
                             std::uint64_t master_seed, const RunOptions& opt = {}) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  TrialTotals out;
  out.totals.assign(trials, 0.0);
  out.per_resource.assign(problem.num_resources(), std::vector<double>(trials, 0.0));
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < trials; k += stride) {
      TrialTrace tr = simulate(problem, policy, master_seed, k, opt.sim);
      out.totals[k] = tr.total_reward;
      for (std::size_t r = 0; r < tr.resource_reward.size(); ++r) out.per_resource[r][k] = tr.resource_reward[r];
    }
  };
  unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, unsigned(trials)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w, threads);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

template <Policy P>
Summary run_trials(const IndexedInstance& problem, const P& policy, std::size_t trials,
                   std::uint64_t master_seed, const RunOptions& opt = {}) {
  auto t = run_trial_totals(problem, policy, trials, master_seed, opt);
  return summarize(t.totals, t.per_resource);
}

// shortest decimal that keeps 12 significant digits; integral values get ".0"
inline std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  std::string s = os.str();
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline void write_trace_header(std::ostream& os) { os << "trial,arrival,time,decision,resource,units,reward\n"; }

// units column: ranks separated by ';'
inline void write_trace_csv(std::ostream& os, const TrialTrace& tr) {
  for (const auto& r : tr.records) {
    os << tr.trial << ',' << r.arrival << ',' << format_number(r.time) << ',' << decision_name(r.kind) << ',';
    if (r.resource >= 0) os << r.resource;
    os << ',';
    for (std::size_t k = 0; k < r.units.size(); ++k) os << (k ? ";" : "") << r.units[k];
    os << ',' << format_number(r.reward) << '\n';
  }
}

}  // namespace ralloc
