#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "choice_model.hpp"
#include "distributions.hpp"
#include "errors.hpp"

namespace ralloc {

enum class Mode { matching, budgeted, assortment };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::matching: return "matching";
    case Mode::budgeted: return "budgeted";
    default: return "assortment";
  }
}

struct Resource {
  int id = 0;
  int capacity = 1;
  double reward = 0;
  UsageDistribution usage;
  bool operator==(const Resource&) const = default;
};

struct AllSubsets { bool operator==(const AllSubsets&) const = default; };
struct MaxCardinality { int k = 1; bool operator==(const MaxCardinality&) const = default; };
struct ExplicitList {
  std::vector<std::vector<int>> sets;  // each sorted; the empty set is implied
  bool operator==(const ExplicitList&) const = default;
};
using FeasibleSetSpec = std::variant<AllSubsets, MaxCardinality, ExplicitList>;

inline bool is_feasible(const FeasibleSetSpec& spec, std::vector<int> set) {
  if (set.empty()) return true;
  if (std::holds_alternative<AllSubsets>(spec)) return true;
  if (auto k = std::get_if<MaxCardinality>(&spec)) return int(set.size()) <= k->k;
  std::sort(set.begin(), set.end());
  for (auto s : std::get<ExplicitList>(spec).sets) {
    std::sort(s.begin(), s.end());
    if (s == set) return true;
  }
  return false;
}

struct MatchingEdges {
  std::vector<int> resources;
  bool operator==(const MatchingEdges&) const = default;
};
struct BudgetedBids {
  std::map<int, int> bids;
  bool operator==(const BudgetedBids&) const = default;
};
struct AssortmentRequest {
  int choice_model = 0;  // index into Instance::choice_models
  std::map<int, int> bids;
  FeasibleSetSpec feasible;
  bool operator==(const AssortmentRequest&) const = default;
};
using Demand = std::variant<MatchingEdges, BudgetedBids, AssortmentRequest>;

struct Arrival {
  int index = 0;
  double time = 0;
  Demand demand;
  bool operator==(const Arrival&) const = default;
};

struct Instance {
  Mode mode = Mode::matching;
  std::vector<Resource> resources;
  std::vector<Arrival> arrivals;
  std::vector<ChoiceModel> choice_models;
  bool operator==(const Instance&) const = default;

  // position of a resource id in `resources`, -1 if absent
  int position_of(int id) const {
    for (std::size_t i = 0; i < resources.size(); ++i)
      if (resources[i].id == id) return int(i);
    return -1;
  }
};

inline Mode mode_of(const Demand& d) {
  if (std::holds_alternative<MatchingEdges>(d)) return Mode::matching;
  if (std::holds_alternative<BudgetedBids>(d)) return Mode::budgeted;
  return Mode::assortment;
}

// (resource id, bid) pairs with bid >= 1; matching edges count as bid 1
inline std::vector<std::pair<int, int>> demand_edges(const Demand& d) {
  std::vector<std::pair<int, int>> out;
  if (auto m = std::get_if<MatchingEdges>(&d)) {
    for (int r : m->resources) out.emplace_back(r, 1);
  } else {
    const auto& bids = std::holds_alternative<BudgetedBids>(d) ? std::get<BudgetedBids>(d).bids
                                                               : std::get<AssortmentRequest>(d).bids;
    for (auto& [r, b] : bids)
      if (b >= 1) out.emplace_back(r, b);
  }
  return out;
}

inline std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> out;
  std::set<int> ids;
  for (const auto& r : inst.resources) {
    if (!ids.insert(r.id).second) out.push_back("duplicate resource id " + std::to_string(r.id));
    if (r.capacity < 1) out.push_back("capacity below 1 for resource " + std::to_string(r.id));
    if (!(r.reward >= 0) || !std::isfinite(r.reward))
      out.push_back("reward not a nonnegative real for resource " + std::to_string(r.id));
  }
  if (inst.mode != Mode::assortment && !inst.choice_models.empty())
    out.push_back("choice models present outside assortment mode");
  for (std::size_t k = 0; k < inst.choice_models.size(); ++k)
    for (auto& v : choice_model_violations(inst.choice_models[k]))
      out.push_back("choice model " + std::to_string(k) + ": " + v);

  for (std::size_t t = 0; t < inst.arrivals.size(); ++t) {
    const auto& a = inst.arrivals[t];
    const std::string at = " at arrival " + std::to_string(t);
    if (a.index != int(t)) out.push_back("arrival index mismatch" + at);
    if (!(a.time >= 0) || !std::isfinite(a.time)) out.push_back("time not a nonnegative real" + at);
    if (t > 0 && a.time < inst.arrivals[t - 1].time)
      out.push_back("times not nondecreasing at index " + std::to_string(t));
    if (mode_of(a.demand) != inst.mode) {
      out.push_back("demand does not match mode" + at);
      continue;
    }
    auto check_id = [&](int id) {
      if (!ids.count(id)) out.push_back("unknown resource " + std::to_string(id) + at);
    };
    if (auto m = std::get_if<MatchingEdges>(&a.demand)) {
      std::set<int> seen;
      for (int r : m->resources) {
        check_id(r);
        if (!seen.insert(r).second) out.push_back("duplicate edge to resource " + std::to_string(r) + at);
      }
    } else if (auto b = std::get_if<BudgetedBids>(&a.demand)) {
      for (auto& [r, bid] : b->bids) {
        check_id(r);
        if (bid < 0) out.push_back("negative bid for resource " + std::to_string(r) + at);
      }
    } else {
      const auto& req = std::get<AssortmentRequest>(a.demand);
      for (auto& [r, bid] : req.bids) {
        check_id(r);
        if (bid < 0) out.push_back("negative bid for resource " + std::to_string(r) + at);
      }
      if (req.choice_model < 0 || req.choice_model >= int(inst.choice_models.size())) {
        out.push_back("unknown choice model " + std::to_string(req.choice_model) + at);
      } else if (auto tab = std::get_if<ChoiceTable>(&inst.choice_models[std::size_t(req.choice_model)])) {
        for (auto& [r, bid] : req.bids)
          if (bid >= 1 && tab->position(r) < 0)
            out.push_back("resource " + std::to_string(r) + " missing from choice table" + at);
      }
      if (auto k = std::get_if<MaxCardinality>(&req.feasible)) {
        if (k->k < 0) out.push_back("negative cardinality bound" + at);
      } else if (auto lst = std::get_if<ExplicitList>(&req.feasible)) {
        std::set<std::vector<int>> family;
        for (auto s : lst->sets) {
          std::sort(s.begin(), s.end());
          family.insert(s);
        }
        bool closed = true;
        for (const auto& s : family) {
          for (std::size_t drop = 0; drop < s.size() && closed; ++drop) {
            auto sub = s;
            sub.erase(sub.begin() + std::ptrdiff_t(drop));
            if (!sub.empty() && !family.count(sub)) closed = false;
          }
        }
        if (!closed) out.push_back("feasible set list not downward closed" + at);
      }
    }
  }
  return out;
}

// min over edges with b >= 1 of c_i / b
inline double gamma(const Instance& inst) {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& a : inst.arrivals) {
    for (auto [id, b] : demand_edges(a.demand)) {
      int p = inst.position_of(id);
      if (p < 0) continue;
      g = std::min(g, double(inst.resources[std::size_t(p)].capacity) / double(b));
    }
  }
  if (!std::isfinite(g)) throw NoEdges("no arrival demands any resource");
  return g;
}

inline int min_capacity(const Instance& inst) {
  int c = std::numeric_limits<int>::max();
  for (const auto& r : inst.resources) c = std::min(c, r.capacity);
  return c;
}

// Indexed, read-only view used by the simulator and the policies. Resources
// are addressed by position in `inst.resources`; edge lists are sorted by
// resource id so that "first strictly better" scans break ties toward lower ids.
struct Edge {
  std::size_t resource;
  int bid;
};

class IndexedInstance {
 public:
  // keeps its own copy, so temporaries are fine
  explicit IndexedInstance(Instance instance)
      : inst_(std::make_shared<const Instance>(std::move(instance))) {
    const Instance& inst = *inst_;
    auto problems = validate(inst);
    if (!problems.empty()) throw InvalidArgument("invalid instance: " + problems.front());
    edges_.resize(inst.arrivals.size());
    for (std::size_t t = 0; t < inst.arrivals.size(); ++t) {
      for (auto [id, b] : demand_edges(inst.arrivals[t].demand))
        edges_[t].push_back({std::size_t(inst.position_of(id)), b});
      std::sort(edges_[t].begin(), edges_[t].end(), [&](const Edge& x, const Edge& y) {
        return inst.resources[x.resource].id < inst.resources[y.resource].id;
      });
    }
  }

  const Instance& instance() const { return *inst_; }
  Mode mode() const { return inst_->mode; }
  std::size_t num_resources() const { return inst_->resources.size(); }
  std::size_t num_arrivals() const { return inst_->arrivals.size(); }
  const Resource& resource(std::size_t r) const { return inst_->resources[r]; }
  const Arrival& arrival(std::size_t t) const { return inst_->arrivals[t]; }
  double time(std::size_t t) const { return inst_->arrivals[t].time; }
  const std::vector<Edge>& edges(std::size_t t) const { return edges_[t]; }
  int bid(std::size_t t, std::size_t r) const {
    for (const auto& e : edges_[t])
      if (e.resource == r) return e.bid;
    return 0;
  }

 private:
  std::shared_ptr<const Instance> inst_;
  std::vector<std::vector<Edge>> edges_;
};

}  // namespace ralloc
