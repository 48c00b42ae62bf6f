#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace ralloc {

// phi(S, i) = v_i / (v0 + sum_{j in S} v_j); ids absent from weights have v = 0
struct Mnl {
  double v0 = 0;
  std::map<int, double> weights;

  double weight(int id) const {
    auto it = weights.find(id);
    return it == weights.end() ? 0.0 : it->second;
  }
  bool operator==(const Mnl&) const = default;
};

// Explicit phi table over a small ground set. Subsets are bit masks over
// `items` (sorted ids); a missing subset means nobody buys anything.
struct ChoiceTable {
  std::vector<int> items;
  std::map<std::uint32_t, std::vector<double>> phi;  // mask -> prob per item position

  int position(int id) const {
    auto it = std::lower_bound(items.begin(), items.end(), id);
    if (it == items.end() || *it != id) return -1;
    return int(it - items.begin());
  }

  std::uint32_t mask_of(const std::vector<int>& set) const {
    std::uint32_t m = 0;
    for (int id : set) {
      int p = position(id);
      if (p < 0) throw ElementNotInSet("item " + std::to_string(id) + " is not in the table");
      m |= 1u << p;
    }
    return m;
  }

  double lookup(std::uint32_t mask, int pos) const {
    auto it = phi.find(mask);
    if (it == phi.end()) return 0.0;
    return it->second[std::size_t(pos)];
  }
  bool operator==(const ChoiceTable&) const = default;
};

using ChoiceModel = std::variant<Mnl, ChoiceTable>;

// `set` is a list of distinct ids (any order); `item` must belong to it
inline double choice_prob(const ChoiceModel& model, const std::vector<int>& set, int item) {
  if (std::find(set.begin(), set.end(), item) == set.end())
    throw ElementNotInSet("item " + std::to_string(item) + " not in offered set");
  if (auto m = std::get_if<Mnl>(&model)) {
    double denom = m->v0;
    for (int j : set) denom += m->weight(j);
    if (denom <= 0) return 0.0;
    return m->weight(item) / denom;
  }
  const auto& t = std::get<ChoiceTable>(model);
  return t.lookup(t.mask_of(set), t.position(item));
}

// Structural problems of a model, as text. Weak substitution is checked
// exhaustively for tables with at most 16 items.
inline std::vector<std::string> choice_model_violations(const ChoiceModel& model) {
  std::vector<std::string> out;
  if (auto m = std::get_if<Mnl>(&model)) {
    if (!(m->v0 >= 0)) out.push_back("mnl v0 negative");
    for (auto& [id, w] : m->weights)
      if (!(w >= 0)) out.push_back("mnl weight negative for item " + std::to_string(id));
    return out;
  }
  const auto& t = std::get<ChoiceTable>(model);
  if (!std::is_sorted(t.items.begin(), t.items.end()) ||
      std::adjacent_find(t.items.begin(), t.items.end()) != t.items.end())
    out.push_back("table items must be sorted and distinct");
  if (t.items.size() > 20) {
    out.push_back("table has more than 20 items");
    return out;
  }
  const std::uint32_t full = t.items.size() == 32 ? ~0u : ((1u << t.items.size()) - 1);
  for (auto& [mask, probs] : t.phi) {
    if ((mask & ~full) != 0 || probs.size() != t.items.size()) {
      out.push_back("malformed table row " + std::to_string(mask));
      continue;
    }
    double sum = 0;
    for (std::size_t p = 0; p < probs.size(); ++p) {
      bool inside = mask >> p & 1u;
      if (!inside && probs[p] != 0) out.push_back("table gives mass to an item outside its set");
      if (probs[p] < 0 || probs[p] > 1) out.push_back("table probability outside [0,1]");
      sum += probs[p];
    }
    if (sum > 1 + 1e-12) out.push_back("table row sums above 1 for mask " + std::to_string(mask));
  }
  if (t.items.size() <= 16) {
    const std::size_t n = t.items.size();
    for (std::uint32_t s = 1; s <= full; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!(s >> i & 1u)) continue;
        double base = t.lookup(s, int(i));
        for (std::size_t j = 0; j < n; ++j) {
          if (s >> j & 1u) continue;
          if (t.lookup(s | 1u << j, int(i)) > base + 1e-12) {
            out.push_back("weak substitution fails: adding item " + std::to_string(t.items[j]) +
                          " raises item " + std::to_string(t.items[i]) + " in mask " + std::to_string(s));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace ralloc
