#pragma once

// JSON encodings for instances, distributions, choice models and process specs.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "choice_model.hpp"
#include "distributions.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "randproc.hpp"

namespace ralloc {

using Json = nlohmann::json;

namespace detail {

inline Json finite_to_json(const FiniteUsage& f) {
  return std::visit(
      [](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) return {{"type", "deterministic"}, {"d", d.d}};
        else if constexpr (std::is_same_v<T, Exponential>) return {{"type", "exponential"}, {"rate", d.rate}};
        else if constexpr (std::is_same_v<T, Uniform>) return {{"type", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
        else return {{"type", "weibull"}, {"scale", d.scale}, {"shape", d.shape}};
      },
      f);
}

inline double num(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number())
    throw ParseError(std::string("missing or non-numeric field \"") + key + "\"");
  return j.at(key).get<double>();
}

inline int integer(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number_integer())
    throw ParseError(std::string("missing or non-integer field \"") + key + "\"");
  return j.at(key).get<int>();
}

inline std::string str(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string())
    throw ParseError(std::string("missing or non-string field \"") + key + "\"");
  return j.at(key).get<std::string>();
}

inline int parse_id(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad resource id \"" + s + "\"");
  }
  if (used != s.size()) throw ParseError("bad resource id \"" + s + "\"");
  return v;
}

inline FiniteUsage finite_from_json(const Json& j) {
  const std::string t = str(j, "type");
  if (t == "deterministic") return Deterministic{num(j, "d")};
  if (t == "exponential") return Exponential{num(j, "rate")};
  if (t == "uniform") return Uniform{num(j, "lo"), num(j, "hi")};
  if (t == "weibull") return WeibullIfr{num(j, "scale"), num(j, "shape")};
  throw ParseError("mixture base must be deterministic, exponential, uniform or weibull, got \"" + t + "\"");
}

inline std::string set_key(const std::vector<int>& ids) {
  std::string s = "{";
  for (std::size_t k = 0; k < ids.size(); ++k) s += (k ? "," : "") + std::to_string(ids[k]);
  return s + "}";
}

inline std::vector<int> parse_set_key(const std::string& key) {
  if (key.size() < 2 || key.front() != '{' || key.back() != '}') throw ParseError("bad subset key \"" + key + "\"");
  std::vector<int> out;
  std::stringstream ss(key.substr(1, key.size() - 2));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
    while (!tok.empty() && tok.back() == ' ') tok.pop_back();
    if (!tok.empty()) out.push_back(parse_id(tok));
  }
  return out;
}

inline Json bids_to_json(const std::map<int, int>& bids) {
  Json o = Json::object();
  for (auto& [r, b] : bids) o[std::to_string(r)] = b;
  return o;
}

inline std::map<int, int> bids_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("bids must be an object");
  std::map<int, int> out;
  for (auto& [k, v] : j.items()) {
    if (!v.is_number_integer()) throw ParseError("bid for " + k + " must be an integer");
    out[parse_id(k)] = v.get<int>();
  }
  return out;
}

}  // namespace detail

inline Json to_json(const UsageDistribution& u) {
  return std::visit(
      [](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) return {{"type", "deterministic"}, {"d", d.d}};
        else if constexpr (std::is_same_v<T, TwoPointInf>) return {{"type", "two_point_inf"}, {"d", d.d}, {"p", d.p}};
        else if constexpr (std::is_same_v<T, ZeroOrInf>) return {{"type", "zero_or_inf"}, {"p", d.p}};
        else if constexpr (std::is_same_v<T, Exponential>) return {{"type", "exponential"}, {"rate", d.rate}};
        else if constexpr (std::is_same_v<T, Uniform>) return {{"type", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
        else if constexpr (std::is_same_v<T, WeibullIfr>)
          return {{"type", "weibull"}, {"scale", d.scale}, {"shape", d.shape}};
        else if constexpr (std::is_same_v<T, MixtureWithInf>)
          return {{"type", "mixture_inf"}, {"p_finite", d.p_finite}, {"base", detail::finite_to_json(d.base)}};
        else return {{"type", "non_reusable"}};
      },
      u.variant());
}

inline UsageDistribution usage_from_json(const Json& j) {
  using namespace detail;
  const std::string t = str(j, "type");
  try {
    if (t == "deterministic") return Deterministic{num(j, "d")};
    if (t == "two_point_inf") return TwoPointInf{num(j, "d"), num(j, "p")};
    if (t == "zero_or_inf") return ZeroOrInf{num(j, "p")};
    if (t == "exponential") return Exponential{num(j, "rate")};
    if (t == "uniform") return Uniform{num(j, "lo"), num(j, "hi")};
    if (t == "weibull") return WeibullIfr{num(j, "scale"), num(j, "shape")};
    if (t == "non_reusable") return NonReusable{};
    if (t == "mixture_inf") {
      if (!j.contains("base")) throw ParseError("mixture_inf needs \"base\"");
      return MixtureWithInf{num(j, "p_finite"), finite_from_json(j.at("base"))};
    }
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid distribution: ") + e.what());
  }
  throw ParseError("unknown distribution type \"" + t + "\"");
}

inline Json to_json(const ChoiceModel& m) {
  if (auto mnl = std::get_if<Mnl>(&m)) {
    Json w = Json::object();
    for (auto& [id, v] : mnl->weights) w[std::to_string(id)] = v;
    return {{"type", "mnl"}, {"v0", mnl->v0}, {"weights", w}};
  }
  const auto& t = std::get<ChoiceTable>(m);
  Json phi = Json::object();
  for (auto& [mask, probs] : t.phi) {
    std::vector<int> ids;
    Json row = Json::object();
    for (std::size_t k = 0; k < t.items.size(); ++k) {
      if (!(mask >> k & 1u)) continue;
      ids.push_back(t.items[k]);
      row[std::to_string(t.items[k])] = probs[k];
    }
    phi[detail::set_key(ids)] = row;
  }
  return {{"type", "table"}, {"n", t.items.size()}, {"items", t.items}, {"phi", phi}};
}

inline ChoiceModel choice_model_from_json(const Json& j) {
  using namespace detail;
  const std::string type = str(j, "type");
  if (type == "mnl") {
    Mnl m;
    m.v0 = num(j, "v0");
    if (!j.contains("weights") || !j.at("weights").is_object()) throw ParseError("mnl needs a \"weights\" object");
    for (auto& [k, v] : j.at("weights").items()) {
      if (!v.is_number()) throw ParseError("mnl weight for " + k + " must be numeric");
      m.weights[parse_id(k)] = v.get<double>();
    }
    return m;
  }
  if (type == "table") {
    ChoiceTable t;
    if (j.contains("items")) {
      for (auto& v : j.at("items")) t.items.push_back(v.get<int>());
    } else {
      int n = integer(j, "n");
      for (int i = 1; i <= n; ++i) t.items.push_back(i);
    }
    std::sort(t.items.begin(), t.items.end());
    if (t.items.size() > 31) throw ParseError("choice table over more than 31 items");
    if (!j.contains("phi") || !j.at("phi").is_object()) throw ParseError("table needs a \"phi\" object");
    for (auto& [key, row] : j.at("phi").items()) {
      std::uint32_t mask = 0;
      try {
        mask = t.mask_of(parse_set_key(key));
      } catch (const ElementNotInSet& e) {
        throw ParseError(std::string("table subset ") + key + ": " + e.what());
      }
      std::vector<double> probs(t.items.size(), 0.0);
      for (auto& [id, v] : row.items()) {
        int pos = t.position(parse_id(id));
        if (pos < 0 || !(mask >> pos & 1u)) throw ParseError("table row " + key + " names item " + id + " outside it");
        probs[std::size_t(pos)] = v.get<double>();
      }
      t.phi[mask] = probs;
    }
    return t;
  }
  throw ParseError("unknown choice model type \"" + type + "\"");
}

inline Json to_json(const FeasibleSetSpec& f) {
  if (std::holds_alternative<AllSubsets>(f)) return {{"type", "all"}};
  if (auto k = std::get_if<MaxCardinality>(&f)) return {{"type", "max_cardinality"}, {"k", k->k}};
  return {{"type", "explicit"}, {"sets", std::get<ExplicitList>(f).sets}};
}

inline FeasibleSetSpec feasible_from_json(const Json& j) {
  const std::string t = detail::str(j, "type");
  if (t == "all") return AllSubsets{};
  if (t == "max_cardinality") return MaxCardinality{detail::integer(j, "k")};
  if (t == "explicit") {
    ExplicitList l;
    for (auto& s : j.at("sets")) {
      std::vector<int> set = s.get<std::vector<int>>();
      std::sort(set.begin(), set.end());
      l.sets.push_back(set);
    }
    return l;
  }
  throw ParseError("unknown feasible set type \"" + t + "\"");
}

inline Json to_json(const Demand& d) {
  if (auto m = std::get_if<MatchingEdges>(&d)) return {{"type", "matching"}, {"resources", m->resources}};
  if (auto b = std::get_if<BudgetedBids>(&d)) return {{"type", "budgeted"}, {"bids", detail::bids_to_json(b->bids)}};
  const auto& a = std::get<AssortmentRequest>(d);
  return {{"type", "assortment"},
          {"choice_model", a.choice_model},
          {"bids", detail::bids_to_json(a.bids)},
          {"feasible", to_json(a.feasible)}};
}

inline Demand demand_from_json(const Json& j) {
  const std::string t = detail::str(j, "type");
  if (t == "matching") {
    if (!j.contains("resources") || !j.at("resources").is_array()) throw ParseError("matching demand needs \"resources\"");
    return MatchingEdges{j.at("resources").get<std::vector<int>>()};
  }
  if (t == "budgeted") return BudgetedBids{detail::bids_from_json(j.at("bids"))};
  if (t == "assortment") {
    AssortmentRequest a;
    a.choice_model = detail::integer(j, "choice_model");
    a.bids = detail::bids_from_json(j.at("bids"));
    a.feasible = j.contains("feasible") ? feasible_from_json(j.at("feasible")) : FeasibleSetSpec{AllSubsets{}};
    return a;
  }
  throw ParseError("unknown demand type \"" + t + "\"");
}

inline Mode mode_from_name(const std::string& s) {
  if (s == "matching") return Mode::matching;
  if (s == "budgeted") return Mode::budgeted;
  if (s == "assortment") return Mode::assortment;
  throw ParseError("unknown mode \"" + s + "\"");
}

inline Json to_json(const Instance& inst) {
  Json res = Json::array();
  for (const auto& r : inst.resources)
    res.push_back({{"id", r.id}, {"capacity", r.capacity}, {"reward", r.reward}, {"usage", to_json(r.usage)}});
  Json arr = Json::array();
  for (const auto& a : inst.arrivals) arr.push_back({{"time", a.time}, {"demand", to_json(a.demand)}});
  Json cms = Json::array();
  for (const auto& m : inst.choice_models) cms.push_back(to_json(m));
  return {{"mode", mode_name(inst.mode)}, {"resources", res}, {"arrivals", arr}, {"choice_models", cms}};
}

inline Instance instance_from_json(const Json& j) {
  using namespace detail;
  Instance inst;
  try {
    inst.mode = mode_from_name(str(j, "mode"));
    if (!j.contains("resources") || !j.at("resources").is_array()) throw ParseError("missing \"resources\" array");
    for (const auto& r : j.at("resources")) {
      if (!r.contains("usage")) throw ParseError("resource without \"usage\"");
      inst.resources.push_back({integer(r, "id"), integer(r, "capacity"), num(r, "reward"), usage_from_json(r.at("usage"))});
    }
    if (!j.contains("arrivals") || !j.at("arrivals").is_array()) throw ParseError("missing \"arrivals\" array");
    int index = 0;
    for (const auto& a : j.at("arrivals")) {
      if (!a.contains("demand")) throw ParseError("arrival without \"demand\"");
      inst.arrivals.push_back({index++, num(a, "time"), demand_from_json(a.at("demand"))});
    }
    if (j.contains("choice_models"))
      for (const auto& m : j.at("choice_models")) inst.choice_models.push_back(choice_model_from_json(m));
  } catch (const Json::exception& e) {
    throw ParseError(e.what());
  }
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what());
  }
  return instance_from_json(j);
}

inline std::string dump_instance(const Instance& inst, int indent = -1) { return to_json(inst).dump(indent); }

inline Json to_json(const ProcessSpec& s) { return {{"F", to_json(s.F)}, {"times", s.times}, {"probs", s.probs}}; }

inline ProcessSpec process_spec_from_json(const Json& j) {
  try {
    if (!j.contains("F")) throw ParseError("process spec needs \"F\"");
    ProcessSpec s{usage_from_json(j.at("F")), j.at("times").get<std::vector<double>>(),
                  j.at("probs").get<std::vector<double>>()};
    return s;
  } catch (const Json::exception& e) {
    throw ParseError(e.what());
  }
}

// FNV-1a, 64 bit
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace ralloc
