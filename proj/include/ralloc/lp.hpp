#pragma once

// Natural LP over edges (i,t):
//   max  sum r_i b_it y_it
//   s.t. sum_{t<=tau} [1 - F_i(a(tau) - a(t))] b_it y_it <= c_i   for every (i, tau)
//        sum_i y_it <= 1                                          for every t
// (b_it = 1 in matching mode). The demand rows make y <= 1 redundant.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "engine.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "policies.hpp"
#include "simplex.hpp"

namespace ralloc {

struct LpVar {
  std::size_t arrival;
  std::size_t resource;  // position
  int bid;
};

struct LpRow {
  enum class Kind { capacity, demand } kind;
  std::size_t resource = 0;  // capacity rows
  std::size_t tau = 0;       // arrival index of the row
  std::vector<std::pair<std::size_t, double>> coefs;
  double rhs = 0;
};

struct LpModel {
  std::vector<LpVar> vars;
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::size_t rows_before_pruning = 0;
};

struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0;
  std::vector<double> y;  // per variable
  std::size_t pivots = 0;
};

inline LpModel build_lp(const IndexedInstance& p) {
  if (p.mode() == Mode::assortment) throw UnsupportedMode("no LP for assortment mode");
  LpModel m;
  const std::size_t T = p.num_arrivals(), n = p.num_resources();
  m.rows_before_pruning = n * T + T;
  // variables and per-resource edge lists (arrival, var)
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_res(n);
  for (std::size_t t = 0; t < T; ++t) {
    for (const auto& e : p.edges(t)) {
      by_res[e.resource].emplace_back(t, m.vars.size());
      m.vars.push_back({t, e.resource, e.bid});
      m.objective.push_back(p.resource(e.resource).reward * e.bid);
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    const auto& F = p.resource(r).usage;
    const auto& E = by_res[r];
    // A row at an arrival without an edge to r is implied by the row at the
    // previous edge (same support, coefficients no larger), so rows sit at edges.
    std::vector<bool> keep(E.size(), true);
    for (std::size_t k = 0; k + 1 < E.size(); ++k) {
      // implied by the next row when every coefficient it shares is equal
      const double at = p.time(E[k].first), next = p.time(E[k + 1].first);
      bool same = true;
      for (std::size_t j = 0; j <= k && same; ++j) {
        double a = p.time(E[j].first);
        same = F.cdf(at - a) == F.cdf(next - a);
      }
      keep[k] = !same;
    }
    for (std::size_t k = 0; k < E.size(); ++k) {
      if (!keep[k]) continue;
      LpRow row{LpRow::Kind::capacity, r, E[k].first, {}, double(p.resource(r).capacity)};
      const double at = p.time(E[k].first);
      for (std::size_t j = 0; j <= k; ++j) {
        double coef = (1.0 - F.cdf(at - p.time(E[j].first))) * m.vars[E[j].second].bid;
        if (coef != 0) row.coefs.emplace_back(E[j].second, coef);
      }
      m.rows.push_back(std::move(row));
    }
  }
  std::vector<LpRow> demand(T);
  for (std::size_t t = 0; t < T; ++t) demand[t] = {LpRow::Kind::demand, 0, t, {}, 1.0};
  for (std::size_t v = 0; v < m.vars.size(); ++v) demand[m.vars[v].arrival].coefs.emplace_back(v, 1.0);
  for (auto& d : demand)
    if (!d.coefs.empty()) m.rows.push_back(std::move(d));
  return m;
}

inline LpSolution solve_lp(const LpModel& m, const SimplexOptions& opt = {}) {
  SparseLp sp;
  sp.cols = m.vars.size();
  sp.c = m.objective;
  for (const auto& row : m.rows) {
    sp.rows.push_back(row.coefs);
    sp.b.push_back(row.rhs);
  }
  auto res = simplex_max(sp, opt);
  return {res.status, res.objective, std::move(res.x), res.pivots};
}

// largest violation of any row or bound by y
inline double lp_violation(const LpModel& m, const std::vector<double>& y) {
  double worst = 0;
  for (double v : y) worst = std::max(worst, -v);
  for (const auto& row : m.rows) {
    double s = 0;
    for (auto [j, c] : row.coefs) s += c * y[j];
    worst = std::max(worst, s - row.rhs);
  }
  return worst;
}

inline double lp_value(const IndexedInstance& p) {
  auto sol = solve_lp(build_lp(p));
  if (sol.status != LpStatus::optimal) throw Error(std::string("LP not solved: ") + lp_status_name(sol.status));
  return sol.objective;
}

// sqrt(ln c / c), 0 when ln c <= 0
inline double rounding_delta(double c_min) {
  double l = std::log(c_min);
  return l > 0 ? std::sqrt(l / c_min) : 0.0;
}

// Offline rounding of an LP optimum: arrival t samples i with prob y_it/(1+2 delta).
class LpRounding {
 public:
  LpRounding(const IndexedInstance& p, const LpModel& m, const LpSolution& s) {
    if (p.mode() != Mode::matching) throw UnsupportedMode("LP rounding is defined for matching mode");
    delta_ = rounding_delta(double(min_capacity(p.instance())));
    y_.resize(p.num_arrivals());
    for (std::size_t v = 0; v < m.vars.size(); ++v)
      if (s.y[v] > 0) y_[m.vars[v].arrival].emplace_back(m.vars[v].resource, s.y[v]);
    for (auto& row : y_)
      std::sort(row.begin(), row.end(), [&](auto& a, auto& b) {
        return p.resource(a.first).id < p.resource(b.first).id;
      });
  }
  static LpRounding from_instance(const IndexedInstance& p) {
    auto m = build_lp(p);
    auto s = solve_lp(m);
    if (s.status != LpStatus::optimal) throw Error(std::string("LP not solved: ") + lp_status_name(s.status));
    return LpRounding(p, m, s);
  }

  double delta() const { return delta_; }

  Decision decide(const ArrivalContext& c) const {
    double u = c.rng.uniform(), acc = 0;
    for (auto [r, y] : y_[c.t]) {
      acc += y / (1.0 + 2.0 * delta_);
      if (u < acc) {
        if (c.inventory.available(r) > 0) return Allocate{r, {c.inventory.top(r)}};
        return Blocked{r};
      }
    }
    return NoAction{};
  }

 private:
  std::vector<std::vector<std::pair<std::size_t, double>>> y_;
  double delta_ = 0;
};

}  // namespace ralloc
