#pragma once

// Dense tableau simplex for  max c.x  s.t.  A x <= b,  x >= 0.
// Dantzig pricing; after a run of degenerate pivots it switches to Bland's
// rule until the objective moves again, which rules out cycling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ralloc {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    default: return "iteration_limit";
  }
}

struct DenseLp {
  std::size_t rows = 0, cols = 0;
  std::vector<double> A;  // row-major rows x cols
  std::vector<double> b, c;

  double& at(std::size_t i, std::size_t j) { return A[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return A[i * cols + j]; }
};

struct SimplexOptions {
  std::size_t max_pivots = 1000000;
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  std::size_t degenerate_run = 50;  // degenerate pivots before Bland takes over
};

struct SimplexResult {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t m, std::size_t width) : basis_(m), m_(m), w_(width), T_(m * width, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return T_[i * w_ + j]; }
  double at(std::size_t i, std::size_t j) const { return T_[i * w_ + j]; }
  std::size_t rhs() const { return w_ - 1; }

  std::vector<std::size_t> basis_;
  std::vector<double> d;  // reduced costs per column
  double value = 0;

  void pivot(std::size_t r, std::size_t q) {
    double* row = &T_[r * w_];
    const double inv = 1.0 / row[q];
    nz_.clear();
    for (std::size_t j = 0; j < w_; ++j) {
      if (row[j] != 0.0) {
        row[j] *= inv;
        nz_.push_back(j);
      }
    }
    row[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* ri = &T_[i * w_];
      const double f = ri[q];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) {
        double v = ri[j] - f * row[j];
        ri[j] = std::abs(v) < 1e-13 ? 0.0 : v;
      }
      ri[q] = 0.0;
    }
    const double fq = d[q];
    if (fq != 0.0) {
      for (std::size_t j : nz_) {
        if (j == rhs()) continue;
        d[j] -= fq * row[j];
      }
      d[q] = 0.0;
      value += fq * row[rhs()];
    }
    basis_[r] = q;
  }

  // runs the simplex loop over columns [0, eligible_cols)
  LpStatus optimize(const SimplexOptions& opt, std::size_t eligible_cols, std::size_t& pivots) {
    std::size_t degenerate = 0;
    bool bland = false;
    while (true) {
      std::size_t q = eligible_cols;
      double best = opt.opt_tol;
      for (std::size_t j = 0; j < eligible_cols; ++j) {
        if (d[j] > best) {
          q = j;
          if (bland) break;
          best = d[j];
        }
      }
      if (q == eligible_cols) return LpStatus::optimal;
      if (pivots >= opt.max_pivots) return LpStatus::iteration_limit;
      std::size_t r = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        double a = at(i, q);
        if (a <= opt.feas_tol) continue;
        double rt = std::max(at(i, rhs()), 0.0) / a;
        if (r == m_ || rt < ratio - 1e-12) {
          r = i;
          ratio = rt;
        } else if (rt <= ratio + 1e-12) {
          bool take = bland ? basis_[i] < basis_[r] : a > at(r, q);
          if (take) {
            r = i;
            ratio = std::min(ratio, rt);
          }
        }
      }
      if (r == m_) return LpStatus::unbounded;
      const bool degen = ratio <= 1e-12;
      pivot(r, q);
      ++pivots;
      if (degen) {
        if (++degenerate >= opt.degenerate_run) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
    }
  }

 private:
  std::size_t m_, w_;
  std::vector<double> T_;
  std::vector<std::size_t> nz_;
};

}  // namespace detail

struct SparseLp {
  std::size_t cols = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::vector<double> b, c;
};

inline SimplexResult simplex_max(const SparseLp& lp, const SimplexOptions& opt = {}) {
  const std::size_t m = lp.rows.size(), n = lp.cols;
  if (lp.b.size() != m || lp.c.size() != n) throw InvalidArgument("LP dimensions disagree");
  for (const auto& row : lp.rows)
    for (auto [j, v] : row)
      if (j >= n || !std::isfinite(v)) throw InvalidArgument("LP row entry out of range or not finite");
  std::vector<std::size_t> art_rows;
  for (std::size_t i = 0; i < m; ++i)
    if (lp.b[i] < 0) art_rows.push_back(i);
  const std::size_t na = art_rows.size();
  const std::size_t width = n + m + na + 1;
  detail::Tableau tab(m, width);
  const std::size_t rhs = width - 1;

  std::size_t a_next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = lp.b[i] < 0 ? -1.0 : 1.0;
    for (auto [j, v] : lp.rows[i]) tab.at(i, j) += sign * v;
    tab.at(i, n + i) = sign;
    tab.at(i, rhs) = sign * lp.b[i];
    if (sign < 0) {
      tab.at(i, n + m + a_next) = 1.0;
      tab.basis_[i] = n + m + a_next;
      ++a_next;
    } else {
      tab.basis_[i] = n + i;
    }
  }

  SimplexResult res;
  if (na > 0) {  // phase 1: maximize -sum(artificials)
    tab.d.assign(width, 0.0);
    tab.value = 0;
    for (std::size_t i : art_rows) {
      for (std::size_t j = 0; j < n + m; ++j) tab.d[j] += tab.at(i, j);
      tab.value -= tab.at(i, rhs);
    }
    auto st = tab.optimize(opt, n + m, res.pivots);
    if (st == LpStatus::iteration_limit) {
      res.status = st;
      return res;
    }
    if (tab.value < -opt.feas_tol * std::max(1.0, double(m))) {
      res.status = LpStatus::infeasible;
      return res;
    }
    for (std::size_t i = 0; i < m; ++i) {  // push zero-level artificials out where possible
      if (tab.basis_[i] < n + m) continue;
      for (std::size_t j = 0; j < n + m; ++j) {
        if (std::abs(tab.at(i, j)) > 1e-9) {
          tab.pivot(i, j);
          ++res.pivots;
          break;
        }
      }
    }
  }

  tab.d.assign(width, 0.0);
  for (std::size_t j = 0; j < n; ++j) tab.d[j] = lp.c[j];
  tab.value = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t bi = tab.basis_[i];
    double cb = bi < n ? lp.c[bi] : 0.0;
    if (cb == 0) continue;
    for (std::size_t j = 0; j < n + m; ++j) tab.d[j] -= cb * tab.at(i, j);
    tab.value += cb * tab.at(i, rhs);
  }
  for (std::size_t i = 0; i < m; ++i) tab.d[tab.basis_[i]] = 0.0;
  res.status = tab.optimize(opt, n + m, res.pivots);
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis_[i] < n) res.x[tab.basis_[i]] = std::max(tab.at(i, rhs), 0.0);
  res.objective = 0;
  for (std::size_t j = 0; j < n; ++j) res.objective += lp.c[j] * res.x[j];
  return res;
}


inline SimplexResult simplex_max(const DenseLp& lp, const SimplexOptions& opt = {}) {
  if (lp.A.size() != lp.rows * lp.cols) throw InvalidArgument("LP dimensions disagree");
  SparseLp sp;
  sp.cols = lp.cols;
  sp.b = lp.b;
  sp.c = lp.c;
  sp.rows.resize(lp.rows);
  for (std::size_t i = 0; i < lp.rows; ++i)
    for (std::size_t j = 0; j < lp.cols; ++j)
      if (lp.at(i, j) != 0) sp.rows[i].emplace_back(j, lp.at(i, j));
  return simplex_max(sp, opt);
}

}  // namespace ralloc
