#pragma once

// Empirical check of the LP-free certificate: candidate (lambda, theta) built
// from fluid guide or RBA traces, tested against an offline policy's sample paths.
//   (1)  sum theta + sum lambda <= beta * ALG
//   (3)  theta_i + E[sum_{t in O(w,i)} lambda_t] >= alpha * OPT_i   for all i
// This is a diagnostic over Monte-Carlo estimates, not a proof.

#include <cmath>
#include <string>
#include <vector>

#include "engine.hpp"
#include "fluid_guide.hpp"
#include "policies.hpp"
#include "stats.hpp"

namespace ralloc {

enum class CertificateAlg { galg, rba };

struct CertificateOptions {
  double alpha = 0;
  double beta = 1;
  std::size_t trials = 1000;  // OPT sample paths (and RBA paths for the rba candidate)
  std::uint64_t seed = 1;
  bool swap_roles = false;  // negative control: lambda and theta swap their unit weights
};

struct ResourceCheck {
  int id = 0;
  double theta = 0;
  double lambda_on_opt = 0;  // E[sum over OPT's matches to i of lambda_t]
  double opt_reward = 0;     // OPT_i
  double lhs = 0;
  double rhs = 0;
  double se = 0;
  bool pass = false;
};

struct CertificateReport {
  std::vector<ResourceCheck> resources;
  double cond1_lhs = 0;
  double cond1_rhs = 0;
  double cond1_se = 0;
  bool cond1_pass = false;
  bool cond3_pass = false;
  bool pass = false;
};

namespace detail {

struct Candidate {
  std::vector<double> lambda;  // per arrival
  std::vector<double> theta;   // per resource
  double alg = 0;
  double cond1_slack_mean = 0;  // mean of (sum theta + sum lambda - beta * ALG) per path
  double cond1_slack_se = 0;
  std::vector<double> theta_se;
};

inline double g(double x) { return std::exp(-x); }

inline Candidate galg_candidate(const IndexedInstance& p, double beta, bool swap) {
  Candidate c;
  c.lambda.assign(p.num_arrivals(), 0.0);
  c.theta.assign(p.num_resources(), 0.0);
  c.theta_se.assign(p.num_resources(), 0.0);
  auto run = run_guide(p);
  for (std::size_t t = 0; t < run.steps.size(); ++t) {
    for (const auto& u : run.steps[t].units) {
      const auto& res = p.resource(u.resource);
      const double ci = res.capacity;
      const double gk = g(u.rank / ci);
      const double scale = ci * std::expm1(1.0 / ci);
      const double lam_w = swap ? gk : 1.0 - gk;
      const double th_w = swap ? 1.0 - gk : gk;
      c.lambda[t] += res.reward * u.amount * lam_w;
      c.theta[u.resource] += scale * res.reward * u.amount * th_w;
    }
  }
  c.alg = run.total_reward;
  double s = 0;
  for (double v : c.lambda) s += v;
  for (double v : c.theta) s += v;
  c.cond1_slack_mean = s - beta * c.alg;
  return c;
}

inline Candidate rba_candidate(const IndexedInstance& p, double beta, bool swap, std::size_t trials,
                               std::uint64_t seed) {
  Candidate c;
  const std::size_t T = p.num_arrivals(), n = p.num_resources();
  std::vector<std::vector<double>> theta_paths(n, std::vector<double>(trials, 0.0));
  std::vector<double> slack(trials, 0.0), rewards(trials, 0.0);
  c.lambda.assign(T, 0.0);
  Rba rba;
  for (std::size_t k = 0; k < trials; ++k) {
    auto tr = simulate(p, rba, seed, k);
    double s = 0;
    for (const auto& rec : tr.records) {
      if (rec.kind != DecisionKind::allocate) continue;
      std::size_t r = std::size_t(p.instance().position_of(rec.resource));
      const auto& res = p.resource(r);
      double gz = g(rec.units.front() / double(res.capacity));
      double lam = res.reward * (swap ? gz : 1.0 - gz);
      double th = res.reward * (swap ? 1.0 - gz : gz);
      c.lambda[rec.arrival] += lam / double(trials);
      theta_paths[r][k] += th;
      s += lam + th;
    }
    rewards[k] = tr.total_reward;
    slack[k] = s - beta * tr.total_reward;
  }
  for (std::size_t r = 0; r < n; ++r) {
    auto m = mean_se(theta_paths[r]);
    c.theta.push_back(m.mean);
    c.theta_se.push_back(m.se);
  }
  c.alg = mean_se(rewards).mean;
  auto sl = mean_se(slack);
  c.cond1_slack_mean = sl.mean;
  c.cond1_slack_se = sl.se;
  return c;
}

}  // namespace detail

template <Policy Opt>
CertificateReport certificate_check(const IndexedInstance& p, CertificateAlg alg, const Opt& opt_policy,
                                    const CertificateOptions& o) {
  if (p.mode() != Mode::matching) throw UnsupportedMode("certificate check is defined for matching mode");
  detail::Candidate cand = alg == CertificateAlg::galg
                               ? detail::galg_candidate(p, o.beta, o.swap_roles)
                               : detail::rba_candidate(p, o.beta, o.swap_roles, o.trials, o.seed);
  const std::size_t n = p.num_resources();
  // per OPT path: sum of lambda over arrivals matched to i, minus alpha * reward from i
  std::vector<std::vector<double>> diff(n, std::vector<double>(o.trials, 0.0));
  std::vector<std::vector<double>> lam(n, std::vector<double>(o.trials, 0.0));
  std::vector<std::vector<double>> rew(n, std::vector<double>(o.trials, 0.0));
  const std::uint64_t opt_seed = derive_seed(o.seed, StreamPurpose::generator, 0xC0FFEE);
  for (std::size_t k = 0; k < o.trials; ++k) {
    auto tr = simulate(p, opt_policy, opt_seed, k);
    for (const auto& rec : tr.records) {
      if (rec.kind != DecisionKind::allocate) continue;
      std::size_t r = std::size_t(p.instance().position_of(rec.resource));
      lam[r][k] += cand.lambda[rec.arrival];
      rew[r][k] += rec.reward;
    }
    for (std::size_t r = 0; r < n; ++r) diff[r][k] = lam[r][k] - o.alpha * rew[r][k];
  }
  CertificateReport rep;
  rep.cond3_pass = true;
  for (std::size_t r = 0; r < n; ++r) {
    ResourceCheck rc;
    rc.id = p.resource(r).id;
    rc.theta = cand.theta[r];
    rc.lambda_on_opt = mean_se(lam[r]).mean;
    rc.opt_reward = mean_se(rew[r]).mean;
    auto d = mean_se(diff[r]);
    rc.lhs = rc.theta + rc.lambda_on_opt;
    rc.rhs = o.alpha * rc.opt_reward;
    rc.se = std::sqrt(d.se * d.se + cand.theta_se[r] * cand.theta_se[r]);
    rc.pass = rc.theta + d.mean >= -3.0 * rc.se;
    rep.cond3_pass = rep.cond3_pass && rc.pass;
    rep.resources.push_back(rc);
  }
  double s = 0;
  for (double v : cand.lambda) s += v;
  for (double v : cand.theta) s += v;
  rep.cond1_lhs = s;
  rep.cond1_rhs = o.beta * cand.alg;
  rep.cond1_se = cand.cond1_slack_se;
  rep.cond1_pass = cand.cond1_slack_mean <= 3.0 * cand.cond1_slack_se + 1e-9 * std::max(1.0, rep.cond1_rhs);
  rep.pass = rep.cond1_pass && rep.cond3_pass;
  return rep;
}

}  // namespace ralloc
