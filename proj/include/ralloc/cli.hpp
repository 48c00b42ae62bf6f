#pragma once

// Command-line front end. run_cli returns the process exit code:
// 0 ok, 2 configuration error, 1 anything else.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "assortment.hpp"
#include "certificate.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "fluid_guide.hpp"
#include "generators.hpp"
#include "json_io.hpp"
#include "lp.hpp"
#include "policies.hpp"
#include "randproc.hpp"

namespace ralloc {

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

inline const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = {"greedy", "balance", "rba", "rba_budgeted", "salg",
                                                 "galg_fast_quant:<eps>", "galg_fast_thresh:<eps>",
                                                 "lp_rounding", "astalg", "rba_assortment"};
  return names;
}

inline AnyPolicy make_policy(const std::string& name, const IndexedInstance& p) {
  auto need = [&](Mode m) {
    if (p.mode() != m)
      throw ConfigError("policy " + name + " needs " + mode_name(m) + " mode, instance is " + mode_name(p.mode()));
  };
  auto eps_of = [&](const std::string& prefix) {
    std::string rest = name.substr(prefix.size());
    try {
      std::size_t used = 0;
      double e = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(rest);
      return e;
    } catch (const std::exception&) {
      throw ConfigError("bad epsilon in policy name " + name);
    }
  };
  if (name == "greedy") return erase_policy(name, Greedy{});
  if (name == "balance") return erase_policy(name, Balance{});
  if (name == "rba") return erase_policy(name, Rba{});
  if (name == "rba_budgeted") return erase_policy(name, RbaBudgeted{});
  if (name == "salg") {
    need(Mode::matching);
    return erase_policy(name, Salg(p));
  }
  if (name.rfind("galg_fast_quant:", 0) == 0) {
    need(Mode::matching);
    double e = eps_of("galg_fast_quant:");
    if (!(e > 0)) throw ConfigError("quantization eps must be positive");
    return erase_policy(name, Salg(p, {GuideVariant::quantized, e}));
  }
  if (name.rfind("galg_fast_thresh:", 0) == 0) {
    need(Mode::matching);
    double e = eps_of("galg_fast_thresh:");
    if (!(e > 0 && e < 1)) throw ConfigError("threshold eps must be in (0,1)");
    return erase_policy(name, Salg(p, {GuideVariant::threshold, e}));
  }
  if (name == "lp_rounding") {
    need(Mode::matching);
    return erase_policy(name, LpRounding::from_instance(p));
  }
  if (name == "astalg") {
    need(Mode::assortment);
    return erase_policy(name, Astalg(p));
  }
  if (name == "rba_assortment") {
    need(Mode::assortment);
    return erase_policy(name, RbaAssortment{});
  }
  throw ConfigError("unknown policy \"" + name + "\"");
}

namespace detail {

struct GenArgs {
  std::string name;
  int n = 10;
  int c = 10;
  double mu = 1.0;
  double p = 0.5;
  bool dummies = false;
  std::uint64_t seed = 1;
  std::size_t index = 0;
  std::string instance;  // source graph for stochastic_rewards
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

inline Instance generate(const GenArgs& g) {
  if (g.name == "example_a1") return example_a1(g.n, g.dummies);
  if (g.name == "example_a2") return example_a2(g.n, g.mu);
  if (g.name == "omniscient_gap") return omniscient_gap(g.n);
  if (g.name == "upper_triangular") return upper_triangular(g.n, g.c);
  if (g.name == "mnl_counterexample") return mnl_counterexample();
  if (g.name == "stochastic_rewards") {
    if (g.instance.empty()) throw ConfigError("stochastic_rewards needs --instance");
    return stochastic_rewards_to_reuse(load_instance(g.instance), g.p);
  }
  if (g.name == "battery") {
    BatteryParams bp;
    bp.count = g.index + 1;
    auto b = random_battery(bp, g.seed);
    return b[g.index];
  }
  throw ConfigError("unknown generator \"" + g.name + "\"");
}

inline void add_gen_options(CLI::App* app, GenArgs& g) {
  app->add_option("--n", g.n, "size parameter");
  app->add_option("--c", g.c, "capacity (upper_triangular)");
  app->add_option("--mu", g.mu, "exponential rate (example_a2)");
  app->add_option("--p", g.p, "success probability (stochastic_rewards)");
  app->add_flag("--dummies", g.dummies, "example_a1 dummy resources");
  app->add_option("--battery-seed", g.seed, "battery seed");
  app->add_option("--battery-index", g.index, "instance index within the battery");
}

inline unsigned default_threads() {
  if (const char* s = std::getenv("REUSE_ALLOC_THREADS")) {
    try {
      int v = std::stoi(s);
      if (v >= 1) return unsigned(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

inline std::vector<std::string> split_names(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& s : raw) {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for online allocation of reusable resources"};
  app.require_subcommand(1);

  // shared by run / compare
  std::string instance_path, out_path, trace_path;
  detail::GenArgs gen;
  std::vector<std::string> policies_raw;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = detail::default_threads();
  bool shared_duration = false, print_y = false, swap = false;
  std::string alg = "galg", sim_flag;
  double alpha = -1, beta = -1;
  std::size_t sim_trials = 0;

  auto add_source = [&](CLI::App* sub) {
    auto* inst = sub->add_option("--instance", instance_path, "instance JSON file");
    auto* g = sub->add_option("--gen", gen.name, "generator name instead of --instance");
    inst->excludes(g);
    detail::add_gen_options(sub, gen);
  };
  auto add_run = [&](CLI::App* sub) {
    add_source(sub);
    sub->add_option("--policy,--policies", policies_raw, "policy names (repeat or comma separate)")->required();
    sub->add_option("--trials", trials, "sample paths per policy");
    sub->add_option("--seed", seed, "master seed")->required();
    sub->add_option("--threads", threads, "worker threads (default REUSE_ALLOC_THREADS or 1)");
    sub->add_option("--output,-o", out_path, "CSV output file (default stdout)");
    sub->add_option("--trace", trace_path, "write per-arrival trace CSV here");
    sub->add_flag("--shared-duration", shared_duration, "one duration draw per multi-unit allocation");
  };

  auto* run = app.add_subcommand("run", "simulate policies and print summary CSV");
  add_run(run);
  auto* compare = app.add_subcommand("compare", "like run, plus LP value and ratio columns");
  add_run(compare);
  auto* lp = app.add_subcommand("lp", "solve the LP upper bound");
  lp->add_option("instance", instance_path, "instance JSON file");
  lp->add_option("--gen", gen.name, "generator name");
  detail::add_gen_options(lp, gen);
  lp->add_flag("--y", print_y, "also print y values");
  auto* certify = app.add_subcommand("certify", "empirical primal-dual certificate report");
  add_source(certify);
  certify->add_option("--alg", alg, "galg or rba")->check(CLI::IsMember({"galg", "rba"}));
  certify->add_option("--alpha", alpha, "ratio alpha (default 0.99(1-1/e)e^{-1/c_min})");
  certify->add_option("--beta", beta, "beta (default 1.01 e^{1/c_min})");
  certify->add_option("--trials", trials, "OPT sample paths");
  certify->add_option("--seed", seed, "master seed")->required();
  certify->add_flag("--swap", swap, "negative control with lambda/theta roles swapped");
  auto* gen_cmd = app.add_subcommand("gen", "write a generated instance as JSON");
  gen_cmd->add_option("name", gen.name, "generator name")->required();
  detail::add_gen_options(gen_cmd, gen);
  gen_cmd->add_option("--instance", gen.instance, "source graph (stochastic_rewards)");
  gen_cmd->add_option("--output,-o", out_path, "output file (default stdout)");
  auto* rp = app.add_subcommand("randproc", "fluid availability of a single-unit process");
  rp->add_option("spec", instance_path, "process spec JSON")->required();
  rp->add_option("--simulate", sim_trials, "also simulate this many trials");
  rp->add_option("--seed", seed, "seed for --simulate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    auto source = [&]() -> std::pair<std::string, Instance> {
      if (!instance_path.empty()) return {instance_path, detail::load_instance(instance_path)};
      if (!gen.name.empty()) return {gen.name, detail::generate(gen)};
      throw ConfigError("need --instance or --gen");
    };
    std::ofstream file;
    auto sink = [&]() -> std::ostream& {
      if (out_path.empty()) return out;
      file.open(out_path, std::ios::binary);
      if (!file) throw ConfigError("cannot write " + out_path);
      return file;
    };

    if (run->parsed() || compare->parsed()) {
      const bool with_lp = compare->parsed();
      if (trials < 1) throw ConfigError("trials must be >= 1");
      auto names = detail::split_names(policies_raw);
      if (names.empty()) throw ConfigError("no policy given");
      auto [label, inst] = source();
      IndexedInstance p(inst);
      std::vector<AnyPolicy> pols;
      for (const auto& nm : names) pols.push_back(make_policy(nm, p));
      double lpv = 0;
      if (with_lp) lpv = lp_value(p);
      std::ostream& os = sink();
      os << "instance,policy,trials,seed,mean,se,ci_lo,ci_hi";
      if (with_lp) os << ",lp_value,ratio";
      for (std::size_t r = 0; r < p.num_resources(); ++r) os << ",mean_r" << p.resource(r).id;
      os << '\n';
      RunOptions ro;
      ro.threads = threads;
      ro.sim.shared_duration = shared_duration;
      std::ofstream trace;
      if (!trace_path.empty()) {
        trace.open(trace_path, std::ios::binary);
        if (!trace) throw ConfigError("cannot write " + trace_path);
        trace << "policy,";
        write_trace_header(trace);
      }
      for (const auto& pol : pols) {
        Summary s = run_trials(p, pol, trials, seed, ro);
        os << label << ',' << pol.name << ',' << trials << ',' << seed << ',' << format_number(s.mean) << ','
           << format_number(s.se) << ',' << format_number(s.ci_lo) << ',' << format_number(s.ci_hi);
        if (with_lp) os << ',' << format_number(lpv) << ',' << format_number(lpv > 0 ? s.mean / lpv : 0.0);
        for (double m : s.resource_mean) os << ',' << format_number(m);
        os << '\n';
        if (trace.is_open()) {
          SimOptions so;
          so.shared_duration = shared_duration;
          for (std::size_t k = 0; k < trials; ++k) {
            std::ostringstream rows;
            write_trace_csv(rows, simulate(p, pol, seed, k, so));
            std::istringstream lines(rows.str());
            std::string line;
            while (std::getline(lines, line)) trace << pol.name << ',' << line << '\n';
          }
        }
      }
      return 0;
    }

    if (lp->parsed()) {
      Instance inst = !instance_path.empty() ? detail::load_instance(instance_path)
                      : !gen.name.empty()    ? detail::generate(gen)
                                             : throw ConfigError("need an instance file or --gen");
      IndexedInstance p(inst);
      auto model = build_lp(p);
      auto sol = solve_lp(model);
      if (sol.status != LpStatus::optimal) throw Error(std::string("LP not solved: ") + lp_status_name(sol.status));
      out << format_number(sol.objective) << '\n';
      if (print_y) {
        out << "arrival,resource,y\n";
        for (std::size_t v = 0; v < model.vars.size(); ++v)
          out << model.vars[v].arrival << ',' << p.resource(model.vars[v].resource).id << ','
              << format_number(sol.y[v]) << '\n';
      }
      return 0;
    }

    if (certify->parsed()) {
      auto [label, inst] = source();
      IndexedInstance p(inst);
      const double cmin = min_capacity(inst);
      CertificateOptions co;
      co.alpha = alpha >= 0 ? alpha : 0.99 * (1.0 - std::exp(-1.0)) * std::exp(-1.0 / cmin);
      co.beta = beta >= 0 ? beta : 1.01 * std::exp(1.0 / cmin);
      co.trials = trials;
      co.seed = seed;
      co.swap_roles = swap;
      auto opt = LpRounding::from_instance(p);
      auto rep = certificate_check(p, alg == "rba" ? CertificateAlg::rba : CertificateAlg::galg, opt, co);
      out << "resource,theta,lambda_on_opt,opt_reward,lhs,rhs,se,pass\n";
      for (const auto& rc : rep.resources)
        out << rc.id << ',' << format_number(rc.theta) << ',' << format_number(rc.lambda_on_opt) << ','
            << format_number(rc.opt_reward) << ',' << format_number(rc.lhs) << ',' << format_number(rc.rhs) << ','
            << format_number(rc.se) << ',' << (rc.pass ? "true" : "false") << '\n';
      out << "condition1,,,," << format_number(rep.cond1_lhs) << ','
          << format_number(rep.cond1_rhs) << ',' << format_number(rep.cond1_se) << ','
          << (rep.cond1_pass ? "true" : "false") << '\n';
      return rep.pass ? 0 : 3;
    }

    if (gen_cmd->parsed()) {
      Instance inst = detail::generate(gen);
      auto v = validate(inst);
      if (!v.empty()) throw Error("generated instance is invalid: " + v.front());
      sink() << dump_instance(inst, 2) << '\n';
      return 0;
    }

    if (rp->parsed()) {
      Json j;
      try {
        j = Json::parse(detail::read_file(instance_path));
      } catch (const Json::parse_error& e) {
        throw ParseError(e.what());
      }
      ProcessSpec spec = process_spec_from_json(j);
      auto fl = fluid_process(spec);
      out << "eta";
      for (double e : fl.eta) out << ',' << format_number(e);
      out << "\nreward," << format_number(fl.reward) << '\n';
      if (sim_trials > 0) {
        auto sim = simulate_process(spec, seed, sim_trials);
        out << "sim_availability";
        for (double a : sim.availability) out << ',' << format_number(a);
        out << "\nsim_reward," << format_number(sim.reward.mean) << ',' << format_number(sim.reward.se) << '\n';
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedMode& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ralloc
