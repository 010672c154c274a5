#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dbl/experiment.hpp"
#include "dbl/optimizer.hpp"
#include "dbl/report_io.hpp"
#include "dbl/scenario_io.hpp"

#ifndef DBL_DATA_DIR
#define DBL_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace dbl;

namespace {

enum Exit { kOk = 0, kInternal = 1, kValidation = 2, kInfeasible = 3 };

struct Options {
  std::string scenario = std::string(DBL_DATA_DIR) + "/reference_line.json";
  unsigned long long seed = 0;
  bool seed_set = false;
  int reps = 0;
  int lookahead = -1;
  double gamma = -1.0;
  std::string pattern;
  std::string preset;
  std::string candidates;
  std::string limits;
  std::string out_dir = ".";
  bool independent_seeds = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + tok + "'");
    }
  }
  return out;
}

std::vector<int> parse_ids(const std::string& s) {
  std::vector<int> out;
  for (double d : parse_doubles(s)) {
    if (d != static_cast<int>(d)) throw UsageError("not an id: " + format_number(d));
    out.push_back(static_cast<int>(d));
  }
  return out;
}

// Explicit list wins over a preset name; falls back to the scenario default.
std::vector<int> resolve_ids(const LineConfig& c, const std::string& list, const std::string& preset,
                             const std::string& default_preset, const std::vector<int>& default_ids) {
  if (!list.empty()) return parse_ids(list);
  if (!preset.empty()) return c.preset(preset);
  if (!default_preset.empty()) return c.preset(default_preset);
  return default_ids;
}

LineConfig load_checked(const Options& o) {
  LineConfig c = load_scenario(o.scenario);
  const auto v = validate(c);
  if (!v.empty()) {
    std::ostringstream msg;
    msg << "scenario has " << v.size() << " violation(s):";
    for (const auto& x : v) msg << "\n  " << x.field << ": " << x.rule;
    throw ConfigError(msg.str());
  }
  return c;
}

DeploymentPattern pattern_of(const LineConfig& c, const Options& o) {
  DeploymentPattern p(resolve_ids(c, o.pattern, o.preset, c.run.pattern_preset, c.run.pattern_ids));
  const auto v = validate_pattern(c, p);
  if (!v.empty()) throw ConfigError(v.front().field + ": " + v.front().rule);
  return p;
}

ControllerSpec controller_of(const LineConfig& c, const Options& o) {
  ControllerSpec spec = c.run.controller;
  if (o.lookahead == 0) return ControllerSpec::none();
  if (o.lookahead > 0) {
    spec.kind = ControllerSpec::Kind::lookahead;
    spec.depth = o.lookahead;
  }
  if (o.gamma >= 0.0) spec.gamma = o.gamma;
  if (spec.kind == ControllerSpec::Kind::lookahead && !(spec.gamma > 0.0 && spec.gamma <= 1.0)) {
    throw UsageError("--gamma must lie in (0, 1]");
  }
  return spec;
}

unsigned long long seed_of(const LineConfig& c, const Options& o) { return o.seed_set ? o.seed : c.run.seed; }

int reps_of(const LineConfig& c, const Options& o) {
  const int n = o.reps > 0 ? o.reps : c.run.replications;
  if (n < 1) throw UsageError("--reps must be at least 1");
  return n;
}

std::ofstream open_out(const Options& o, const std::string& name) {
  fs::create_directories(o.out_dir);
  std::ofstream f(fs::path(o.out_dir) / name);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(o.out_dir) / name).string());
  return f;
}

std::string label_of(const ControllerSpec& s) {
  return s.kind == ControllerSpec::Kind::none ? "NoControl" : std::to_string(s.depth) + "CTPL";
}

int cmd_simulate(const Options& o) {
  const LineConfig c = load_checked(o);
  const auto pattern = pattern_of(c, o);
  const auto controller = controller_of(c, o);
  const auto seed = seed_of(c, o);
  auto policy = make_policy(controller);
  const SimOutcome out = run_simulation(c, pattern, *policy, seed, 0);

  auto traj = open_out(o, "trajectories.csv");
  write_trajectories_csv(traj, c, out);
  auto ctps = open_out(o, "ctps.csv");
  write_ctps_csv(ctps, c, out);
  const RunInfo info{o.scenario, pattern, controller, seed};
  const auto row = summarize(0, out);
  auto rep = open_out(o, "report.json");
  rep << replication_json(info, row).dump(2) << '\n';

  std::printf("pattern %s, controller %s, seed %llu\n", pattern.to_string().c_str(), label_of(controller).c_str(),
              seed);
  std::printf("fsi %.3f over %d CTPs, %d nonzero actions, wait %.1f s\n", row.stability.fsi, row.stability.n_ctp,
              row.stability.n_actions, row.passengers.wait_mean);
  std::printf("bunched: %s\n", out.bunched ? "yes" : "no");
  return kOk;
}

int cmd_evaluate(const Options& o) {
  const LineConfig c = load_checked(o);
  const auto pattern = pattern_of(c, o);
  const auto controller = controller_of(c, o);
  const auto seed = seed_of(c, o);
  const int n = reps_of(c, o);
  const auto rows = run_replications(c, pattern, controller, n, seed);
  const auto agg = aggregate(rows);
  const RunInfo info{o.scenario, pattern, controller, seed};

  auto reps = open_out(o, "replications.csv");
  write_replications_csv(reps, rows);
  auto csv = open_out(o, "aggregate.csv");
  write_aggregate_csv(csv, label_of(controller), agg);
  auto js = open_out(o, "aggregate.json");
  js << aggregate_json(info, agg).dump(2) << '\n';

  std::printf("%s on %s, %d replications\n", label_of(controller).c_str(), pattern.to_string().c_str(), n);
  std::printf("fsi %.3f (sd across runs %.3f), |a| %.3f over %.1f actions, bunch fraction %.2f (%s)\n", agg.fsi,
              agg.fsi_across_std, agg.action_abs_mean, agg.n_actions, agg.bunch_fraction,
              agg.bunched() ? "Yes" : "No");
  std::printf("wait %.1f s, ride %.1f s, travel %.1f s over %.0f passengers\n", agg.wait_mean, agg.ride_mean,
              agg.travel_mean, agg.n_p);
  return kOk;
}

int cmd_optimize(const Options& o) {
  const LineConfig c = load_checked(o);
  const auto controller = controller_of(c, o);
  const auto seed = seed_of(c, o);
  const int n = reps_of(c, o);
  const auto candidates = resolve_ids(c, o.candidates, "", c.run.candidates_preset, c.run.candidate_ids);
  {
    const auto v = validate_pattern(c, DeploymentPattern(candidates));
    if (!v.empty()) throw ConfigError(v.front().field + ": " + v.front().rule);
  }
  ConstraintSpec limits = c.constraints;
  if (!o.limits.empty()) {
    const auto l = parse_doubles(o.limits);
    if (l.size() != 2 || l[0] < 0.0 || l[1] < 0.0) throw UsageError("--limits expects two non-negative numbers F1,F2");
    limits = {l[0], l[1]};
  }
  MonteCarloEvaluator evaluator(c, controller, n, seed, !o.independent_seeds);
  const auto res = branch_and_bound(c, candidates, limits, evaluator);
  const ConstraintCheck sums = res.found ? constraint_check(c, res.optimal, limits) : ConstraintCheck{};

  auto log = open_out(o, "search_log.csv");
  write_search_log_csv(log, res);
  auto js = open_out(o, "result.json");
  js << search_json(res, candidates, limits, sums).dump(2) << '\n';

  std::printf("%d nodes generated, %d feasible, %zu evaluations\n", res.nodes_generated, res.feasible_nodes,
              res.evaluations);
  if (!res.found) {
    std::printf("no feasible deployment under limits (%s, %s)\n", format_number(limits.influence_limit).c_str(),
                format_number(limits.budget_limit).c_str());
    return kInfeasible;
  }
  std::printf("optimum {%s}, objective %.3f, influence %.2f, money %.2f\n", res.optimal.to_string().c_str(),
              res.objective, sums.influence_sum, sums.money_sum);
  if (!res.monotonicity_violations.empty()) {
    std::printf("%zu monotonicity violations logged in result.json\n", res.monotonicity_violations.size());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dedicated bus lane deployment: simulate, evaluate, optimize"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario JSON")->check(CLI::ExistingFile);
    sub->add_option_function<unsigned long long>(
        "--seed", [&o](unsigned long long s) { o.seed = s; o.seed_set = true; }, "Base seed");
    sub->add_option("--lookahead", o.lookahead, "Look-ahead depth N, 0 for no control")->check(CLI::NonNegativeNumber);
    sub->add_option("--gamma", o.gamma, "Discount rate");
    sub->add_option("--out-dir", o.out_dir, "Output directory");
  };
  auto with_pattern = [&o](CLI::App* sub) {
    auto* pat = sub->add_option("--pattern", o.pattern, "Deployed segment ids, e.g. 2,5,17");
    sub->add_option("--preset", o.preset, "Named pattern from the scenario")->excludes(pat);
  };

  auto* sim = app.add_subcommand("simulate", "One seeded run");
  common(sim);
  with_pattern(sim);

  auto* eval = app.add_subcommand("evaluate", "Replicated runs and aggregate indices");
  common(eval);
  with_pattern(eval);
  eval->add_option("--reps", o.reps, "Replications")->check(CLI::PositiveNumber);

  auto* opt = app.add_subcommand("optimize", "Branch-and-bound location search");
  common(opt);
  opt->add_option("--reps", o.reps, "Replications per evaluated pattern")->check(CLI::PositiveNumber);
  opt->add_option("--candidates", o.candidates, "Candidate segment ids (default: scenario candidates)");
  opt->add_option("--limits", o.limits, "Influence and budget limits F1,F2");
  opt->add_flag("--independent-seeds", o.independent_seeds, "Seed each pattern independently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o);
    if (eval->parsed()) return cmd_evaluate(o);
    return cmd_optimize(o);
  } catch (const ConfigError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const UsageError& e) {
    std::cerr << "invalid arguments: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}
