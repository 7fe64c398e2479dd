// scavhunt: generate hunt environments, run planners against them, sweep
// benchmark grids, train DQN policies and summarize result CSVs.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scav/bench.hpp"
#include "scav/dqn.hpp"
#include "scav/env_io.hpp"
#include "scav/errors.hpp"
#include "scav/planners.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

std::vector<scav::PlannerKind> parse_planner_list(const std::string& spec) {
  std::vector<scav::PlannerKind> kinds;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    if (token == "all") {
      for (scav::PlannerKind kind : scav::classic_planner_kinds()) kinds.push_back(kind);
      continue;
    }
    const auto kind = scav::parse_planner(token);
    if (!kind) throw CLI::ValidationError("--alg", "unknown planner \"" + token + "\"");
    kinds.push_back(*kind);
  }
  if (kinds.empty()) throw CLI::ValidationError("--alg", "no planners given");
  return kinds;
}

// "3..10", "7" or "3,5,8"
std::vector<int> parse_node_range(const std::string& spec) {
  std::vector<int> nodes;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(spec.substr(0, dots));
    const int hi = std::stoi(spec.substr(dots + 2));
    if (lo < 1 || hi < lo) throw CLI::ValidationError("--nodes", "bad range " + spec);
    for (int n = lo; n <= hi; ++n) nodes.push_back(n);
    return nodes;
  }
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ','))
    if (!token.empty()) nodes.push_back(std::stoi(token));
  if (nodes.empty()) throw CLI::ValidationError("--nodes", "no node counts given");
  return nodes;
}

void write_csv_file(const std::vector<scav::TrialRow>& rows, const std::string& path) {
  if (path == "-") {
    scav::write_results_csv(rows, std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open csv for writing: " + path);
  scav::write_results_csv(rows, out);
}

int run_gen(const std::string& out_path, int nodes, int objects,
            std::uint64_t seed, std::uint64_t env_id, bool robot) {
  const scav::Environment env =
      robot ? scav::robot_fixture()
            : scav::generate_environment(nodes, objects, seed, env_id);
  scav::save_environment(env, out_path);
  return kExitOk;
}

int run_run(const std::string& env_path, const std::string& alg, int hunts,
            std::uint64_t seed, const std::string& csv_path,
            const std::string& policy_path, int env_id, int trial_id, bool timing) {
  const scav::Environment env = scav::load_environment(env_path);
  scav::RunOptions options;
  options.planners = parse_planner_list(alg);
  options.hunts = hunts;
  options.master_seed = seed;
  options.env_id = env_id;
  options.trial_id = trial_id;
  options.record_times = timing;

  std::optional<scav::DqnPolicy> policy;
  for (scav::PlannerKind kind : options.planners) {
    if (kind != scav::PlannerKind::Dqn && kind != scav::PlannerKind::DqnMap) continue;
    if (policy_path.empty())
      throw CLI::ValidationError("--policy", "required for dqn planners");
    if (!policy) policy = scav::load_policy(policy_path);
    if ((kind == scav::PlannerKind::DqnMap) != policy->with_map)
      throw scav::InfeasibleError("policy variant does not match the requested planner");
    (kind == scav::PlannerKind::Dqn ? options.dqn_policy : options.dqnmap_policy) =
        &*policy;
  }

  write_csv_file(scav::run_hunts(env, options), csv_path);
  return kExitOk;
}

int run_sweep(const std::string& nodes, int objects, int trials, int hunts,
              const std::string& algs, std::uint64_t seed, const std::string& csv_path,
              int jobs, int exhaustive_max_nodes, bool timing) {
  scav::ExperimentSpec spec;
  spec.node_counts = parse_node_range(nodes);
  spec.object_count = objects;
  spec.trials = trials;
  spec.hunts_per_trial = hunts;
  spec.planners = parse_planner_list(algs);
  spec.master_seed = seed;
  spec.jobs = jobs;
  spec.exhaustive_max_nodes = exhaustive_max_nodes;
  spec.record_times = timing;
  write_csv_file(scav::run_experiment(spec), csv_path);
  return kExitOk;
}

int run_train(const std::string& env_path, bool with_map, int epochs,
              std::uint64_t seed, const std::string& policy_path,
              const std::string& curve_path, bool no_normalize) {
  const scav::Environment env = scav::load_environment(env_path);
  scav::TrainConfig config;
  config.epochs = epochs;
  config.seed = seed;
  config.with_map = with_map;
  config.normalize = !no_normalize;

  const scav::TrainResult result =
      scav::train_dqn(env.graph, env.prior, env.start, config);
  scav::save_policy(result.best, policy_path);
  if (!curve_path.empty()) {
    std::ofstream out(curve_path);
    if (!out) throw std::runtime_error("cannot open curve csv: " + curve_path);
    scav::write_curve_csv(result.curve, out);
  }
  std::fprintf(stderr, "best epoch %d, mean test return %.6g\n", result.best_epoch,
               result.best_return);
  return kExitOk;
}

int run_report(const std::string& csv_path, const std::string& out_dir) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open csv: " + csv_path);
  scav::write_report(scav::read_results_csv(in), out_dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scavenger-hunt planning benchmark"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random hunt environment file");
  int gen_nodes = 8, gen_objects = 4;
  std::uint64_t gen_seed = 0, gen_env_id = 0;
  std::string gen_out;
  bool gen_robot = false;
  gen->add_option("--nodes", gen_nodes, "Node count")->check(CLI::PositiveNumber);
  gen->add_option("--objects", gen_objects, "Object count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_option("--env-id", gen_env_id, "Environment stream id");
  gen->add_flag("--robot", gen_robot, "Emit the 7-location robot fixture instead");
  gen->add_option("-o,--out", gen_out, "Output environment json")->required();

  // run
  auto* run = app.add_subcommand("run", "Run planners on one environment");
  std::string run_env, run_alg, run_csv = "-", run_policy;
  int run_hunts_n = 50, run_env_id = 0, run_trial_id = 0;
  std::uint64_t run_seed = 0;
  bool run_timing = false;
  run->add_option("--env", run_env, "Environment json")->required();
  run->add_option("--alg", run_alg, "Planner name or comma list (or 'all')")->required();
  run->add_option("--hunts", run_hunts_n, "Hunts to run")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_seed, "Master seed");
  run->add_option("--csv", run_csv, "Output csv ('-' for stdout)");
  run->add_option("--policy", run_policy, "Trained policy file for dqn planners");
  run->add_option("--env-id", run_env_id, "env_id to record in rows");
  run->add_option("--trial-id", run_trial_id, "trial_id to record in rows");
  run->add_flag("--timing", run_timing,
                "Record wall-clock planner times (output no longer reproducible)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Node-count sweep benchmark");
  std::string sweep_nodes = "3..8", sweep_algs = "all", sweep_csv = "-";
  int sweep_objects = 4, sweep_trials = 20, sweep_hunts = 50, sweep_jobs = 0;
  int sweep_exh_max = 8;
  std::uint64_t sweep_seed = 0;
  bool sweep_timing = false;
  sweep->add_option("--nodes", sweep_nodes, "Node counts: '3..10', '7' or '3,5,8'");
  sweep->add_option("--objects", sweep_objects, "Objects per hunt")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--trials", sweep_trials, "Environments per node count")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--hunts", sweep_hunts, "Hunts per environment")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--algs", sweep_algs, "Planner comma list (or 'all')");
  sweep->add_option("--seed", sweep_seed, "Master seed");
  sweep->add_option("--csv", sweep_csv, "Output csv ('-' for stdout)");
  sweep->add_option("--jobs", sweep_jobs, "Worker threads (0 = hardware)");
  sweep->add_option("--exhaustive-max-nodes", sweep_exh_max,
                    "Skip exhaustive above this node count");
  sweep->add_flag("--timing", sweep_timing,
                  "Record wall-clock planner times (output no longer reproducible)");

  // train-dqn
  auto* train = app.add_subcommand("train-dqn", "Train a DQN policy on one environment");
  std::string train_env, train_out, train_curve;
  int train_epochs = 40;
  std::uint64_t train_seed = 0;
  bool train_map = false, train_no_norm = false;
  train->add_option("--env", train_env, "Environment json")->required();
  train->add_flag("--map", train_map, "Observe travel costs (DQN+Map variant)");
  train->add_option("--epochs", train_epochs, "Training epochs")
      ->check(CLI::PositiveNumber);
  train->add_option("--seed", train_seed, "Training seed");
  train->add_option("-o,--out", train_out, "Output policy file")->required();
  train->add_option("--curve", train_curve, "Learning-curve csv");
  train->add_flag("--no-normalize", train_no_norm,
                  "Disable observation/reward cost normalization");

  // report
  auto* report = app.add_subcommand("report", "Summarize a results csv");
  std::string report_csv, report_out;
  report->add_option("--csv", report_csv, "Results csv")->required();
  report->add_option("-o,--out", report_out, "Report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed())
      return run_gen(gen_out, gen_nodes, gen_objects, gen_seed, gen_env_id, gen_robot);
    if (run->parsed())
      return run_run(run_env, run_alg, run_hunts_n, run_seed, run_csv, run_policy,
                     run_env_id, run_trial_id, run_timing);
    if (sweep->parsed())
      return run_sweep(sweep_nodes, sweep_objects, sweep_trials, sweep_hunts, sweep_algs,
                       sweep_seed, sweep_csv, sweep_jobs, sweep_exh_max, sweep_timing);
    if (train->parsed())
      return run_train(train_env, train_map, train_epochs, train_seed, train_out,
                       train_curve, train_no_norm);
    if (report->parsed()) return run_report(report_csv, report_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const scav::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
