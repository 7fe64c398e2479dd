#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scav/dqn.hpp"
#include "scav/env_io.hpp"
#include "scav/planners.hpp"

namespace scav {

/// Randomized hunt environment: Euclidean graph, each object located at
/// 1..3 nodes drawn without replacement with a flat-Dirichlet partition of
/// its probability, uniform start. Deterministic given
/// (master_seed, node_count, object_count, env_id).
Environment generate_environment(int node_count, int object_count,
                                 std::uint64_t master_seed, std::uint64_t env_id);

/// The 7-location lab environment with its published four-object
/// occurrence model (objects A-D over nodes 1..7). Node 0 is the start
/// and carries no objects; coordinates are synthetic placements, so costs
/// are not the lab map's distances.
Environment robot_fixture();

/// One planner's result on one hunt. `cost` is NaN when the planner was
/// skipped (exhaustive over its candidate cap) or failed to complete
/// within the step limit.
struct TrialRow {
  int env_id = 0;
  int trial_id = 0;
  int hunt_id = 0;
  PlannerKind planner = PlannerKind::Proximity;
  double cost = 0.0;
  double optimal_cost = 0.0;
  int decisions = 0;
  std::int64_t planner_time_us = 0;
};

struct RunOptions {
  std::vector<PlannerKind> planners;
  int hunts = 50;
  std::uint64_t master_seed = 0;
  int env_id = 0;
  int trial_id = 0;
  ExhaustiveOptions exhaustive;
  int step_limit_factor = 4;
  const DqnPolicy* dqn_policy = nullptr;      // required for PlannerKind::Dqn
  const DqnPolicy* dqnmap_policy = nullptr;   // required for PlannerKind::DqnMap
  bool skip_exhaustive = false;  // emit skipped rows instead of running it
  bool record_times = false;  // off by default so output is byte-reproducible
};

/// Runs every requested planner against the same sampled arrangements.
/// Within one hunt all rows share the same optimal_cost (paired design).
std::vector<TrialRow> run_hunts(const Environment& env, const RunOptions& options);

struct ExperimentSpec {
  std::vector<int> node_counts;
  int object_count = 4;
  int trials = 20;
  int hunts_per_trial = 50;
  std::vector<PlannerKind> planners;
  std::uint64_t master_seed = 0;
  int exhaustive_max_nodes = 8;  // exhaustive rows above this are skipped
  ExhaustiveOptions exhaustive;
  int step_limit_factor = 4;
  int jobs = 1;  // 0 = hardware concurrency
  bool record_times = false;
};

/// The node-count sweep: per (node_count, trial) a fresh environment, per
/// hunt a fresh arrangement shared by all planners. env_id in the output
/// is the node count. Rows come back sorted by (env_id, trial_id, planner,
/// hunt_id) regardless of worker count.
std::vector<TrialRow> run_experiment(const ExperimentSpec& spec);

/// Header: env_id,trial_id,hunt_id,planner,cost,optimal_cost,decisions,planner_time_us
void write_results_csv(const std::vector<TrialRow>& rows, std::ostream& out);
std::vector<TrialRow> read_results_csv(std::istream& in);

/// Emits ratio_to_optimal.txt, mean_distance.txt and decision_time.txt
/// under out_dir (created if missing): plain whitespace-separated columns
/// with a header row. Output is invariant under input row permutation.
/// Throws std::runtime_error on inconsistent rows (differing optimal cost
/// within one hunt, or duplicate planner rows).
void write_report(std::vector<TrialRow> rows, const std::string& out_dir);

}  // namespace scav
