#include "scav/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "scav/errors.hpp"
#include "scav/stats.hpp"

namespace scav {

namespace {
// stream tags so graph, prior and arrangement seeds never collide
constexpr std::uint64_t kEnvStream = 0xE17;
constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kPriorStream = 2;
constexpr std::uint64_t kArrangementStream = 0xA55;
}  // namespace

Environment generate_environment(int node_count, int object_count,
                                 std::uint64_t master_seed, std::uint64_t env_id) {
  if (node_count < 3)
    throw std::invalid_argument("generate_environment: need at least 3 nodes");
  if (object_count < 1)
    throw std::invalid_argument("generate_environment: need at least 1 object");

  const std::uint64_t base =
      derive_seed({master_seed, kEnvStream, static_cast<std::uint64_t>(node_count),
                   static_cast<std::uint64_t>(object_count), env_id});

  Environment env;
  env.graph = random_euclidean_graph(node_count, derive_seed({base, kGraphStream}));

  Rng rng(derive_seed({base, kPriorStream}));
  std::vector<double> probs(static_cast<std::size_t>(object_count) * node_count, 0.0);
  for (int o = 0; o < object_count; ++o) {
    const int locations = rng.uniform_int(1, 3);
    std::vector<int> where = rng.sample_without_replacement(node_count, locations);
    std::sort(where.begin(), where.end());
    const std::vector<double> parts = rng.dirichlet_flat(locations);
    for (int i = 0; i < locations; ++i)
      probs[static_cast<std::size_t>(o) * node_count + where[i]] = parts[i];
    env.object_names.push_back(std::string(1, char('A' + o % 26)));
  }
  env.prior = PriorModel(object_count, node_count, std::move(probs));
  env.start = rng.uniform_int(0, node_count - 1);
  return env;
}

Environment robot_fixture() {
  // Synthetic lab placements; node 0 is the start, nodes 1..7 are the
  // published location nodes (node 6 holds no object mass).
  std::vector<Point> coords = {
      {0.0, 0.0},    // 0: start
      {8.0, 14.0},   // 1
      {22.0, 2.0},   // 2
      {26.0, 16.0},  // 3
      {4.0, 7.0},    // 4
      {15.0, 9.0},   // 5
      {28.0, 6.0},   // 6
      {12.0, 19.0},  // 7
  };
  const int l = static_cast<int>(coords.size());
  const int k = 4;
  std::vector<double> probs(static_cast<std::size_t>(k) * l, 0.0);
  auto set = [&](int o, int n, double p) { probs[static_cast<std::size_t>(o) * l + n] = p; };
  set(0, 2, 0.1); set(0, 3, 0.8); set(0, 7, 0.1);              // A
  set(1, 1, 0.2); set(1, 3, 0.5); set(1, 7, 0.3);              // B
  set(2, 1, 0.2); set(2, 2, 0.3); set(2, 4, 0.2); set(2, 5, 0.3);  // C
  set(3, 4, 0.5); set(3, 5, 0.5);                              // D

  Environment env;
  env.graph = euclidean_graph(std::move(coords));
  env.prior = PriorModel(k, l, std::move(probs));
  env.start = 0;
  env.object_names = {"A", "B", "C", "D"};
  env.name = "robot-fixture (synthetic Euclidean costs, not the lab map)";
  return env;
}

namespace {

std::int64_t to_microseconds(std::chrono::nanoseconds ns) {
  return std::chrono::duration_cast<std::chrono::microseconds>(ns).count();
}

constexpr double kLowerBoundSlack = 1e-9;

}  // namespace

std::vector<TrialRow> run_hunts(const Environment& env, const RunOptions& options) {
  if (options.planners.empty())
    throw std::invalid_argument("run_hunts: no planners requested");
  if (options.hunts < 1) throw std::invalid_argument("run_hunts: hunts must be positive");
  for (PlannerKind kind : options.planners) {
    if (kind == PlannerKind::Dqn && options.dqn_policy == nullptr)
      throw std::invalid_argument("run_hunts: dqn requested without a policy");
    if (kind == PlannerKind::DqnMap && options.dqnmap_policy == nullptr)
      throw std::invalid_argument("run_hunts: dqnmap requested without a policy");
  }

  const int step_limit = std::max(
      1, options.step_limit_factor * env.graph.node_count() * env.prior.object_count());
  std::vector<TrialRow> rows;
  rows.reserve(static_cast<std::size_t>(options.hunts) * options.planners.size());

  for (int hunt = 0; hunt < options.hunts; ++hunt) {
    const std::uint64_t seed = derive_seed(
        {options.master_seed, kArrangementStream,
         static_cast<std::uint64_t>(options.env_id),
         static_cast<std::uint64_t>(options.trial_id),
         static_cast<std::uint64_t>(hunt)});
    HuntInstance instance{env.graph, env.prior, sample_arrangement(env.prior, seed),
                          env.start};

    auto offline = make_offline_planner(instance.truth);
    const HuntOutcome optimal_outcome = run_hunt(instance, *offline, step_limit);
    const double optimal_cost = optimal_outcome.trajectory.total_cost;

    for (PlannerKind kind : options.planners) {
      TrialRow row;
      row.env_id = options.env_id;
      row.trial_id = options.trial_id;
      row.hunt_id = hunt;
      row.planner = kind;
      row.optimal_cost = optimal_cost;

      if (kind == PlannerKind::ExhaustiveBayes && options.skip_exhaustive) {
        row.cost = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
        continue;
      }

      const HuntOutcome* outcome = nullptr;
      HuntOutcome own;
      try {
        if (kind == PlannerKind::OfflineOptimal) {
          outcome = &optimal_outcome;
        } else if (kind == PlannerKind::Dqn || kind == PlannerKind::DqnMap) {
          const DqnPolicy* policy = kind == PlannerKind::Dqn ? options.dqn_policy
                                                             : options.dqnmap_policy;
          auto planner = make_dqn_planner(kind, *policy);
          own = run_hunt(instance, *planner, step_limit);
          outcome = &own;
        } else {
          auto planner = make_online_planner(kind, options.exhaustive);
          own = run_hunt(instance, *planner, step_limit);
          outcome = &own;
        }
      } catch (const InfeasibleError&) {
        row.cost = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
        continue;
      }

      row.decisions = outcome->decisions;
      if (options.record_times)
        row.planner_time_us = to_microseconds(outcome->total_decision_time());
      if (outcome->completed) {
        row.cost = outcome->trajectory.total_cost;
        if (row.cost < optimal_cost - kLowerBoundSlack)
          throw std::logic_error("lower-bound violation: planner " +
                                 std::string(to_string(kind)) + " beat the optimum");
      } else {
        row.cost = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<TrialRow> run_experiment(const ExperimentSpec& spec) {
  if (spec.node_counts.empty())
    throw std::invalid_argument("run_experiment: no node counts");
  if (spec.planners.empty())
    throw std::invalid_argument("run_experiment: no planners");
  if (spec.trials < 1 || spec.hunts_per_trial < 1)
    throw std::invalid_argument("run_experiment: trials and hunts must be positive");
  for (PlannerKind kind : spec.planners)
    if (kind == PlannerKind::Dqn || kind == PlannerKind::DqnMap)
      throw InfeasibleError(
          "run_experiment: DQN policies are per-environment; train and run them "
          "on a fixed environment instead");

  struct Item {
    int node_count;
    int trial;
  };
  std::vector<Item> items;
  for (int nc : spec.node_counts)
    for (int trial = 0; trial < spec.trials; ++trial) items.push_back({nc, trial});

  std::vector<std::vector<TrialRow>> slots(items.size());
  std::atomic<std::size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto work = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= items.size()) return;
      try {
        const Item& item = items[i];
        Environment env =
            generate_environment(item.node_count, spec.object_count, spec.master_seed,
                                 static_cast<std::uint64_t>(item.trial));
        RunOptions options;
        options.planners = spec.planners;
        options.hunts = spec.hunts_per_trial;
        options.master_seed = spec.master_seed;
        options.env_id = item.node_count;
        options.trial_id = item.trial;
        options.exhaustive = spec.exhaustive;
        options.step_limit_factor = spec.step_limit_factor;
        options.skip_exhaustive = item.node_count > spec.exhaustive_max_nodes;
        options.record_times = spec.record_times;
        slots[i] = run_hunts(env, options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int jobs = spec.jobs;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
  {
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<TrialRow> rows;
  for (auto& slot : slots)
    rows.insert(rows.end(), slot.begin(), slot.end());
  std::sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
    if (a.env_id != b.env_id) return a.env_id < b.env_id;
    if (a.trial_id != b.trial_id) return a.trial_id < b.trial_id;
    if (a.planner != b.planner) return a.planner < b.planner;
    return a.hunt_id < b.hunt_id;
  });
  return rows;
}

void write_results_csv(const std::vector<TrialRow>& rows, std::ostream& out) {
  out << "env_id,trial_id,hunt_id,planner,cost,optimal_cost,decisions,planner_time_us\n";
  char buf[256];
  for (const TrialRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%s,%.10g,%.10g,%d,%lld\n", row.env_id,
                  row.trial_id, row.hunt_id, std::string(to_string(row.planner)).c_str(),
                  row.cost, row.optimal_cost, row.decisions,
                  static_cast<long long>(row.planner_time_us));
    out << buf;
  }
}

std::vector<TrialRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("results csv: empty input");
  if (line != "env_id,trial_id,hunt_id,planner,cost,optimal_cost,decisions,planner_time_us")
    throw std::runtime_error("results csv: unexpected header: " + line);

  std::vector<TrialRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8)
      throw std::runtime_error("results csv: line " + std::to_string(line_no) +
                               " has " + std::to_string(fields.size()) + " fields");
    TrialRow row;
    row.env_id = std::stoi(fields[0]);
    row.trial_id = std::stoi(fields[1]);
    row.hunt_id = std::stoi(fields[2]);
    const auto kind = parse_planner(fields[3]);
    if (!kind)
      throw std::runtime_error("results csv: unknown planner \"" + fields[3] + "\"");
    row.planner = *kind;
    row.cost = std::strtod(fields[4].c_str(), nullptr);
    row.optimal_cost = std::strtod(fields[5].c_str(), nullptr);
    row.decisions = std::stoi(fields[6]);
    row.planner_time_us = std::stoll(fields[7]);
    rows.push_back(row);
  }
  return rows;
}

void write_report(std::vector<TrialRow> rows, const std::string& out_dir) {
  if (rows.empty()) throw std::runtime_error("report: no rows");

  std::sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
    if (a.env_id != b.env_id) return a.env_id < b.env_id;
    if (a.trial_id != b.trial_id) return a.trial_id < b.trial_id;
    if (a.hunt_id != b.hunt_id) return a.hunt_id < b.hunt_id;
    return a.planner < b.planner;
  });

  // paired-design integrity: one optimal cost per hunt, one row per planner
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const TrialRow& prev = rows[i - 1];
    const TrialRow& row = rows[i];
    const bool same_hunt = prev.env_id == row.env_id && prev.trial_id == row.trial_id &&
                           prev.hunt_id == row.hunt_id;
    if (!same_hunt) continue;
    if (prev.planner == row.planner)
      throw std::runtime_error("report: duplicate planner rows within one hunt");
    if (prev.optimal_cost != row.optimal_cost)
      throw std::runtime_error(
          "report: rows disagree on the optimal cost within one hunt; "
          "the csv mixes incompatible runs");
  }

  struct Cell {
    std::vector<double> costs;
    std::vector<double> optima;
    long decisions = 0;
    std::int64_t time_us = 0;
    int skipped = 0;
  };
  std::map<std::pair<int, PlannerKind>, Cell> cells;
  for (const TrialRow& row : rows) {
    Cell& cell = cells[{row.env_id, row.planner}];
    if (std::isnan(row.cost)) {
      ++cell.skipped;
      continue;
    }
    cell.costs.push_back(row.cost);
    cell.optima.push_back(row.optimal_cost);
    cell.decisions += row.decisions;
    cell.time_us += row.planner_time_us;
  }

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  char buf[256];

  {
    std::ofstream out(fs::path(out_dir) / "ratio_to_optimal.txt");
    out << "env_id planner n mean_cost ci95_half mean_optimal ratio skipped\n";
    for (const auto& [key, cell] : cells) {
      if (cell.costs.empty()) {
        std::snprintf(buf, sizeof(buf), "%d %s 0 nan nan nan nan %d\n", key.first,
                      std::string(to_string(key.second)).c_str(), cell.skipped);
        out << buf;
        continue;
      }
      const SummaryStats cost = ci95(cell.costs);
      const SummaryStats opt = ci95(cell.optima);
      const double ratio = opt.mean > 0.0 ? cost.mean / opt.mean
                                          : (cost.mean == 0.0 ? 1.0 : HUGE_VAL);
      std::snprintf(buf, sizeof(buf), "%d %s %zu %.10g %.10g %.10g %.10g %d\n",
                    key.first, std::string(to_string(key.second)).c_str(), cost.n,
                    cost.mean, cost.ci95_half, opt.mean, ratio, cell.skipped);
      out << buf;
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "mean_distance.txt");
    out << "env_id planner n mean_cost se ci95_half\n";
    for (const auto& [key, cell] : cells) {
      if (cell.costs.empty()) continue;
      const SummaryStats cost = ci95(cell.costs);
      std::snprintf(buf, sizeof(buf), "%d %s %zu %.10g %.10g %.10g\n", key.first,
                    std::string(to_string(key.second)).c_str(), cost.n, cost.mean,
                    cost.se, cost.ci95_half);
      out << buf;
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "decision_time.txt");
    out << "env_id planner decisions total_time_us mean_us_per_decision\n";
    for (const auto& [key, cell] : cells) {
      if (cell.decisions == 0) continue;
      const double per_decision =
          static_cast<double>(cell.time_us) / static_cast<double>(cell.decisions);
      std::snprintf(buf, sizeof(buf), "%d %s %ld %lld %.10g\n", key.first,
                    std::string(to_string(key.second)).c_str(), cell.decisions,
                    static_cast<long long>(cell.time_us), per_decision);
      out << buf;
    }
  }
}

}  // namespace scav
