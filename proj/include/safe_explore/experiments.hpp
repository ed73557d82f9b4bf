#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "safe_explore/assured_q.hpp"
#include "safe_explore/stats.hpp"

namespace safe_explore {

enum class ExperimentKind { bandit_sweep, grid_barrier, corridor_compare };

struct BanditSweepConfig {
  std::size_t k = 100;
  double mu = 0.1;
  std::vector<double> epsilons{0.02, 0.04, 0.06, 0.08};
  std::vector<double> alphas{0.05, 0.1, 0.3};
  double arm_lo = 0.0;
  double arm_hi = 0.2;
  std::optional<std::string> arms_path;  // fixed arm parameters instead of sampling per run
  std::optional<std::int64_t> max_rounds;  // default: ten times the time bound
};

struct GridConfig {
  int size = 9;
  std::optional<std::string> map_path;
  double p_intended = 0.6;
  std::optional<std::int64_t> max_steps;  // default: 20 * bound_barrier_time
  std::int64_t series_stride = 100;
};

struct CorridorConfig {
  std::size_t length = 15;
  std::size_t n_agents = 200;
  double eta = 0.1;
  double gamma = 0.9;
  double eps_explore = 0.1;
  std::int64_t episode_cap = 1000;
  std::int64_t max_episodes = 1000;
  TieBreak tie_break = TieBreak::random;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::bandit_sweep;
  std::uint64_t base_seed = 1;
  std::size_t n_runs = 8;
  std::vector<std::uint64_t> seeds;  // explicit per-run seeds; overrides base_seed/n_runs when nonempty
  std::string output_path;
  bool paper_scale = false;
  BanditSweepConfig bandit;
  GridConfig grid;
  CorridorConfig corridor;

  /// Seed of run i: seeds[i] if given, else Rng::derive_seed(base_seed, i).
  std::uint64_t run_seed(std::size_t i) const;
  std::size_t runs() const { return seeds.empty() ? n_runs : seeds.size(); }
};

/// K=1000 and 16 runs, 15x15 grid, 1000 agents.
void apply_paper_scale(ExperimentConfig& config);
/// Overwrites the fields present in a JSON object. Unknown keys and bad values throw FormatError.
void apply_json(ExperimentConfig& config, const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Throws ParameterError when a field violates its range.
void check_config(const ExperimentConfig& config);

/// Worker count: hardware concurrency capped by SAFE_EXPLORE_THREADS.
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) on a worker pool; results are returned in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn);

// Bandit sweep

struct BanditRunRow {
  double alpha = 0.0;
  double epsilon = 0.0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::size_t num_unsafe = 0;
  std::optional<double> conservation;  // C_{eps,inf}
  double exposure_over_k = 0.0;        // E_inf / K
  std::int64_t rounds = 0;
  bool complete = false;
  double exposure_bound_over_k = 0.0;
};

/// Aggregate of one metric over the complete runs of a group; incomplete runs are only counted.
struct BanditSummaryRow {
  double alpha = 0.0;
  double epsilon = 0.0;
  std::string metric;  // "C_eps_inf" or "E_inf_over_K"
  std::optional<SummaryStat> stat;
  std::size_t n_incomplete = 0;
};

struct BanditSweepResult {
  std::vector<BanditRunRow> runs;
  std::vector<BanditSummaryRow> summaries;
  const BanditSummaryRow& summary(double alpha, double epsilon, const std::string& metric) const;
  bool all_complete() const;
};

BanditSweepResult run_bandit_sweep(const ExperimentConfig& config);
void write_csv(const BanditSweepResult& result, std::ostream& out);

// Grid barrier experiment

struct GridSeriesPoint {
  std::int64_t step = 0;
  double fraction_pairs_condemned = 0.0;
  double fraction_states_condemned = 0.0;  // over non-terminal states
};

struct GridRunRow {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::vector<GridSeriesPoint> series;
  std::int64_t completion_step = 0;
  bool complete = false;
};

struct GridExperimentResult {
  double detection_time_bound = 0.0;
  std::size_t lag = 0;
  double mu = 0.0;
  std::size_t num_states = 0;
  std::size_t num_unsafe_pairs = 0;
  std::vector<GridRunRow> runs;
  std::optional<SummaryStat> completion;  // over complete runs
  bool all_complete() const;
};

GridExperimentResult run_grid_experiment(const ExperimentConfig& config);
void write_csv(const GridExperimentResult& result, std::ostream& out);

// Corridor comparison

struct CorridorAgentRow {
  AgentMode mode = AgentMode::assured;
  std::size_t agent = 0;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> transitions_to_goal;
  std::optional<std::int64_t> bumps_to_goal;
  std::int64_t condemned_reselections = 0;
  bool complete = false;
};

struct CorridorSummaryRow {
  AgentMode mode = AgentMode::assured;
  std::string metric;  // "transitions_to_goal" or "bumps_to_goal"
  std::optional<SummaryStat> stat;
  std::size_t n_incomplete = 0;
};

struct CorridorComparisonResult {
  std::vector<CorridorAgentRow> agents;
  std::vector<CorridorSummaryRow> summaries;
  bool all_complete() const;
  const CorridorSummaryRow& summary(AgentMode mode, const std::string& metric) const;
};

CorridorComparisonResult run_corridor_comparison(const ExperimentConfig& config);
void write_csv(const CorridorComparisonResult& result, std::ostream& out);

const char* to_string(AgentMode mode);

}  // namespace safe_explore

#include "safe_explore/detail/parallel.hpp"
