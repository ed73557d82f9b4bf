#include "safe_explore/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "safe_explore/bandit.hpp"
#include "safe_explore/barrier.hpp"
#include "safe_explore/csv.hpp"
#include "safe_explore/environments.hpp"
#include "safe_explore/error.hpp"

namespace safe_explore {

using nlohmann::json;

std::uint64_t ExperimentConfig::run_seed(std::size_t i) const {
  if (!seeds.empty()) {
    if (i >= seeds.size()) throw IndexError("run index beyond the seed list");
    return seeds[i];
  }
  return Rng::derive_seed(base_seed, i);
}

void apply_paper_scale(ExperimentConfig& config) {
  config.paper_scale = true;
  config.bandit.k = 1000;
  config.n_runs = 16;
  config.grid.size = 15;
  config.corridor.n_agents = 1000;
}

namespace {

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw FormatError("config field '" + key + "': " + e.what());
  }
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw FormatError("config section '" + where + "' must be an object");
}

void apply_bandit(BanditSweepConfig& c, const json& j) {
  require_object(j, "bandit");
  for (const auto& [key, v] : j.items()) {
    if (key == "k") c.k = get_as<std::size_t>(v, key);
    else if (key == "mu") c.mu = get_as<double>(v, key);
    else if (key == "epsilons") c.epsilons = get_as<std::vector<double>>(v, key);
    else if (key == "alphas") c.alphas = get_as<std::vector<double>>(v, key);
    else if (key == "arm_lo") c.arm_lo = get_as<double>(v, key);
    else if (key == "arm_hi") c.arm_hi = get_as<double>(v, key);
    else if (key == "arms_path") c.arms_path = get_as<std::string>(v, key);
    else if (key == "max_rounds") c.max_rounds = get_as<std::int64_t>(v, key);
    else throw FormatError("unknown config field 'bandit." + key + "'");
  }
}

void apply_grid(GridConfig& c, const json& j) {
  require_object(j, "grid");
  for (const auto& [key, v] : j.items()) {
    if (key == "size") c.size = get_as<int>(v, key);
    else if (key == "map_path") c.map_path = get_as<std::string>(v, key);
    else if (key == "p_intended") c.p_intended = get_as<double>(v, key);
    else if (key == "max_steps") c.max_steps = get_as<std::int64_t>(v, key);
    else if (key == "series_stride") c.series_stride = get_as<std::int64_t>(v, key);
    else throw FormatError("unknown config field 'grid." + key + "'");
  }
}

TieBreak parse_tie_break(const std::string& s) {
  if (s == "random") return TieBreak::random;
  if (s == "lowest_index") return TieBreak::lowest_index;
  throw FormatError("tie_break must be 'random' or 'lowest_index'");
}

void apply_corridor(CorridorConfig& c, const json& j) {
  require_object(j, "corridor");
  for (const auto& [key, v] : j.items()) {
    if (key == "length") c.length = get_as<std::size_t>(v, key);
    else if (key == "n_agents") c.n_agents = get_as<std::size_t>(v, key);
    else if (key == "eta") c.eta = get_as<double>(v, key);
    else if (key == "gamma") c.gamma = get_as<double>(v, key);
    else if (key == "eps_explore") c.eps_explore = get_as<double>(v, key);
    else if (key == "episode_cap") c.episode_cap = get_as<std::int64_t>(v, key);
    else if (key == "max_episodes") c.max_episodes = get_as<std::int64_t>(v, key);
    else if (key == "tie_break") c.tie_break = parse_tie_break(get_as<std::string>(v, key));
    else throw FormatError("unknown config field 'corridor." + key + "'");
  }
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "bandit_sweep") return ExperimentKind::bandit_sweep;
  if (s == "grid_barrier") return ExperimentKind::grid_barrier;
  if (s == "corridor_compare") return ExperimentKind::corridor_compare;
  throw FormatError("unknown experiment '" + s + "'");
}

}  // namespace

void apply_json(ExperimentConfig& config, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(j, "top level");
  // paper scale first so that explicit fields still override it
  if (j.contains("paper_scale") && get_as<bool>(j["paper_scale"], "paper_scale")) apply_paper_scale(config);
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment") config.experiment = parse_kind(get_as<std::string>(v, key));
    else if (key == "base_seed") config.base_seed = get_as<std::uint64_t>(v, key);
    else if (key == "n_runs") config.n_runs = get_as<std::size_t>(v, key);
    else if (key == "seeds") config.seeds = get_as<std::vector<std::uint64_t>>(v, key);
    else if (key == "output_path") config.output_path = get_as<std::string>(v, key);
    else if (key == "paper_scale") continue;
    else if (key == "bandit") apply_bandit(config.bandit, v);
    else if (key == "grid") apply_grid(config.grid, v);
    else if (key == "corridor") apply_corridor(config.corridor, v);
    else throw FormatError("unknown config field '" + key + "'");
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig config;
  apply_json(config, ss.str());
  return config;
}

void check_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw ParameterError(msg); };
  if (c.runs() == 0) fail("n_runs must be at least 1");
  const auto& b = c.bandit;
  if (b.k == 0) fail("bandit.k must be positive");
  if (!(b.mu > 0.0 && b.mu < 1.0)) fail("bandit.mu must lie in (0, 1)");
  if (b.epsilons.empty() || b.alphas.empty()) fail("bandit.epsilons and bandit.alphas must be nonempty");
  for (double e : b.epsilons)
    if (!(e > 0.0 && e <= b.mu)) fail("bandit.epsilons must lie in (0, mu]");
  for (double a : b.alphas)
    if (!(a > 0.0 && a <= 1.0)) fail("bandit.alphas must lie in (0, 1]");
  if (!(b.arm_lo >= 0.0 && b.arm_lo <= b.arm_hi && b.arm_hi <= 1.0)) fail("need 0 <= arm_lo <= arm_hi <= 1");
  if (b.max_rounds && *b.max_rounds <= 0) fail("bandit.max_rounds must be positive");
  const auto& g = c.grid;
  if (!g.map_path && g.size < 3) fail("grid.size must be at least 3");
  if (!(g.p_intended > 0.0 && g.p_intended <= 1.0)) fail("grid.p_intended must lie in (0, 1]");
  if (g.max_steps && *g.max_steps <= 0) fail("grid.max_steps must be positive");
  if (g.series_stride <= 0) fail("grid.series_stride must be positive");
  const auto& k = c.corridor;
  if (k.length < 2) fail("corridor.length must be at least 2");
  if (k.n_agents == 0) fail("corridor.n_agents must be positive");
  if (k.max_episodes <= 0) fail("corridor.max_episodes must be positive");
  check_params(LearnerParams{k.eta, k.gamma, k.eps_explore, k.episode_cap, StepSchedule::constant, k.tie_break});
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SAFE_EXPLORE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

namespace {

std::optional<SummaryStat> summarize(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return aggregate(xs);
}

void write_stat(CsvWriter::Row& row, const std::optional<SummaryStat>& stat) {
  if (stat)
    row << stat->mean << stat->std_error;
  else
    row << "" << "";
}

}  // namespace

// ---------------------------------------------------------------- bandit

bool BanditSweepResult::all_complete() const {
  return std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.complete; });
}

const BanditSummaryRow& BanditSweepResult::summary(double alpha, double epsilon, const std::string& metric) const {
  for (const auto& s : summaries)
    if (s.alpha == alpha && s.epsilon == epsilon && s.metric == metric) return s;
  throw IndexError("no summary for alpha/epsilon/metric");
}

BanditSweepResult run_bandit_sweep(const ExperimentConfig& config) {
  check_config(config);
  const auto& c = config.bandit;
  const std::size_t runs = config.runs();
  const std::size_t n_eps = c.epsilons.size();
  const std::size_t n_tasks = c.alphas.size() * n_eps * runs;
  std::optional<std::vector<double>> fixed_arms;
  if (c.arms_path) fixed_arms = bandit::load_arm_parameters(*c.arms_path);

  std::function<BanditRunRow(std::size_t)> task = [&](std::size_t t) {
    const std::size_t run = t % runs;
    const double epsilon = c.epsilons[(t / runs) % n_eps];
    const double alpha = c.alphas[t / (runs * n_eps)];
    const std::uint64_t seed = config.run_seed(run);
    Rng arm_rng = Rng::split(seed, 0);
    const auto inst = fixed_arms ? bandit::BanditInstance(*fixed_arms, c.mu)
                                 : bandit::BanditInstance::uniform(c.k, c.arm_lo, c.arm_hi, c.mu, arm_rng);
    const bandit::RelaxedMode mode{epsilon, alpha};
    const auto max_rounds = c.max_rounds ? *c.max_rounds : bandit::default_max_rounds(inst, mode);
    Rng rng = Rng::split(seed, 1);
    bandit::RunOptions opts;
    opts.record_events = false;
    const auto rec = bandit::run_inspector(inst, mode, rng, max_rounds, opts);

    BanditRunRow row;
    row.alpha = alpha;
    row.epsilon = epsilon;
    row.run = run;
    row.seed = seed;
    row.num_unsafe = inst.num_unsafe();
    row.conservation = rec.final_conservation_ratio;
    const double k = static_cast<double>(inst.num_arms());
    row.exposure_over_k = static_cast<double>(rec.final_exposure) / k;
    row.rounds = rec.stop_round;
    row.complete = rec.complete;
    const auto b = (epsilon < c.mu) ? bandit::bounds(inst, mode) : bandit::bounds(inst);
    row.exposure_bound_over_k =
        (epsilon < c.mu ? *b.relaxed_exposure_bound : b.flawless_exposure_bound) / k;
    return row;
  };

  BanditSweepResult out;
  out.runs = parallel_map(n_tasks, task);
  for (double alpha : c.alphas)
    for (double epsilon : c.epsilons) {
      std::vector<double> cons, expo;
      std::size_t incomplete = 0;
      for (const auto& r : out.runs) {
        if (r.alpha != alpha || r.epsilon != epsilon) continue;
        if (!r.complete) {
          ++incomplete;
          continue;
        }
        if (r.conservation) cons.push_back(*r.conservation);
        expo.push_back(r.exposure_over_k);
      }
      out.summaries.push_back({alpha, epsilon, "C_eps_inf", summarize(cons), incomplete});
      out.summaries.push_back({alpha, epsilon, "E_inf_over_K", summarize(expo), incomplete});
    }
  return out;
}

void write_csv(const BanditSweepResult& result, std::ostream& out) {
  CsvWriter csv(out, {"row_type", "alpha", "epsilon", "run", "seed", "num_unsafe", "complete", "rounds", "C_eps_inf",
                      "E_inf_over_K", "exposure_bound_over_K", "metric", "mean", "stderr", "n", "n_incomplete"});
  for (const auto& r : result.runs)
    csv.row() << "run" << r.alpha << r.epsilon << r.run << r.seed << r.num_unsafe << r.complete << r.rounds
              << r.conservation << r.exposure_over_k << r.exposure_bound_over_k;
  for (const auto& s : result.summaries) {
    auto row = csv.row();
    row << "summary" << s.alpha << s.epsilon << "" << "" << "" << "" << "" << "" << "" << "" << s.metric;
    write_stat(row, s.stat);
    row << (s.stat ? s.stat->n : std::size_t{0}) << s.n_incomplete;
  }
}

// ---------------------------------------------------------------- grid

bool GridExperimentResult::all_complete() const {
  return std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.complete; });
}

namespace {

GridSpec grid_spec(const GridConfig& g) {
  return g.map_path ? GridSpec::load(*g.map_path, g.p_intended) : GridSpec::default_layout(g.size, g.p_intended);
}

/// Fractions of condemned pairs and non-terminal states at a sequence of steps.
std::vector<GridSeriesPoint> condemnation_series(const TabularMDP& mdp, const BarrierRun& run, std::int64_t stride) {
  std::vector<std::int64_t> pair_steps;
  for (const auto& d : run.detection_step)
    if (d) pair_steps.push_back(*d);
  std::vector<std::int64_t> state_steps;
  std::size_t live_states = 0;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    ++live_states;
    std::int64_t last = 0;
    bool all = true;
    for (ActionId a = 0; a < mdp.num_actions() && all; ++a) {
      const auto& d = run.detection_step[mdp.pair_index(s, a)];
      all = d.has_value();
      if (all) last = std::max(last, *d);
    }
    if (all) state_steps.push_back(last);
  }
  std::sort(pair_steps.begin(), pair_steps.end());
  std::sort(state_steps.begin(), state_steps.end());

  std::vector<std::int64_t> at;
  for (std::int64_t t = 0; t < run.steps; t += stride) at.push_back(t);
  at.push_back(run.steps);

  std::vector<GridSeriesPoint> out;
  std::size_t ip = 0, is = 0;
  for (std::int64_t t : at) {
    while (ip < pair_steps.size() && pair_steps[ip] <= t) ++ip;
    while (is < state_steps.size() && state_steps[is] <= t) ++is;
    out.push_back({t, static_cast<double>(ip) / static_cast<double>(mdp.num_pairs()),
                   live_states ? static_cast<double>(is) / static_cast<double>(live_states) : 0.0});
  }
  return out;
}

}  // namespace

GridExperimentResult run_grid_experiment(const ExperimentConfig& config) {
  check_config(config);
  const auto world = build_unstable_grid(grid_spec(config.grid));
  const auto& mdp = world.mdp;

  GridExperimentResult out;
  out.detection_time_bound = bound_barrier_time(mdp);
  out.lag = lag_partition(mdp).lag;
  out.mu = min_nonzero_prob(mdp);
  out.num_states = mdp.num_states();
  out.num_unsafe_pairs = bstar_oracle(mdp).count_condemned();
  const std::int64_t max_steps =
      config.grid.max_steps ? *config.grid.max_steps : static_cast<std::int64_t>(std::ceil(20.0 * out.detection_time_bound));

  std::function<GridRunRow(std::size_t)> task = [&](std::size_t i) {
    const std::uint64_t seed = config.run_seed(i);
    Rng rng(seed);
    BarrierLearnerOptions opts;
    opts.record_trace = false;
    const auto run = barrier_learner(mdp, rng, max_steps, opts);
    return GridRunRow{i, seed, condemnation_series(mdp, run, config.grid.series_stride), run.steps, run.complete};
  };
  out.runs = parallel_map(config.runs(), task);

  std::vector<double> steps;
  for (const auto& r : out.runs)
    if (r.complete) steps.push_back(static_cast<double>(r.completion_step));
  out.completion = summarize(steps);
  return out;
}

void write_csv(const GridExperimentResult& result, std::ostream& out) {
  CsvWriter csv(out, {"row_type", "run", "seed", "step", "fraction_pairs_condemned", "fraction_states_condemned",
                      "completion_step", "complete", "detection_time_bound", "lag", "mu", "mean", "stderr", "n",
                      "n_incomplete"});
  for (const auto& r : result.runs)
    for (const auto& p : r.series)
      csv.row() << "series" << r.run << r.seed << p.step << p.fraction_pairs_condemned << p.fraction_states_condemned;
  for (const auto& r : result.runs) {
    auto row = csv.row();
    row << "run" << r.run << r.seed << "" << "" << "" << r.completion_step << r.complete << result.detection_time_bound
        << result.lag << result.mu;
  }
  const auto incomplete = static_cast<std::size_t>(
      std::count_if(result.runs.begin(), result.runs.end(), [](const auto& r) { return !r.complete; }));
  auto row = csv.row();
  row << "summary" << "" << "" << "" << "" << "" << "" << "" << result.detection_time_bound << result.lag << result.mu;
  write_stat(row, result.completion);
  row << (result.completion ? result.completion->n : std::size_t{0}) << incomplete;
}

// ---------------------------------------------------------------- corridor

const char* to_string(AgentMode mode) { return mode == AgentMode::assured ? "assured" : "classic"; }

bool CorridorComparisonResult::all_complete() const {
  return std::all_of(agents.begin(), agents.end(), [](const auto& a) { return a.complete; });
}

const CorridorSummaryRow& CorridorComparisonResult::summary(AgentMode mode, const std::string& metric) const {
  for (const auto& s : summaries)
    if (s.mode == mode && s.metric == metric) return s;
  throw IndexError("no summary for mode/metric");
}

CorridorComparisonResult run_corridor_comparison(const ExperimentConfig& config) {
  check_config(config);
  const auto& c = config.corridor;
  const auto corridor = build_corridor(c.length);
  const std::size_t n = config.seeds.empty() ? c.n_agents : config.seeds.size();
  const AgentMode modes[] = {AgentMode::assured, AgentMode::classic};
  const LearnerParams params{c.eta, c.gamma, c.eps_explore, c.episode_cap, StepSchedule::constant, c.tie_break};
  EpisodicOptions opts;
  opts.start = corridor.start;
  opts.goal = corridor.goal;
  opts.max_episodes = c.max_episodes;

  std::function<CorridorAgentRow(std::size_t)> task = [&](std::size_t t) {
    const std::size_t mode_index = t / n;
    const std::size_t agent = t % n;
    const std::uint64_t seed = Rng::derive_seed(config.run_seed(agent), mode_index);
    Rng rng(seed);
    const auto log = run_episodic(corridor.mdp, modes[mode_index], params, rng, opts);
    return CorridorAgentRow{modes[mode_index],  agent, seed, log.transitions_to_goal, log.bumps_to_goal,
                            log.condemned_reselections, log.complete};
  };

  CorridorComparisonResult out;
  out.agents = parallel_map(2 * n, task);
  for (AgentMode mode : modes) {
    std::vector<double> transitions, bumps;
    std::size_t incomplete = 0;
    for (const auto& a : out.agents) {
      if (a.mode != mode) continue;
      if (!a.complete) {
        ++incomplete;
        continue;
      }
      transitions.push_back(static_cast<double>(*a.transitions_to_goal));
      bumps.push_back(static_cast<double>(*a.bumps_to_goal));
    }
    out.summaries.push_back({mode, "transitions_to_goal", summarize(transitions), incomplete});
    out.summaries.push_back({mode, "bumps_to_goal", summarize(bumps), incomplete});
  }
  return out;
}

void write_csv(const CorridorComparisonResult& result, std::ostream& out) {
  CsvWriter csv(out, {"row_type", "mode", "agent", "seed", "complete", "transitions_to_goal", "bumps_to_goal",
                      "condemned_reselections", "metric", "mean", "stderr", "variance", "n", "n_incomplete"});
  for (const auto& a : result.agents)
    csv.row() << "agent" << to_string(a.mode) << a.agent << a.seed << a.complete << a.transitions_to_goal
              << a.bumps_to_goal << a.condemned_reselections;
  for (const auto& s : result.summaries) {
    auto row = csv.row();
    row << "summary" << to_string(s.mode) << "" << "" << "" << "" << "" << "" << s.metric;
    write_stat(row, s.stat);
    if (s.stat)
      row << s.stat->variance << s.stat->n;
    else
      row << "" << std::size_t{0};
    row << s.n_incomplete;
  }
}

}  // namespace safe_explore
