#include "safe_explore/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <optional>
#include <sstream>

#include "safe_explore/barrier.hpp"
#include "safe_explore/csv.hpp"
#include "safe_explore/environments.hpp"
#include "safe_explore/error.hpp"
#include "safe_explore/experiments.hpp"
#include "safe_explore/mdp_io.hpp"

namespace safe_explore {

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::vector<std::uint64_t> seeds;
  std::string out_path;
  std::string export_mdp;
  bool paper_scale = false;
  bool strict = false;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "JSON config; flags override its fields")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "base seed; run i uses split(seed, i)");
  sub->add_option("--runs", f.runs, "number of replications");
  sub->add_option("--seeds", f.seeds, "explicit per-run seeds");
  sub->add_option("--out", f.out_path, "CSV output path (default: stdout)");
  sub->add_flag("--paper-scale", f.paper_scale, "K=1000/16 runs, 15x15 grid, 1000 agents");
  sub->add_flag("--strict", f.strict, "exit 2 when any run is incomplete");
}

template <class T>
void override_if(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

template <class Result>
int emit(const Result& result, const ExperimentConfig& config, const CommonFlags& flags, std::ostream& out,
         std::ostream& err) {
  const std::string path = flags.out_path.empty() ? config.output_path : flags.out_path;
  if (path.empty()) {
    write_csv(result, out);
  } else {
    std::ofstream file(path);
    if (!file) throw FormatError("cannot write " + path);
    write_csv(result, file);
    out << "wrote " << path << '\n';
  }
  if (!result.all_complete()) {
    err << "warning: some runs did not complete within their horizon\n";
    if (flags.strict) return kExitIncomplete;
  }
  return kExitOk;
}

void print_oracle(const TabularMDP& mdp, std::ostream& out) {
  const auto bstar = bstar_oracle(mdp);
  const auto lag = lag_partition(mdp);
  out << "states " << mdp.num_states() << '\n'
      << "actions " << mdp.num_actions() << '\n'
      << "unsafe_pairs " << bstar.count_condemned() << '\n'
      << "lag " << lag.lag << '\n';
  for (std::size_t l = 0; l < lag.unsafe_levels.size(); ++l) {
    out << "level " << (l + 1) << ':';
    for (StateId s : lag.unsafe_levels[l]) out << ' ' << s;
    out << '\n';
  }
  out << "safe_remainder:";
  for (StateId s : lag.safe_remainder) out << ' ' << s;
  out << '\n'
      << "mu " << format_number(min_nonzero_prob(mdp)) << '\n'
      << "detection_time_bound " << format_number(bound_barrier_time(mdp)) << '\n';
  CsvWriter csv(out, {"s", "a", "bstar"});
  for (StateId s = 0; s < mdp.num_states(); ++s)
    for (ActionId a = 0; a < mdp.num_actions(); ++a) csv.row() << s << a << bstar.at(s, a);
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Safe exploration: unsafe-arm inspectors, barrier learning and assured Q-learning"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* bandit = app.add_subcommand("bandit", "relaxed inspector sweep over alpha and epsilon");
  add_common(bandit, flags);
  std::optional<std::size_t> k;
  std::optional<double> mu, arm_lo, arm_hi;
  std::vector<double> epsilons, alphas;
  std::optional<std::string> arms_path;
  std::optional<std::int64_t> max_rounds;
  bandit->add_option("--k", k, "number of arms");
  bandit->add_option("--mu", mu, "safety level");
  bandit->add_option("--epsilons", epsilons, "slack values in (0, mu]");
  bandit->add_option("--alphas", alphas, "failure tolerances in (0, 1]");
  bandit->add_option("--arm-lo", arm_lo, "lower end of sampled arm parameters");
  bandit->add_option("--arm-hi", arm_hi, "upper end of sampled arm parameters");
  bandit->add_option("--arms", arms_path, "file with one arm parameter per line")->check(CLI::ExistingFile);
  bandit->add_option("--max-rounds", max_rounds, "horizon per run (default: 10x time bound)");

  auto* grid = app.add_subcommand("grid", "barrier learner on the unstable grid");
  add_common(grid, flags);
  std::optional<int> size;
  std::optional<std::string> map_path;
  std::optional<double> p_intended;
  std::optional<std::int64_t> max_steps, stride;
  grid->add_option("--size", size, "side of the default square layout");
  grid->add_option("--map", map_path, "map file ('.' free, '#' wall, 'O' hole)")->check(CLI::ExistingFile);
  grid->add_option("--p", p_intended, "probability of the intended move");
  grid->add_option("--max-steps", max_steps, "step budget per run (default: 20x bound)");
  grid->add_option("--stride", stride, "series sampling stride");
  grid->add_option("--export-mdp", flags.export_mdp, "write the grid MDP as JSON and exit");

  auto* corridor = app.add_subcommand("corridor", "assured vs classic Q-learning on the corridor");
  add_common(corridor, flags);
  std::optional<std::size_t> length, agents;
  std::optional<double> eta, gamma, eps;
  std::optional<std::int64_t> episode_cap, max_episodes;
  std::optional<std::string> tie_break;
  corridor->add_option("--length", length, "number of corridor cells");
  corridor->add_option("--agents", agents, "agents per mode");
  corridor->add_option("--eta", eta, "learning rate");
  corridor->add_option("--gamma", gamma, "discount factor");
  corridor->add_option("--eps", eps, "exploration probability");
  corridor->add_option("--episode-cap", episode_cap, "steps per episode");
  corridor->add_option("--max-episodes", max_episodes, "episodes per agent before giving up");
  corridor->add_option("--tie-break", tie_break, "random | lowest_index")
      ->check(CLI::IsMember({"random", "lowest_index"}));
  corridor->add_option("--export-mdp", flags.export_mdp, "write the corridor MDP as JSON and exit");

  std::string mdp_path;
  auto* oracle = app.add_subcommand("oracle", "print B*, lag partition and bound for an MDP file");
  oracle->add_option("--mdp", mdp_path, "MDP JSON file")->required();
  auto* validate_cmd = app.add_subcommand("validate", "check an MDP file");
  validate_cmd->add_option("--mdp", mdp_path, "MDP JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitConfigError;
  }

  try {
    if (oracle->parsed()) {
      print_oracle(load_mdp(mdp_path), out);
      return kExitOk;
    }
    if (validate_cmd->parsed()) {
      const auto mdp = load_mdp_unchecked(mdp_path);
      const auto violations = validate(mdp);
      if (violations.empty()) {
        out << "ok: " << mdp.num_states() << " states, " << mdp.num_actions() << " actions\n";
        return kExitOk;
      }
      err << format_violations(violations);
      return kExitConfigError;
    }

    ExperimentConfig config;
    if (flags.paper_scale) apply_paper_scale(config);
    if (!flags.config_path.empty()) {
      std::ifstream in(flags.config_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      apply_json(config, ss.str());
    }
    override_if(flags.seed, config.base_seed);
    override_if(flags.runs, config.n_runs);
    if (!flags.seeds.empty()) config.seeds = flags.seeds;

    if (bandit->parsed()) {
      config.experiment = ExperimentKind::bandit_sweep;
      auto& c = config.bandit;
      override_if(k, c.k);
      override_if(mu, c.mu);
      override_if(arm_lo, c.arm_lo);
      override_if(arm_hi, c.arm_hi);
      if (!epsilons.empty()) c.epsilons = epsilons;
      if (!alphas.empty()) c.alphas = alphas;
      if (arms_path) c.arms_path = arms_path;
      if (max_rounds) c.max_rounds = max_rounds;
      return emit(run_bandit_sweep(config), config, flags, out, err);
    }
    if (grid->parsed()) {
      config.experiment = ExperimentKind::grid_barrier;
      auto& c = config.grid;
      override_if(size, c.size);
      if (map_path) c.map_path = map_path;
      override_if(p_intended, c.p_intended);
      if (max_steps) c.max_steps = max_steps;
      override_if(stride, c.series_stride);
      if (!flags.export_mdp.empty()) {
        const auto spec = c.map_path ? GridSpec::load(*c.map_path, c.p_intended) : GridSpec::default_layout(c.size, c.p_intended);
        save_mdp(build_unstable_grid(spec).mdp, flags.export_mdp);
        return kExitOk;
      }
      return emit(run_grid_experiment(config), config, flags, out, err);
    }
    config.experiment = ExperimentKind::corridor_compare;
    auto& c = config.corridor;
    override_if(length, c.length);
    override_if(agents, c.n_agents);
    override_if(eta, c.eta);
    override_if(gamma, c.gamma);
    override_if(eps, c.eps_explore);
    override_if(episode_cap, c.episode_cap);
    override_if(max_episodes, c.max_episodes);
    if (tie_break) c.tie_break = (*tie_break == "random") ? TieBreak::random : TieBreak::lowest_index;
    if (!flags.export_mdp.empty()) {
      save_mdp(build_corridor(c.length).mdp, flags.export_mdp);
      return kExitOk;
    }
    return emit(run_corridor_comparison(config), config, flags, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace safe_explore
