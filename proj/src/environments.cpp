#include "safe_explore/environments.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "safe_explore/error.hpp"

namespace safe_explore {

Cell GridSpec::at(int row, int col) const {
  if (row < 0 || col < 0 || row >= height || col >= width) return Cell::wall;
  return cells[static_cast<std::size_t>(row * width + col)];
}

std::size_t GridSpec::count(Cell c) const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), c));
}

GridSpec GridSpec::parse(const std::string& text, double p_intended) {
  GridSpec g;
  g.p_intended = p_intended;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (g.width == 0) g.width = static_cast<int>(line.size());
    if (static_cast<int>(line.size()) != g.width)
      throw FormatError("grid map rows must have equal length (row " + std::to_string(g.height + 1) + ")");
    for (char ch : line) {
      switch (ch) {
        case '.': g.cells.push_back(Cell::free); break;
        case '#': g.cells.push_back(Cell::wall); break;
        case 'O': g.cells.push_back(Cell::hole); break;
        default: throw FormatError(std::string("unknown grid map character '") + ch + "'");
      }
    }
    ++g.height;
  }
  return g;
}

GridSpec GridSpec::load(const std::filesystem::path& path, double p_intended) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open grid map " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), p_intended);
}

GridSpec GridSpec::default_layout(int n, double p_intended) {
  if (n < 3) throw ParameterError("default grid layout needs n >= 3");
  GridSpec g;
  g.width = g.height = n;
  g.p_intended = p_intended;
  g.cells.assign(static_cast<std::size_t>(n * n), Cell::free);
  auto set = [&](int r, int c, Cell v) { g.cells[static_cast<std::size_t>(r * n + c)] = v; };
  set(n / 4, n / 4, Cell::hole);
  set(n / 4, (3 * n) / 4, Cell::hole);
  set((3 * n) / 4, n / 2, Cell::hole);
  for (int c = 1; c <= n / 4; ++c) set(n / 2, c, Cell::wall);
  return g;
}

std::string GridSpec::to_string() const {
  std::string out;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) out.push_back(static_cast<char>(at(r, c)));
    out.push_back('\n');
  }
  return out;
}

namespace {

constexpr int kDeltaRow[kNumMoves] = {-1, 1, 0, 0};
constexpr int kDeltaCol[kNumMoves] = {0, 0, -1, 1};

/// Accumulates branches, merging those with identical outcomes.
class BranchSet {
 public:
  void add(StateId next, double p, double reward, int damage) {
    if (p <= 0.0) return;
    merged_[{next, reward, damage}] += p;
  }
  void flush(TabularMDP& mdp, StateId s, ActionId a) const {
    for (const auto& [key, p] : merged_) {
      const auto& [next, reward, damage] = key;
      mdp.add_branch(s, a, Branch{next, p, reward, damage});
    }
  }

 private:
  std::map<std::tuple<StateId, double, int>, double> merged_;
};

}  // namespace

GridWorld build_unstable_grid(const GridSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0 ||
      spec.cells.size() != static_cast<std::size_t>(spec.width * spec.height))
    throw ParameterError("grid dimensions do not match the cell map");
  if (!(spec.p_intended > 0.0 && spec.p_intended <= 1.0)) throw ParameterError("p_intended must lie in (0, 1]");
  if (spec.count(Cell::free) == 0) throw ParameterError("grid has no free cell");

  std::vector<long> state_of_cell(spec.cells.size(), -1);
  std::vector<std::pair<int, int>> cell_of_state;
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c)
      if (spec.at(r, c) == Cell::free) {
        state_of_cell[static_cast<std::size_t>(r * spec.width + c)] = static_cast<long>(cell_of_state.size());
        cell_of_state.emplace_back(r, c);
      }

  const StateId sink = cell_of_state.size();
  TabularMDP mdp(cell_of_state.size() + 1, kNumMoves);
  const double slip = (1.0 - spec.p_intended) / static_cast<double>(kNumMoves);

  for (StateId s = 0; s < sink; ++s) {
    const auto [row, col] = cell_of_state[s];
    for (ActionId a = 0; a < kNumMoves; ++a) {
      BranchSet set;
      for (std::size_t dir = 0; dir < kNumMoves; ++dir) {
        const double p = (dir == a) ? spec.p_intended + slip : slip;
        const int nr = row + kDeltaRow[dir];
        const int nc = col + kDeltaCol[dir];
        switch (spec.at(nr, nc)) {
          case Cell::wall: set.add(s, p, 0.0, 0); break;
          case Cell::hole: set.add(sink, p, 0.0, 1); break;
          case Cell::free:
            set.add(static_cast<StateId>(state_of_cell[static_cast<std::size_t>(nr * spec.width + nc)]), p, 0.0, 0);
            break;
        }
      }
      set.flush(mdp, s, a);
    }
  }
  mdp.make_terminal(sink);
  return GridWorld{std::move(mdp), std::move(cell_of_state), sink};
}

Corridor build_corridor(std::size_t length) {
  if (length < 2) throw ParameterError("corridor length must be at least 2");
  Corridor c{TabularMDP(length + 2, kNumMoves), length, 0, length, length + 1};
  auto& mdp = c.mdp;
  for (std::size_t i = 1; i <= length; ++i) {
    const StateId s = c.cell(i);
    mdp.add_branch(s, kUp, Branch{c.damage_sink, 1.0, 0.0, 1});
    mdp.add_branch(s, kDown, Branch{c.damage_sink, 1.0, 0.0, 1});
    if (i == 1)
      mdp.add_branch(s, kLeft, Branch{c.damage_sink, 1.0, 0.0, 1});
    else
      mdp.add_branch(s, kLeft, Branch{c.cell(i - 1), 1.0, 0.0, 0});
    if (i + 1 < length)
      mdp.add_branch(s, kRight, Branch{c.cell(i + 1), 1.0, 0.0, 0});
    else
      mdp.add_branch(s, kRight, Branch{c.goal, 1.0, kCorridorGoalReward, 0});
  }
  mdp.make_terminal(c.goal);
  mdp.make_terminal(c.damage_sink);
  return c;
}

TabularMDP gen_random_mdp(std::size_t n_states, std::size_t n_actions, std::size_t branch_factor,
                          double damage_density, std::uint64_t seed, const RandomMdpOptions& options) {
  if (n_states == 0 || n_actions == 0 || branch_factor == 0) throw ParameterError("random MDP sizes must be positive");
  if (!(damage_density >= 0.0 && damage_density <= 1.0)) throw ParameterError("damage_density must lie in [0, 1]");
  if (!(options.min_weight > 0.0 && options.min_weight <= options.max_weight))
    throw ParameterError("need 0 < min_weight <= max_weight");

  Rng rng(seed);
  const std::size_t total = n_states + (options.damage_to_sink ? 1 : 0);
  TabularMDP mdp(total, n_actions);
  const std::size_t fanout = std::min(branch_factor, n_states);

  for (StateId s = 0; s < n_states; ++s) {
    for (ActionId a = 0; a < n_actions; ++a) {
      std::vector<StateId> succ;
      if (a == 0) succ.push_back((s + 1) % n_states);
      while (succ.size() < fanout) {
        const StateId cand = rng.index(n_states);
        if (std::find(succ.begin(), succ.end(), cand) == succ.end()) succ.push_back(cand);
      }
      std::vector<double> w(succ.size());
      double wsum = 0.0;
      for (auto& x : w) wsum += (x = rng.uniform(options.min_weight, options.max_weight));

      BranchSet set;
      for (std::size_t k = 0; k < succ.size(); ++k) {
        const int damage = rng.bernoulli(damage_density) ? 1 : 0;
        const double reward = rng.uniform(0.0, options.max_reward);
        if (damage && options.damage_to_sink)
          set.add(n_states, w[k] / wsum, 0.0, 1);
        else
          set.add(succ[k], w[k] / wsum, reward, damage);
      }
      set.flush(mdp, s, a);
    }
  }
  if (options.damage_to_sink) mdp.make_terminal(n_states);
  return mdp;
}

}  // namespace safe_explore
