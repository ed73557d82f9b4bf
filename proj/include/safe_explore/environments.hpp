#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "safe_explore/mdp.hpp"

namespace safe_explore {

/// Action indices shared by the grid and the corridor.
enum Move : ActionId { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr std::size_t kNumMoves = 4;

enum class Cell : char { free = '.', wall = '#', hole = 'O' };

/// Rectangular map; cells outside the rectangle behave as walls.
struct GridSpec {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;  // row-major, height rows of width cells
  double p_intended = 0.6;

  Cell at(int row, int col) const;
  std::size_t count(Cell c) const;

  /// Map text: one row per line using '.', '#', 'O'. Rows must have equal length.
  static GridSpec parse(const std::string& text, double p_intended);
  static GridSpec load(const std::filesystem::path& path, double p_intended);
  /// Open n x n grid with a few interior holes and one short wall segment.
  static GridSpec default_layout(int n, double p_intended);

  std::string to_string() const;
};

struct GridWorld {
  TabularMDP mdp;
  std::vector<std::pair<int, int>> cell_of_state;  // (row, col) per free-cell state
  StateId sink = 0;                                // terminal damage sink, last state
};

/**
 * Unstable grid: the intended move happens with probability p, otherwise a
 * uniformly random direction (the intended one included) is taken, so each
 * direction gets (1-p)/4 and the intended one p + (1-p)/4. Moves into walls or
 * off the map stay put; moves into holes reach the sink with damage. Branches
 * with the same outcome are merged. All rewards are 0.
 */
GridWorld build_unstable_grid(const GridSpec& spec);

struct Corridor {
  TabularMDP mdp;
  std::size_t length = 0;
  StateId start = 0;        // s_1
  StateId goal = 0;         // terminal goal sink
  StateId damage_sink = 0;  // terminal damage sink
  StateId cell(std::size_t i) const { return i - 1; }  // s_i, 1-based
};

inline constexpr double kCorridorGoalReward = 100.0;

/**
 * Deterministic corridor s_1..s_L. Up/down anywhere and left at s_1 damage
 * the agent and end in the damage sink. Stepping right from s_{L-1} (or from
 * s_L) reaches the goal sink with reward +100.
 */
Corridor build_corridor(std::size_t length);

struct RandomMdpOptions {
  /// Route damaging branches to an extra terminal sink (state index n_states).
  bool damage_to_sink = false;
  double min_weight = 1.0;  // branch weights uniform on [min_weight, max_weight] before normalizing
  double max_weight = 2.0;
  double max_reward = 1.0;  // rewards uniform on [0, max_reward]
};

/**
 * Random kernel over n_states states. Action 0 of state s always includes a
 * branch to s+1 (mod n), so the chain is strongly connected. Each branch
 * carries damage with probability damage_density. Deterministic in seed.
 */
TabularMDP gen_random_mdp(std::size_t n_states, std::size_t n_actions, std::size_t branch_factor,
                          double damage_density, std::uint64_t seed, const RandomMdpOptions& options = {});

}  // namespace safe_explore
