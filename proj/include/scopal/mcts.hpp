#pragma once

// Symbolic opponents: uniform random play and UCT Monte Carlo tree search.
//
// Strength is controlled by the simulation budget. For Kuhn Poker and Liar's
// Dice the search determinizes: each simulation resamples the information
// hidden from the acting player before descending the shared tree.

#include <cstdint>
#include <vector>

#include "scopal/game.hpp"

namespace scopal {

struct MctsConfig {
  int max_simulations = 1000;
  int rollout_count = 1;
  double exploration_c = 2.0;
  std::uint64_t rng_seed = 0;
};

/// Simulation budgets of the opponent ladder, weakest first.
inline constexpr std::array<int, 6> kMctsLadder = {5, 10, 100, 200, 500, 1000};

struct SearchNode {
  /// Sum of simulation scores credited to the player who moved into this
  /// node (win 1, tie 0.5, loss 0). At the root: the root mover.
  double wins = 0.0;
  int visits = 0;
  Action action{};          // move leading here; unused at the root
  Player mover = Player::P1;  // player who chose `action`
  int parent = -1;
  std::vector<int> children;
  std::vector<Action> untried;
  bool terminal = false;
};

/// w/n + c * sqrt(ln N / n). Unvisited nodes score +infinity.
double uct_score(const SearchNode& node, int parent_visits, double c);

/// One search tree grown from a root state.
class MctsSearch {
 public:
  MctsSearch(const GameState& root, const MctsConfig& config);

  /// Runs the configured number of simulations.
  void run();
  /// Most visited root child; ties go to the lowest action code.
  Action best_action() const;

  const std::vector<SearchNode>& nodes() const { return nodes_; }
  const SearchNode& root() const { return nodes_.front(); }
  /// Total score credited to the root mover across all simulations.
  double root_score_total() const { return root_score_total_; }

 private:
  double simulate(GameState state);
  double rollout(GameState state, Player perspective);

  GameState root_state_;
  MctsConfig config_;
  Rng rng_;
  std::vector<SearchNode> nodes_;
  std::vector<Action> buffer_;
  double root_score_total_ = 0.0;
};

/// Throws GameError on a terminal state.
Action mcts_act(const GameState& state, const MctsConfig& config);

/// Uniform over legal actions. Throws GameError on a terminal state.
Action random_act(const GameState& state, std::uint64_t seed);

}  // namespace scopal
