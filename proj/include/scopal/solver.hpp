#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "scopal/game.hpp"

namespace scopal {

/// Exhaustive memoized minimax for small perfect-information games
/// (Tic-Tac-Toe, misere Nim). Values are from the perspective of the player
/// to move: +1 win, 0 tie, -1 loss.
class MinimaxSolver {
 public:
  /// Throws GameError for games with hidden information.
  explicit MinimaxSolver(GameId game);

  int value(const GameState& state);
  /// Value for the mover of taking `action` in `state`.
  int action_value(const GameState& state, Action action);
  std::vector<Action> optimal_actions(const GameState& state);
  /// Lowest-code optimal action.
  Action best_action(const GameState& state);

  std::size_t solved_states() const { return memo_.size(); }

 private:
  GameId game_;
  std::unordered_map<std::string, int> memo_;
};

}  // namespace scopal
