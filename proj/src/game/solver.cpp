#include "scopal/solver.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace scopal {

namespace {

int result_value(Result r) { return r == Result::Win ? 1 : r == Result::Lose ? -1 : 0; }

}  // namespace

MinimaxSolver::MinimaxSolver(GameId game) : game_(game) {
  if (has_hidden_information(game))
    throw GameError(fmt::format("minimax solver needs perfect information; {} has hidden state",
                                game_name(game)));
}

int MinimaxSolver::value(const GameState& state) {
  if (auto o = terminal_outcome(state)) return result_value(o->of(state.to_move()));
  const auto key = state_key(state);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  int best = -2;
  for (auto a : legal_actions(state)) {
    best = std::max(best, action_value(state, a));
    if (best == 1) break;
  }
  memo_.emplace(key, best);
  return best;
}

int MinimaxSolver::action_value(const GameState& state, Action action) {
  const auto next = apply_action(state, action);
  if (auto o = terminal_outcome(next)) return result_value(o->of(state.to_move()));
  return -value(next);
}

std::vector<Action> MinimaxSolver::optimal_actions(const GameState& state) {
  const int v = value(state);
  std::vector<Action> out;
  for (auto a : legal_actions(state))
    if (action_value(state, a) == v) out.push_back(a);
  return out;
}

Action MinimaxSolver::best_action(const GameState& state) {
  auto best = optimal_actions(state);
  if (best.empty()) throw GameError("best_action on a terminal state");
  return best.front();
}

}  // namespace scopal
