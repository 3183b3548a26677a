#pragma once

// State-action feature maps for the linear softmax policy.
//
// Board games (Tic-Tac-Toe, Connect Four, Breakthrough) describe the position
// after the move from the mover's point of view plus line and threat counts.
// Nim uses pile occupancies and nim-sum indicators of the resulting position.
// Kuhn Poker and Liar's Dice use one-hot (observation, action) tables built
// only from what the mover can see.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scopal/game.hpp"

namespace scopal {

int feature_dimension(GameId game, const GameOptions& options = {});

/// Writes phi(state, action) into `out`, which must have the game's dimension.
void encode_features(const GameState& state, Action action, std::span<double> out);

/// A decision point with one feature row per legal action (canonical order).
/// Rows are stored sparsely; most games light up a handful of entries.
struct Decision {
  GameId game = GameId::TicTacToe;
  int dim = 0;
  std::vector<Action> actions;
  std::vector<std::uint32_t> row_start;  // size() + 1 entries
  std::vector<std::int32_t> index;
  std::vector<double> value;

  std::size_t size() const { return actions.size(); }
  std::optional<std::size_t> index_of(Action a) const;

  double dot(std::size_t row, std::span<const double> w) const {
    double z = 0.0;
    for (auto k = row_start[row]; k < row_start[row + 1]; ++k) z += w[index[k]] * value[k];
    return z;
  }
  /// out[j] += scale * phi_row[j]
  void add_row(std::size_t row, double scale, std::span<double> out) const {
    for (auto k = row_start[row]; k < row_start[row + 1]; ++k) out[index[k]] += scale * value[k];
  }
  std::vector<double> dense_row(std::size_t row) const;

  friend bool operator==(const Decision&, const Decision&) = default;
};

/// Throws GameError on a terminal state.
Decision make_decision(const GameState& state);

}  // namespace scopal
