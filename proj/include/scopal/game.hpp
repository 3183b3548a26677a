#pragma once

// Turn-based two-player game abstraction.
//
// A GameState is an immutable-by-convention value: every operation that moves
// the game forward returns a new state. Six games are supported; the rules of
// each one live in games.hpp. Hidden information (Kuhn cards, Liar's Dice
// dice) is only ever exposed to its owner through observation-based keys and
// features.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scopal/games.hpp"

namespace scopal {

class GameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::array<GameId, 6> kAllGames = {
    GameId::Breakthrough, GameId::ConnectFour, GameId::TicTacToe,
    GameId::KuhnPoker,    GameId::LiarsDice,   GameId::Nim};

std::string_view game_name(GameId game);
/// Accepts the names produced by game_name ("tictactoe", "connect_four", ...).
GameId parse_game(std::string_view name);

std::string_view player_name(Player p);
std::string_view result_name(Result r);

/// Board size and other rule variants. Defaults reproduce the evaluated setup.
struct GameOptions {
  int breakthrough_width = 3;
  int breakthrough_height = 8;

  friend bool operator==(const GameOptions&, const GameOptions&) = default;
};

/// Hard cap on plies; reaching it ends the game as a tie.
inline constexpr int kMovePlyLimit = 200;

/// Upper bound on the number of plies a game of this kind can last.
int max_game_length(GameId game, const GameOptions& options = {});

class GameState {
 public:
  using Board =
      std::variant<TicTacToe, ConnectFour, Breakthrough, KuhnPoker, LiarsDice, Nim>;

  /// Arbitrary positions are allowed for tests and solvers; new_game builds
  /// the initial one.
  explicit GameState(Board board, std::uint64_t chance_seed = 0,
                     Player to_move = Player::P1, int move_count = 0);

  GameId game() const;
  Player to_move() const { return to_move_; }
  int move_count() const { return move_count_; }
  std::uint64_t chance_seed() const { return chance_seed_; }
  const Board& board() const { return board_; }

  template <typename G>
  const G& as() const {
    return std::get<G>(board_);
  }

  friend bool operator==(const GameState&, const GameState&) = default;

 private:
  friend GameState apply_action(const GameState& state, Action action);
  friend GameState determinize(const GameState& state, Player viewer, Rng& rng);

  Board board_;
  Player to_move_ = Player::P1;
  int move_count_ = 0;
  std::uint64_t chance_seed_ = 0;
};

GameState new_game(GameId game, std::uint64_t chance_seed,
                   const GameOptions& options = {});

/// Canonical order per game (ascending action code). Empty iff terminal.
std::vector<Action> legal_actions(const GameState& state);
/// Buffer-reusing variant for hot loops.
void legal_actions(const GameState& state, std::vector<Action>& out);

bool is_legal(const GameState& state, Action action);

/// Throws GameError naming the violated rule when the action is illegal.
GameState apply_action(const GameState& state, Action action);

std::optional<Outcome> terminal_outcome(const GameState& state);
inline bool is_terminal(const GameState& state) {
  return terminal_outcome(state).has_value();
}

/// Textual move notation ("C1R2", "C4", "a2b3", "<Bet>", "<2 dices, 5 value>",
/// "<pile:4, take:7>").
std::string action_to_string(const GameState& state, Action action);
/// Inverse of action_to_string. Throws GameError on malformed text.
Action action_from_string(const GameState& state, std::string_view text);

/// What `viewer` can see of the state. Opponent private cards/dice are
/// masked, so two states differing only in hidden information give the same
/// string for the player who cannot see it.
std::string observation(const GameState& state, Player viewer);

/// Counting identity of a decision point: the mover's observation.
std::string state_key(const GameState& state);
/// Counting identity of a (state, action) pair.
std::string canonical_key(const GameState& state, Action action);

/// Resamples the information hidden from `viewer` uniformly among the
/// assignments consistent with the viewer's observation. Identity for
/// perfect-information games.
GameState determinize(const GameState& state, Player viewer, Rng& rng);

bool has_hidden_information(GameId game);

/// Plays `actions` from the chance-seeded initial state.
GameState replay(GameId game, std::uint64_t chance_seed, std::span<const Action> actions,
                 const GameOptions& options = {});

}  // namespace scopal
