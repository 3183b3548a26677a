#pragma once

// Rule sets of the six benchmark games.
//
// Each struct holds only the game-specific part of a state; turn order, move
// counting and chance seeds are owned by GameState. Action codes ascend in the
// canonical order used for sampling and tie-breaking.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scopal/random.hpp"

namespace scopal {

enum class GameId : std::uint8_t {
  TicTacToe,
  ConnectFour,
  Breakthrough,
  KuhnPoker,
  LiarsDice,
  Nim,
};

enum class Player : std::uint8_t { P1 = 0, P2 = 1 };

constexpr Player opponent(Player p) { return p == Player::P1 ? Player::P2 : Player::P1; }
constexpr int seat_index(Player p) { return static_cast<int>(p); }

enum class Result : std::uint8_t { Win, Lose, Tie };

/// Per-player result at a terminal state.
struct Outcome {
  std::array<Result, 2> results{Result::Tie, Result::Tie};

  Result of(Player p) const { return results[seat_index(p)]; }

  static Outcome win_for(Player winner) {
    Outcome o;
    o.results[seat_index(winner)] = Result::Win;
    o.results[seat_index(opponent(winner))] = Result::Lose;
    return o;
  }
  static Outcome tie() { return {}; }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Game-specific move code; see each rule set for the encoding.
struct Action {
  std::int32_t code = 0;

  friend auto operator<=>(const Action&, const Action&) = default;
};

// Cells are 0 when empty, 1 for P1 and 2 for P2.
inline constexpr std::int8_t kEmpty = 0;
constexpr std::int8_t piece_of(Player p) { return static_cast<std::int8_t>(seat_index(p) + 1); }

/// 3x3 grid. Action code = (row - 1) * 3 + (column - 1); notation "C<col>R<row>".
struct TicTacToe {
  std::array<std::int8_t, 9> cells{};

  void legal_actions(Player mover, std::vector<Action>& out) const;
  std::optional<std::string> violation(Player mover, Action a) const;
  void apply(Player mover, Action a);
  std::optional<Outcome> outcome(Player to_move) const;
  std::string notation(Action a) const;
  std::optional<Action> parse(std::string_view text) const;
  void observe(Player viewer, std::string& out) const;

  /// Line owner (1 or 2), or 0 if no complete line.
  std::int8_t winner_mark() const;

  friend bool operator==(const TicTacToe&, const TicTacToe&) = default;
};

/// 7 columns x 6 rows, gravity drop. Action code = column index 0..6;
/// notation "C<col>". Cell index = column * 6 + row, row 0 at the bottom.
struct ConnectFour {
  static constexpr int kColumns = 7;
  static constexpr int kRows = 6;

  std::array<std::int8_t, kColumns * kRows> cells{};
  std::array<std::int8_t, kColumns> heights{};
  std::int8_t last_cell = -1;

  static constexpr int cell(int col, int row) { return col * kRows + row; }
  std::int8_t at(int col, int row) const { return cells[cell(col, row)]; }

  void legal_actions(Player mover, std::vector<Action>& out) const;
  std::optional<std::string> violation(Player mover, Action a) const;
  void apply(Player mover, Action a);
  std::optional<Outcome> outcome(Player to_move) const;
  std::string notation(Action a) const;
  std::optional<Action> parse(std::string_view text) const;
  void observe(Player viewer, std::string& out) const;

  /// Longest run through (col,row) for `mark` would be >= 4 if placed there.
  bool completes_four(int col, int row, std::int8_t mark) const;

  friend bool operator==(const ConnectFour&, const ConnectFour&) = default;
};

/// Pawn race on a width x height board (default 3 x 8). P1 ("w") starts on
/// the two bottom rows and moves up; P2 ("b") starts on the two top rows.
/// Action code = from_cell * 3 + (dx + 1), cell = row * width + col.
/// Notation "<from><to>" in algebraic form, e.g. "a2b3".
struct Breakthrough {
  static constexpr int kMaxCells = 64;

  std::int8_t width = 3;
  std::int8_t height = 8;
  std::array<std::int8_t, kMaxCells> cells{};

  static Breakthrough initial(int width, int height);

  int cell(int col, int row) const { return row * width + col; }
  std::int8_t at(int col, int row) const { return cells[cell(col, row)]; }
  static int forward(Player p) { return p == Player::P1 ? 1 : -1; }
  int goal_row(Player p) const { return p == Player::P1 ? height - 1 : 0; }

  struct Move {
    int from_col, from_row, to_col, to_row;
  };
  /// Direction comes from the owner of the piece on the source cell.
  Move decode(Action a) const;

  void legal_actions(Player mover, std::vector<Action>& out) const;
  std::optional<std::string> violation(Player mover, Action a) const;
  void apply(Player mover, Action a);
  std::optional<Outcome> outcome(Player to_move) const;
  std::string notation(Action a) const;
  std::optional<Action> parse(std::string_view text) const;
  void observe(Player viewer, std::string& out) const;

  int piece_count(Player p) const;

  friend bool operator==(const Breakthrough&, const Breakthrough&) = default;
};

/// Three-card poker. Cards 0=J, 1=Q, 2=K. Action 0 = Pass, 1 = Bet.
/// Betting tree: pp showdown(1), bp fold, bb showdown(2), pbp fold, pbb showdown(2).
struct KuhnPoker {
  static constexpr std::int32_t kPass = 0;
  static constexpr std::int32_t kBet = 1;

  std::array<std::int8_t, 2> cards{0, 1};
  std::array<std::int8_t, 3> history{};
  std::int8_t history_len = 0;

  static KuhnPoker deal(Rng& rng);

  void legal_actions(Player mover, std::vector<Action>& out) const;
  std::optional<std::string> violation(Player mover, Action a) const;
  void apply(Player mover, Action a);
  std::optional<Outcome> outcome(Player to_move) const;
  std::string notation(Action a) const;
  std::optional<Action> parse(std::string_view text) const;
  void observe(Player viewer, std::string& out) const;
  void resample_hidden(Player viewer, Rng& rng);

  /// Chips won by P1 at a terminal state (negative when P1 loses).
  int p1_payoff() const;
  /// Index of the betting history: 0 "", 1 "p", 2 "b", 3 "pb"; -1 otherwise.
  int history_index() const;

  friend bool operator==(const KuhnPoker&, const KuhnPoker&) = default;
};

/// One six-sided die per player. Bid code = (quantity - 1) * 6 + (face - 1)
/// for quantity 1..2, so a higher code is a higher bid; code 12 calls "liar".
/// No faces are wild.
struct LiarsDice {
  static constexpr int kFaces = 6;
  static constexpr int kDice = 2;
  static constexpr int kBids = kDice * kFaces;
  static constexpr std::int32_t kChallenge = kBids;

  std::array<std::int8_t, 2> dice{1, 1};
  std::array<std::int8_t, kBids + 1> history{};
  std::int8_t history_len = 0;

  static LiarsDice roll(Rng& rng);
  static int quantity(std::int32_t bid) { return bid / kFaces + 1; }
  static int face(std::int32_t bid) { return bid % kFaces + 1; }

  /// Last bid code, or -1 before the first bid.
  int last_bid() const;
  bool challenged() const {
    return history_len > 0 && history[history_len - 1] == kChallenge;
  }

  void legal_actions(Player mover, std::vector<Action>& out) const;
  std::optional<std::string> violation(Player mover, Action a) const;
  void apply(Player mover, Action a);
  std::optional<Outcome> outcome(Player to_move) const;
  std::string notation(Action a) const;
  std::optional<Action> parse(std::string_view text) const;
  void observe(Player viewer, std::string& out) const;
  void resample_hidden(Player viewer, Rng& rng);

  friend bool operator==(const LiarsDice&, const LiarsDice&) = default;
};

/// Misere Nim on piles (1, 3, 5, 7): whoever takes the last match loses.
/// Action code = pile * 8 + (take - 1); notation "<pile:P, take:T>" (1-based pile).
struct Nim {
  static constexpr std::array<std::int8_t, 4> kInitial{1, 3, 5, 7};

  std::array<std::int8_t, 4> piles = kInitial;

  static constexpr std::int32_t encode(int pile, int take) { return pile * 8 + (take - 1); }
  static int pile_of(Action a) { return a.code / 8; }
  static int take_of(Action a) { return a.code % 8 + 1; }

  void legal_actions(Player mover, std::vector<Action>& out) const;
  std::optional<std::string> violation(Player mover, Action a) const;
  void apply(Player mover, Action a);
  std::optional<Outcome> outcome(Player to_move) const;
  std::string notation(Action a) const;
  std::optional<Action> parse(std::string_view text) const;
  void observe(Player viewer, std::string& out) const;

  int total() const;
  int nim_sum() const;

  friend bool operator==(const Nim&, const Nim&) = default;
};

}  // namespace scopal
