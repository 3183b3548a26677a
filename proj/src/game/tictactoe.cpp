#include <array>

#include <fmt/format.h>

#include "scopal/games.hpp"

namespace scopal {

namespace {

constexpr std::array<std::array<int, 3>, 8> kLines = {{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8},  // rows
    {0, 3, 6}, {1, 4, 7}, {2, 5, 8},  // columns
    {0, 4, 8}, {2, 4, 6},             // diagonals
}};

}  // namespace

void TicTacToe::legal_actions(Player, std::vector<Action>& out) const {
  out.clear();
  if (winner_mark() != 0) return;
  for (int i = 0; i < 9; ++i)
    if (cells[i] == kEmpty) out.push_back({i});
}

std::optional<std::string> TicTacToe::violation(Player, Action a) const {
  if (a.code < 0 || a.code >= 9) return fmt::format("cell code {} is off the 3x3 grid", a.code);
  if (cells[a.code] != kEmpty) return fmt::format("cell {} is already marked", notation(a));
  if (winner_mark() != 0) return std::string("game is already decided");
  return std::nullopt;
}

void TicTacToe::apply(Player mover, Action a) { cells[a.code] = piece_of(mover); }

std::int8_t TicTacToe::winner_mark() const {
  for (const auto& line : kLines) {
    const auto m = cells[line[0]];
    if (m != kEmpty && m == cells[line[1]] && m == cells[line[2]]) return m;
  }
  return 0;
}

std::optional<Outcome> TicTacToe::outcome(Player) const {
  if (auto w = winner_mark(); w != 0) return Outcome::win_for(w == 1 ? Player::P1 : Player::P2);
  for (auto c : cells)
    if (c == kEmpty) return std::nullopt;
  return Outcome::tie();
}

std::string TicTacToe::notation(Action a) const {
  return fmt::format("C{}R{}", a.code % 3 + 1, a.code / 3 + 1);
}

std::optional<Action> TicTacToe::parse(std::string_view text) const {
  if (text.size() != 4 || text[0] != 'C' || text[2] != 'R') return std::nullopt;
  const int col = text[1] - '0';
  const int row = text[3] - '0';
  if (col < 1 || col > 3 || row < 1 || row > 3) return std::nullopt;
  return Action{(row - 1) * 3 + (col - 1)};
}

void TicTacToe::observe(Player, std::string& out) const {
  for (auto c : cells) out.push_back(c == 1 ? 'X' : c == 2 ? 'O' : '.');
}

}  // namespace scopal
