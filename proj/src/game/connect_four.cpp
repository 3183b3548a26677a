#include <fmt/format.h>

#include "scopal/games.hpp"

namespace scopal {

void ConnectFour::legal_actions(Player, std::vector<Action>& out) const {
  out.clear();
  if (outcome(Player::P1)) return;
  for (int c = 0; c < kColumns; ++c)
    if (heights[c] < kRows) out.push_back({c});
}

std::optional<std::string> ConnectFour::violation(Player, Action a) const {
  if (a.code < 0 || a.code >= kColumns) return fmt::format("column code {} does not exist", a.code);
  if (heights[a.code] >= kRows) return fmt::format("column {} is full", notation(a));
  if (outcome(Player::P1)) return std::string("game is already decided");
  return std::nullopt;
}

void ConnectFour::apply(Player mover, Action a) {
  const int row = heights[a.code]++;
  last_cell = static_cast<std::int8_t>(cell(a.code, row));
  cells[last_cell] = piece_of(mover);
}

bool ConnectFour::completes_four(int col, int row, std::int8_t mark) const {
  static constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (const auto& d : kDirs) {
    int run = 1;
    for (int sign : {1, -1}) {
      int c = col + sign * d[0];
      int r = row + sign * d[1];
      while (c >= 0 && c < kColumns && r >= 0 && r < kRows && at(c, r) == mark) {
        ++run;
        c += sign * d[0];
        r += sign * d[1];
      }
    }
    if (run >= 4) return true;
  }
  return false;
}

std::optional<Outcome> ConnectFour::outcome(Player) const {
  if (last_cell >= 0) {
    const int col = last_cell / kRows;
    const int row = last_cell % kRows;
    const auto mark = cells[last_cell];
    if (completes_four(col, row, mark)) return Outcome::win_for(mark == 1 ? Player::P1 : Player::P2);
  }
  for (auto h : heights)
    if (h < kRows) return std::nullopt;
  return Outcome::tie();
}

std::string ConnectFour::notation(Action a) const { return fmt::format("C{}", a.code + 1); }

std::optional<Action> ConnectFour::parse(std::string_view text) const {
  if (text.size() != 2 || text[0] != 'C') return std::nullopt;
  const int col = text[1] - '0';
  if (col < 1 || col > kColumns) return std::nullopt;
  return Action{col - 1};
}

void ConnectFour::observe(Player, std::string& out) const {
  for (int r = kRows - 1; r >= 0; --r) {
    for (int c = 0; c < kColumns; ++c) {
      const auto m = at(c, r);
      out.push_back(m == 1 ? 'X' : m == 2 ? 'O' : '.');
    }
    if (r > 0) out.push_back('/');
  }
}

}  // namespace scopal
