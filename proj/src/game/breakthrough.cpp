#include <cstdlib>

#include <fmt/format.h>

#include "scopal/games.hpp"

namespace scopal {

Breakthrough Breakthrough::initial(int width, int height) {
  Breakthrough b;
  b.width = static_cast<std::int8_t>(width);
  b.height = static_cast<std::int8_t>(height);
  for (int c = 0; c < width; ++c) {
    b.cells[b.cell(c, 0)] = piece_of(Player::P1);
    b.cells[b.cell(c, 1)] = piece_of(Player::P1);
    b.cells[b.cell(c, height - 2)] = piece_of(Player::P2);
    b.cells[b.cell(c, height - 1)] = piece_of(Player::P2);
  }
  return b;
}

Breakthrough::Move Breakthrough::decode(Action a) const {
  const int from = a.code / 3;
  const int dx = a.code % 3 - 1;
  const Player owner = cells[from] == piece_of(Player::P2) ? Player::P2 : Player::P1;
  Move m;
  m.from_col = from % width;
  m.from_row = from / width;
  m.to_col = m.from_col + dx;
  m.to_row = m.from_row + forward(owner);
  return m;
}

void Breakthrough::legal_actions(Player mover, std::vector<Action>& out) const {
  out.clear();
  if (outcome(mover)) return;
  const auto own = piece_of(mover);
  const auto theirs = piece_of(opponent(mover));
  const int dy = forward(mover);
  for (int from = 0; from < width * height; ++from) {
    if (cells[from] != own) continue;
    const int col = from % width;
    const int to_row = from / width + dy;
    if (to_row < 0 || to_row >= height) continue;
    for (int dx = -1; dx <= 1; ++dx) {
      const int to_col = col + dx;
      if (to_col < 0 || to_col >= width) continue;
      const auto target = at(to_col, to_row);
      // Straight moves need an empty square; diagonals may also capture.
      if (target == kEmpty || (dx != 0 && target == theirs)) out.push_back({from * 3 + dx + 1});
    }
  }
}

std::optional<std::string> Breakthrough::violation(Player mover, Action a) const {
  if (a.code < 0 || a.code >= width * height * 3)
    return fmt::format("move code {} is off the {}x{} board", a.code, width, height);
  const int from = a.code / 3;
  if (cells[from] != piece_of(mover))
    return fmt::format("source square of {} holds no piece of the mover", a.code);
  const auto m = decode(a);
  if (m.to_col < 0 || m.to_col >= width || m.to_row < 0 || m.to_row >= height)
    return fmt::format("{} leaves the board", notation(a));
  const auto target = at(m.to_col, m.to_row);
  if (target == piece_of(mover)) return fmt::format("{} lands on the mover's own piece", notation(a));
  if (m.to_col == m.from_col && target != kEmpty)
    return fmt::format("{} is a straight move onto an occupied square; only diagonal moves capture",
                       notation(a));
  if (outcome(mover)) return std::string("game is already decided");
  return std::nullopt;
}

void Breakthrough::apply(Player mover, Action a) {
  const auto m = decode(a);
  cells[cell(m.from_col, m.from_row)] = kEmpty;
  cells[cell(m.to_col, m.to_row)] = piece_of(mover);
}

int Breakthrough::piece_count(Player p) const {
  int n = 0;
  for (int i = 0; i < width * height; ++i) n += cells[i] == piece_of(p);
  return n;
}

std::optional<Outcome> Breakthrough::outcome(Player to_move) const {
  for (int c = 0; c < width; ++c) {
    if (at(c, goal_row(Player::P1)) == piece_of(Player::P1)) return Outcome::win_for(Player::P1);
    if (at(c, goal_row(Player::P2)) == piece_of(Player::P2)) return Outcome::win_for(Player::P2);
  }
  if (piece_count(Player::P1) == 0) return Outcome::win_for(Player::P2);
  if (piece_count(Player::P2) == 0) return Outcome::win_for(Player::P1);

  // A player left without a legal move loses.
  const auto own = piece_of(to_move);
  const auto theirs = piece_of(opponent(to_move));
  const int dy = forward(to_move);
  for (int from = 0; from < width * height; ++from) {
    if (cells[from] != own) continue;
    const int col = from % width;
    const int to_row = from / width + dy;
    if (to_row < 0 || to_row >= height) continue;
    for (int dx = -1; dx <= 1; ++dx) {
      const int to_col = col + dx;
      if (to_col < 0 || to_col >= width) continue;
      const auto target = at(to_col, to_row);
      if (target == kEmpty || (dx != 0 && target == theirs)) return std::nullopt;
    }
  }
  return Outcome::win_for(opponent(to_move));
}

std::string Breakthrough::notation(Action a) const {
  const auto m = decode(a);
  return fmt::format("{}{}{}{}", static_cast<char>('a' + m.from_col), m.from_row + 1,
                     static_cast<char>('a' + m.to_col), m.to_row + 1);
}

std::optional<Action> Breakthrough::parse(std::string_view text) const {
  if (text.size() != 4) return std::nullopt;
  const int fc = text[0] - 'a';
  const int fr = text[1] - '1';
  const int tc = text[2] - 'a';
  const int tr = text[3] - '1';
  if (fc < 0 || fc >= width || tc < 0 || tc >= width) return std::nullopt;
  if (fr < 0 || fr >= height || tr < 0 || tr >= height) return std::nullopt;
  if (std::abs(tc - fc) > 1 || std::abs(tr - fr) != 1) return std::nullopt;
  return Action{cell(fc, fr) * 3 + (tc - fc) + 1};
}

void Breakthrough::observe(Player, std::string& out) const {
  for (int r = height - 1; r >= 0; --r) {
    for (int c = 0; c < width; ++c) {
      const auto m = at(c, r);
      out.push_back(m == 1 ? 'w' : m == 2 ? 'b' : '.');
    }
    if (r > 0) out.push_back('/');
  }
}

}  // namespace scopal
