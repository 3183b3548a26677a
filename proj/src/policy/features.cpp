#include "scopal/features.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

#include <fmt/format.h>

namespace scopal {

namespace {

// ---------------------------------------------------------------- Tic-Tac-Toe

constexpr int kTttDim = 32;

constexpr std::array<std::array<int, 3>, 8> kTttLines = {{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6}, {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6},
}};

void tictactoe_features(const GameState& state, Action action, std::span<double> out) {
  const auto& before = state.as<TicTacToe>();
  const auto own = piece_of(state.to_move());
  const auto theirs = piece_of(opponent(state.to_move()));
  auto after = before;
  after.cells[action.code] = own;

  out[action.code] = 1.0;
  for (int i = 0; i < 9; ++i) {
    out[9 + i] = after.cells[i] == own;
    out[18 + i] = after.cells[i] == theirs;
  }
  int own_twos = 0, their_twos = 0, blocks = 0;
  bool win = false;
  for (const auto& line : kTttLines) {
    int mine = 0, other = 0, other_before = 0;
    bool through = false;
    for (int c : line) {
      mine += after.cells[c] == own;
      other += after.cells[c] == theirs;
      through |= c == action.code;
      other_before += before.cells[c] == theirs;
    }
    win |= mine == 3;
    own_twos += mine == 2 && other == 0;
    their_twos += other == 2 && mine == 0;
    blocks += through && other_before == 2;
  }
  out[27] = win;
  out[28] = own_twos;
  out[29] = their_twos;
  out[30] = blocks;
  out[31] = own_twos >= 2;
}

// --------------------------------------------------------------- Connect Four

constexpr int kC4Cells = ConnectFour::kColumns * ConnectFour::kRows;
constexpr int kC4Dim = 7 + 6 + 2 * kC4Cells + 8;

struct WindowCounts {
  int own3 = 0, their3 = 0, own2 = 0, their2 = 0;
};

WindowCounts count_windows(const ConnectFour& b, std::int8_t own, std::int8_t theirs) {
  static constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  WindowCounts w;
  for (int c = 0; c < ConnectFour::kColumns; ++c) {
    for (int r = 0; r < ConnectFour::kRows; ++r) {
      for (const auto& d : kDirs) {
        const int ec = c + 3 * d[0];
        const int er = r + 3 * d[1];
        if (ec < 0 || ec >= ConnectFour::kColumns || er < 0 || er >= ConnectFour::kRows) continue;
        int mine = 0, other = 0;
        for (int k = 0; k < 4; ++k) {
          const auto m = b.at(c + k * d[0], r + k * d[1]);
          mine += m == own;
          other += m == theirs;
        }
        if (other == 0) {
          w.own3 += mine == 3;
          w.own2 += mine == 2;
        }
        if (mine == 0) {
          w.their3 += other == 3;
          w.their2 += other == 2;
        }
      }
    }
  }
  return w;
}

void connect_four_features(const GameState& state, Action action, std::span<double> out) {
  const auto& before = state.as<ConnectFour>();
  const auto own = piece_of(state.to_move());
  const auto theirs = piece_of(opponent(state.to_move()));
  const int col = action.code;
  const int row = before.heights[col];
  auto after = before;
  after.apply(state.to_move(), action);

  out[col] = 1.0;
  out[7 + row] = 1.0;
  for (int i = 0; i < kC4Cells; ++i) {
    out[13 + i] = after.cells[i] == own;
    out[13 + kC4Cells + i] = after.cells[i] == theirs;
  }
  const int base = 13 + 2 * kC4Cells;
  const auto w = count_windows(after, own, theirs);
  const bool win = after.completes_four(col, row, own);
  bool gives_win = false;
  if (!win) {
    for (int c = 0; c < ConnectFour::kColumns && !gives_win; ++c) {
      const int r = after.heights[c];
      if (r < ConnectFour::kRows && after.completes_four(c, r, theirs)) gives_win = true;
    }
  }
  out[base + 0] = win;
  out[base + 1] = w.own3 / 4.0;
  out[base + 2] = w.their3 / 4.0;
  out[base + 3] = before.completes_four(col, row, theirs);
  out[base + 4] = gives_win;
  out[base + 5] = w.own2 / 8.0;
  out[base + 6] = w.their2 / 8.0;
  out[base + 7] = std::abs(col - 3) / 3.0;
}

// --------------------------------------------------------------- Breakthrough

constexpr int kBtExtras = 8;

int breakthrough_dim(int width, int height) { return 2 * width * height + kBtExtras; }

void breakthrough_features(const GameState& state, Action action, std::span<double> out) {
  const auto& before = state.as<Breakthrough>();
  const Player me = state.to_move();
  const Player them = opponent(me);
  const int w = before.width;
  const int h = before.height;
  const int cells = w * h;
  const auto move = before.decode(action);
  auto after = before;
  after.apply(me, action);

  // Planes are oriented so that the mover always advances "up".
  for (int r = 0; r < h; ++r) {
    const int rr = me == Player::P1 ? r : h - 1 - r;
    for (int c = 0; c < w; ++c) {
      const auto m = after.at(c, r);
      out[rr * w + c] = m == piece_of(me);
      out[cells + rr * w + c] = m == piece_of(them);
    }
  }
  const int base = 2 * cells;
  const int dx = move.to_col - move.from_col;
  out[base + dx + 1] = 1.0;
  out[base + 3] = before.at(move.to_col, move.to_row) == piece_of(them);
  const auto result = after.outcome(them);
  out[base + 4] = result && result->of(me) == Result::Win;
  const int progress = me == Player::P1 ? move.to_row : h - 1 - move.to_row;
  out[base + 5] = static_cast<double>(progress) / (h - 1);

  // Can the moved piece be captured right away?
  const int attacker_row = move.to_row + Breakthrough::forward(me);
  bool attacked = false;
  if (attacker_row >= 0 && attacker_row < h) {
    for (int ddx : {-1, 1}) {
      const int ac = move.to_col + ddx;
      if (ac >= 0 && ac < w && after.at(ac, attacker_row) == piece_of(them)) attacked = true;
    }
  }
  out[base + 6] = attacked;

  // Does the reply have an immediately winning move?
  bool reply_wins = false;
  if (!result) {
    std::vector<Action> replies;
    after.legal_actions(them, replies);
    for (auto r : replies) {
      auto next = after;
      next.apply(them, r);
      const auto o = next.outcome(me);
      if (o && o->of(them) == Result::Win) {
        reply_wins = true;
        break;
      }
    }
  }
  out[base + 7] = reply_wins;
}

// ------------------------------------------------------------------------ Nim

constexpr std::array<int, 4> kNimSizeOffsets = {0, 2, 6, 12};
constexpr std::array<int, 4> kNimActionOffsets = {20, 21, 24, 29};
constexpr int kNimDim = 42;

void nim_features(const GameState& state, Action action, std::span<double> out) {
  auto after = state.as<Nim>();
  after.apply(state.to_move(), action);
  int nonempty = 0;
  bool all_small = true;
  for (int p = 0; p < 4; ++p) {
    const int size = std::min<int>(after.piles[p], Nim::kInitial[p]);
    out[kNimSizeOffsets[p] + size] = 1.0;
    nonempty += after.piles[p] > 0;
    all_small &= after.piles[p] <= 1;
  }
  const int pile = Nim::pile_of(action);
  const int take = std::min<int>(Nim::take_of(action), Nim::kInitial[pile]);
  out[kNimActionOffsets[pile] + take - 1] = 1.0;

  const bool zero_sum = after.nim_sum() == 0;
  const bool odd = nonempty % 2 == 1;
  out[36] = zero_sum;
  out[37] = all_small;
  out[38] = odd;
  out[39] = zero_sum && !all_small;
  out[40] = all_small && odd;
  out[41] = after.total() == 0;
}

// ----------------------------------------------------------------- Kuhn Poker

constexpr int kKuhnDim = 3 * 4 * 2;

void kuhn_features(const GameState& state, Action action, std::span<double> out) {
  const auto& k = state.as<KuhnPoker>();
  const int card = k.cards[seat_index(state.to_move())];
  const int hist = k.history_index();
  out[(card * 4 + hist) * 2 + action.code] = 1.0;
}

// ----------------------------------------------------------------- Liar's Dice

constexpr int kLiarsActions = LiarsDice::kBids + 1;
constexpr int kLiarsDim = LiarsDice::kFaces * kLiarsActions * kLiarsActions;

void liars_features(const GameState& state, Action action, std::span<double> out) {
  const auto& d = state.as<LiarsDice>();
  const int die = d.dice[seat_index(state.to_move())] - 1;
  const int last = d.last_bid() + 1;
  out[(die * kLiarsActions + last) * kLiarsActions + action.code] = 1.0;
}

}  // namespace

int feature_dimension(GameId game, const GameOptions& options) {
  switch (game) {
    case GameId::TicTacToe: return kTttDim;
    case GameId::ConnectFour: return kC4Dim;
    case GameId::Breakthrough:
      return breakthrough_dim(options.breakthrough_width, options.breakthrough_height);
    case GameId::KuhnPoker: return kKuhnDim;
    case GameId::LiarsDice: return kLiarsDim;
    case GameId::Nim: return kNimDim;
  }
  return 0;
}

namespace {

int state_dimension(const GameState& state) {
  if (state.game() == GameId::Breakthrough) {
    const auto& b = state.as<Breakthrough>();
    return breakthrough_dim(b.width, b.height);
  }
  return feature_dimension(state.game());
}

}  // namespace

void encode_features(const GameState& state, Action action, std::span<double> out) {
  const int dim = state_dimension(state);
  if (static_cast<int>(out.size()) != dim)
    throw GameError(fmt::format("feature buffer has {} entries, {} needs {}", out.size(),
                                game_name(state.game()), dim));
  std::fill(out.begin(), out.end(), 0.0);
  switch (state.game()) {
    case GameId::TicTacToe: tictactoe_features(state, action, out); break;
    case GameId::ConnectFour: connect_four_features(state, action, out); break;
    case GameId::Breakthrough: breakthrough_features(state, action, out); break;
    case GameId::KuhnPoker: kuhn_features(state, action, out); break;
    case GameId::LiarsDice: liars_features(state, action, out); break;
    case GameId::Nim: nim_features(state, action, out); break;
  }
}

std::optional<std::size_t> Decision::index_of(Action a) const {
  const auto it = std::lower_bound(actions.begin(), actions.end(), a);
  if (it == actions.end() || *it != a) return std::nullopt;
  return static_cast<std::size_t>(it - actions.begin());
}

Decision make_decision(const GameState& state) {
  Decision d;
  d.game = state.game();
  d.dim = state_dimension(state);
  d.actions = legal_actions(state);
  if (d.actions.empty())
    throw GameError(fmt::format("no decision to make in a terminal {} state", game_name(state.game())));
  std::vector<double> dense(static_cast<std::size_t>(d.dim));
  d.row_start.reserve(d.actions.size() + 1);
  d.row_start.push_back(0);
  for (auto a : d.actions) {
    encode_features(state, a, dense);
    for (int k = 0; k < d.dim; ++k) {
      if (dense[k] == 0.0) continue;
      d.index.push_back(k);
      d.value.push_back(dense[k]);
    }
    d.row_start.push_back(static_cast<std::uint32_t>(d.index.size()));
  }
  return d;
}

std::vector<double> Decision::dense_row(std::size_t row) const {
  std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
  add_row(row, 1.0, out);
  return out;
}

}  // namespace scopal
