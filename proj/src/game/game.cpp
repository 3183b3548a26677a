#include "scopal/game.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace scopal {

namespace {

constexpr std::string_view kGameNames[] = {"tictactoe", "connect_four", "breakthrough",
                                           "kuhn_poker", "liars_dice",  "nim"};

template <typename G>
constexpr bool kHasHidden = requires(G g, Player p, Rng& r) { g.resample_hidden(p, r); };

}  // namespace

std::string_view game_name(GameId game) { return kGameNames[static_cast<int>(game)]; }

GameId parse_game(std::string_view name) {
  for (auto g : kAllGames)
    if (game_name(g) == name) return g;
  throw GameError(fmt::format("unknown game '{}'", name));
}

std::string_view player_name(Player p) { return p == Player::P1 ? "P1" : "P2"; }

std::string_view result_name(Result r) {
  switch (r) {
    case Result::Win: return "win";
    case Result::Lose: return "lose";
    case Result::Tie: return "tie";
  }
  return "?";
}

int max_game_length(GameId game, const GameOptions& options) {
  switch (game) {
    case GameId::TicTacToe: return 9;
    case GameId::ConnectFour: return ConnectFour::kColumns * ConnectFour::kRows;
    // Every move advances one of the 4 * width pieces by one row.
    case GameId::Breakthrough:
      return 4 * options.breakthrough_width * (options.breakthrough_height - 1);
    case GameId::KuhnPoker: return 3;
    case GameId::LiarsDice: return LiarsDice::kBids + 1;
    case GameId::Nim: return 16;
  }
  return kMovePlyLimit;
}

GameState::GameState(Board board, std::uint64_t chance_seed, Player to_move, int move_count)
    : board_(std::move(board)), to_move_(to_move), move_count_(move_count), chance_seed_(chance_seed) {}

GameId GameState::game() const { return static_cast<GameId>(board_.index()); }

GameState new_game(GameId game, std::uint64_t chance_seed, const GameOptions& options) {
  Rng rng(chance_seed);
  switch (game) {
    case GameId::TicTacToe: return GameState(TicTacToe{}, chance_seed);
    case GameId::ConnectFour: return GameState(ConnectFour{}, chance_seed);
    case GameId::Breakthrough: {
      const int w = options.breakthrough_width;
      const int h = options.breakthrough_height;
      if (w < 2 || h < 4 || w > 8 || h > 8 || w * h > Breakthrough::kMaxCells)
        throw GameError(fmt::format("unsupported breakthrough board {}x{}", w, h));
      return GameState(Breakthrough::initial(w, h), chance_seed);
    }
    case GameId::KuhnPoker: return GameState(KuhnPoker::deal(rng), chance_seed);
    case GameId::LiarsDice: return GameState(LiarsDice::roll(rng), chance_seed);
    case GameId::Nim: return GameState(Nim{}, chance_seed);
  }
  throw GameError(fmt::format("unknown game id {}", static_cast<int>(game)));
}

std::optional<Outcome> terminal_outcome(const GameState& state) {
  auto o = std::visit([&](const auto& b) { return b.outcome(state.to_move()); }, state.board());
  if (o) return o;
  if (state.move_count() >= kMovePlyLimit) return Outcome::tie();
  return std::nullopt;
}

void legal_actions(const GameState& state, std::vector<Action>& out) {
  if (state.move_count() >= kMovePlyLimit) {
    out.clear();
    return;
  }
  std::visit([&](const auto& b) { b.legal_actions(state.to_move(), out); }, state.board());
}

std::vector<Action> legal_actions(const GameState& state) {
  std::vector<Action> out;
  legal_actions(state, out);
  return out;
}

bool is_legal(const GameState& state, Action action) {
  if (state.move_count() >= kMovePlyLimit) return false;
  return !std::visit([&](const auto& b) { return b.violation(state.to_move(), action); },
                     state.board())
              .has_value();
}

GameState apply_action(const GameState& state, Action action) {
  if (state.move_count() >= kMovePlyLimit)
    throw GameError(fmt::format("{}: move limit of {} plies reached", game_name(state.game()),
                                kMovePlyLimit));
  if (auto why = std::visit([&](const auto& b) { return b.violation(state.to_move(), action); },
                            state.board()))
    throw GameError(fmt::format("illegal {} move by {}: {}", game_name(state.game()),
                                player_name(state.to_move()), *why));
  GameState next = state;
  std::visit([&](auto& b) { b.apply(state.to_move(), action); }, next.board_);
  next.to_move_ = opponent(state.to_move());
  ++next.move_count_;
  return next;
}

std::string action_to_string(const GameState& state, Action action) {
  return std::visit([&](const auto& b) { return b.notation(action); }, state.board());
}

Action action_from_string(const GameState& state, std::string_view text) {
  auto a = std::visit([&](const auto& b) { return b.parse(text); }, state.board());
  if (!a) throw GameError(fmt::format("cannot parse '{}' as a {} move", text, game_name(state.game())));
  return *a;
}

std::string observation(const GameState& state, Player viewer) {
  std::string out;
  std::visit([&](const auto& b) { b.observe(viewer, out); }, state.board());
  return out;
}

std::string state_key(const GameState& state) {
  std::string key;
  key.reserve(64);
  key += game_name(state.game());
  key.push_back('|');
  key += player_name(state.to_move());
  key.push_back('|');
  std::visit([&](const auto& b) { b.observe(state.to_move(), key); }, state.board());
  return key;
}

std::string canonical_key(const GameState& state, Action action) {
  std::string key = state_key(state);
  key.push_back('|');
  key += action_to_string(state, action);
  return key;
}

bool has_hidden_information(GameId game) {
  return game == GameId::KuhnPoker || game == GameId::LiarsDice;
}

GameState determinize(const GameState& state, Player viewer, Rng& rng) {
  GameState out = state;
  std::visit(
      [&](auto& b) {
        if constexpr (kHasHidden<std::decay_t<decltype(b)>>) b.resample_hidden(viewer, rng);
      },
      out.board_);
  return out;
}

GameState replay(GameId game, std::uint64_t chance_seed, std::span<const Action> actions,
                 const GameOptions& options) {
  GameState s = new_game(game, chance_seed, options);
  for (auto a : actions) s = apply_action(s, a);
  return s;
}

}  // namespace scopal
