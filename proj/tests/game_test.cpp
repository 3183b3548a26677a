#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "scopal/game.hpp"
#include "scopal/solver.hpp"

namespace scopal {
namespace {

GameState play(GameState s, std::initializer_list<const char*> moves) {
  for (auto m : moves) s = apply_action(s, action_from_string(s, m));
  return s;
}

TEST(GameCore, TicTacToeInitialState) {
  const auto s = new_game(GameId::TicTacToe, 42);
  EXPECT_EQ(s.to_move(), Player::P1);
  EXPECT_EQ(s.move_count(), 0);
  EXPECT_EQ(observation(s, Player::P1), ".........");
  EXPECT_EQ(legal_actions(s).size(), 9u);
}

TEST(GameCore, NimInitialPiles) {
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const auto s = new_game(GameId::Nim, seed);
    EXPECT_EQ(s.as<Nim>().piles, (std::array<std::int8_t, 4>{1, 3, 5, 7}));
    EXPECT_EQ(s.to_move(), Player::P1);
  }
}

TEST(GameCore, KuhnDealsDistinctCardsDeterministically) {
  std::set<std::pair<int, int>> deals;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto& k = new_game(GameId::KuhnPoker, seed).as<KuhnPoker>();
    EXPECT_NE(k.cards[0], k.cards[1]);
    EXPECT_GE(k.cards[0], 0);
    EXPECT_LE(k.cards[0], 2);
    deals.insert({k.cards[0], k.cards[1]});
    EXPECT_EQ(new_game(GameId::KuhnPoker, seed), new_game(GameId::KuhnPoker, seed));
  }
  EXPECT_EQ(deals.size(), 6u);
}

TEST(GameCore, UnknownGameNameIsRejected) {
  EXPECT_THROW(parse_game("chess"), GameError);
  EXPECT_EQ(parse_game("liars_dice"), GameId::LiarsDice);
}

TEST(GameCore, NimSinglePileSingleMatch) {
  const GameState s(Nim{{1, 0, 0, 0}});
  const auto actions = legal_actions(s);
  ASSERT_EQ(actions.size(), 1u);
  EXPECT_EQ(action_to_string(s, actions[0]), "<pile:1, take:1>");
}

TEST(GameCore, ConnectFourFullColumnIsAbsent) {
  // Alternate in column 3 until it is full; nobody gets four in a column.
  auto s = new_game(GameId::ConnectFour, 0);
  s = play(s, {"C3", "C3", "C3", "C3", "C3", "C3"});
  ASSERT_FALSE(terminal_outcome(s));
  const auto actions = legal_actions(s);
  EXPECT_EQ(actions.size(), 6u);
  for (auto a : actions) EXPECT_NE(action_to_string(s, a), "C3");
  EXPECT_THROW(apply_action(s, action_from_string(s, "C3")), GameError);
}

TEST(GameCore, TicTacToeApplyMarksCellAndFlipsTurn) {
  const auto s0 = new_game(GameId::TicTacToe, 0);
  const auto s1 = apply_action(s0, action_from_string(s0, "C1R2"));
  EXPECT_EQ(s1.as<TicTacToe>().cells[3], 1);
  EXPECT_EQ(s1.to_move(), Player::P2);
  EXPECT_EQ(s1.move_count(), 1);
  // Value semantics: the source is untouched.
  EXPECT_EQ(observation(s0, Player::P1), ".........");
}

TEST(GameCore, NimTakeAllFromLastPile) {
  const auto s = play(new_game(GameId::Nim, 0), {"<pile:4, take:7>"});
  EXPECT_EQ(s.as<Nim>().piles, (std::array<std::int8_t, 4>{1, 3, 5, 0}));
}

TEST(GameCore, KuhnPassPassIsShowdown) {
  auto s = new_game(GameId::KuhnPoker, 3);
  s = play(s, {"<Pass>", "<Pass>"});
  const auto o = terminal_outcome(s);
  ASSERT_TRUE(o);
  const auto& k = s.as<KuhnPoker>();
  const Player high = k.cards[0] > k.cards[1] ? Player::P1 : Player::P2;
  EXPECT_EQ(o->of(high), Result::Win);
  EXPECT_EQ(o->of(opponent(high)), Result::Lose);
  EXPECT_TRUE(legal_actions(s).empty());
}

TEST(GameCore, KuhnBettingTree) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto s0 = new_game(GameId::KuhnPoker, seed);
    const auto& k = s0.as<KuhnPoker>();
    const Player high = k.cards[0] > k.cards[1] ? Player::P1 : Player::P2;
    EXPECT_EQ(terminal_outcome(play(s0, {"<Bet>", "<Pass>"}))->of(Player::P1), Result::Win);
    EXPECT_EQ(terminal_outcome(play(s0, {"<Bet>", "<Bet>"}))->of(high), Result::Win);
    EXPECT_FALSE(terminal_outcome(play(s0, {"<Pass>", "<Bet>"})));
    EXPECT_EQ(terminal_outcome(play(s0, {"<Pass>", "<Bet>", "<Pass>"}))->of(Player::P2), Result::Win);
    EXPECT_EQ(terminal_outcome(play(s0, {"<Pass>", "<Bet>", "<Bet>"}))->of(high), Result::Win);
    EXPECT_EQ(play(s0, {"<Bet>", "<Bet>"}).as<KuhnPoker>().p1_payoff(), high == Player::P1 ? 2 : -2);
  }
}

TEST(GameCore, TicTacToeLineWins) {
  const auto s = play(new_game(GameId::TicTacToe, 0), {"C1R1", "C1R2", "C2R1", "C2R2", "C3R1"});
  const auto o = terminal_outcome(s);
  ASSERT_TRUE(o);
  EXPECT_EQ(o->of(Player::P1), Result::Win);
  EXPECT_EQ(o->of(Player::P2), Result::Lose);
}

TEST(GameCore, TicTacToeFullBoardTie) {
  // X O X / X O O / O X X
  const auto s = play(new_game(GameId::TicTacToe, 0),
                      {"C1R1", "C2R1", "C3R1", "C2R2", "C1R2", "C3R2", "C2R3", "C1R3", "C3R3"});
  const auto o = terminal_outcome(s);
  ASSERT_TRUE(o);
  EXPECT_EQ(*o, Outcome::tie());
}

TEST(GameCore, NimTakingLastMatchLoses) {
  const GameState s(Nim{{0, 0, 1, 0}}, 0, Player::P1, 15);
  const auto end = apply_action(s, legal_actions(s).front());
  const auto o = terminal_outcome(end);
  ASSERT_TRUE(o);
  EXPECT_EQ(o->of(Player::P1), Result::Lose);
  EXPECT_EQ(o->of(Player::P2), Result::Win);
}

TEST(GameCore, LiarsDiceBidOrderAndChallenge) {
  LiarsDice d;
  d.dice = {3, 3};
  const GameState s0(d, 0);
  // Challenge is illegal as the opening move.
  EXPECT_FALSE(is_legal(s0, Action{LiarsDice::kChallenge}));
  EXPECT_EQ(legal_actions(s0).size(), 12u);

  auto s1 = play(s0, {"<1 dices, 5 value>"});
  EXPECT_FALSE(is_legal(s1, action_from_string(s1, "<1 dices, 4 value>")));
  EXPECT_TRUE(is_legal(s1, action_from_string(s1, "<1 dices, 6 value>")));
  EXPECT_TRUE(is_legal(s1, action_from_string(s1, "<2 dices, 1 value>")));
  EXPECT_TRUE(is_legal(s1, action_from_string(s1, "<Liar>")));

  // Exact bid: two threes exist; challenger (P1) loses.
  auto exact = play(s0, {"<2 dices, 3 value>", "<Liar>"});
  EXPECT_EQ(terminal_outcome(exact)->of(Player::P1), Result::Win);  // P1 bid
  // Overstated bid: no fives; bidder (P1) loses.
  auto over = play(s0, {"<1 dices, 5 value>", "<Liar>"});
  EXPECT_EQ(terminal_outcome(over)->of(Player::P1), Result::Lose);
  // Understated bid defeats the challenger.
  auto under = play(s0, {"<1 dices, 2 value>", "<1 dices, 3 value>", "<Liar>"});
  EXPECT_EQ(terminal_outcome(under)->of(Player::P2), Result::Win);
}

TEST(GameCore, BreakthroughDefaultBoard) {
  const auto s = new_game(GameId::Breakthrough, 0);
  const auto& b = s.as<Breakthrough>();
  EXPECT_EQ(b.width, 3);
  EXPECT_EQ(b.height, 8);
  EXPECT_EQ(b.piece_count(Player::P1), 6);
  EXPECT_EQ(b.piece_count(Player::P2), 6);
  EXPECT_EQ(observation(s, Player::P1), "bbb/bbb/.../.../.../.../www/www");
  // Front-row pieces: a2 has 2 moves, b2 3, c2 2.
  EXPECT_EQ(legal_actions(s).size(), 7u);
  const auto s1 = play(s, {"b2b3"});
  EXPECT_EQ(s1.as<Breakthrough>().at(1, 2), 1);
}

TEST(GameCore, BreakthroughStraightCaptureRejected) {
  Breakthrough b = Breakthrough::initial(3, 8);
  b.cells.fill(kEmpty);
  b.cells[b.cell(0, 3)] = 1;
  b.cells[b.cell(0, 4)] = 2;
  b.cells[b.cell(1, 4)] = 2;
  const GameState s(b);
  EXPECT_THROW(apply_action(s, action_from_string(s, "a4a5")), GameError);
  const auto captured = apply_action(s, action_from_string(s, "a4b5"));
  EXPECT_EQ(captured.as<Breakthrough>().piece_count(Player::P2), 1);
}

TEST(GameCore, BreakthroughReachingHomeRowWins) {
  Breakthrough b = Breakthrough::initial(3, 8);
  b.cells.fill(kEmpty);
  b.cells[b.cell(2, 6)] = 1;
  b.cells[b.cell(0, 5)] = 2;
  b.cells[b.cell(0, 7)] = 2;
  ASSERT_FALSE(terminal_outcome(GameState(b)));
  const GameState s(b);
  const auto end = apply_action(s, action_from_string(s, "c7c8"));
  EXPECT_EQ(terminal_outcome(end)->of(Player::P1), Result::Win);
}

TEST(GameCore, BreakthroughConfigurableBoard) {
  GameOptions opt;
  opt.breakthrough_width = 6;
  opt.breakthrough_height = 6;
  const auto s = new_game(GameId::Breakthrough, 0, opt);
  EXPECT_EQ(s.as<Breakthrough>().piece_count(Player::P2), 12);
  opt.breakthrough_width = 9;
  EXPECT_THROW(new_game(GameId::Breakthrough, 0, opt), GameError);
}

TEST(GameCore, CanonicalKeysAreDeterministicAndDistinct) {
  for (auto g : kAllGames) {
    const auto s = new_game(g, 7);
    const auto actions = legal_actions(s);
    std::set<std::string> keys;
    for (auto a : actions) {
      EXPECT_EQ(canonical_key(s, a), canonical_key(s, a));
      keys.insert(canonical_key(s, a));
    }
    EXPECT_EQ(keys.size(), actions.size()) << game_name(g);
  }
}

TEST(GameCore, KuhnKeyIgnoresOpponentCard) {
  KuhnPoker a;
  a.cards = {2, 0};
  KuhnPoker b;
  b.cards = {2, 1};
  const GameState sa(a), sb(b);
  EXPECT_NE(sa, sb);
  EXPECT_EQ(canonical_key(sa, Action{KuhnPoker::kBet}), canonical_key(sb, Action{KuhnPoker::kBet}));
  EXPECT_EQ(observation(sa, Player::P1), observation(sb, Player::P1));
  EXPECT_NE(observation(sa, Player::P2), observation(sb, Player::P2));
}

TEST(GameCore, LiarsDiceKeyIgnoresOpponentDie) {
  LiarsDice a;
  a.dice = {4, 1};
  LiarsDice b;
  b.dice = {4, 6};
  EXPECT_EQ(canonical_key(GameState(a), Action{3}), canonical_key(GameState(b), Action{3}));
}

TEST(GameCore, DeterminizeKeepsViewerInformation) {
  Rng rng(5);
  const auto s = new_game(GameId::KuhnPoker, 11);
  std::set<int> seen;
  for (int i = 0; i < 100; ++i) {
    const auto d = determinize(s, Player::P1, rng);
    EXPECT_EQ(observation(d, Player::P1), observation(s, Player::P1));
    EXPECT_NE(d.as<KuhnPoker>().cards[1], d.as<KuhnPoker>().cards[0]);
    seen.insert(d.as<KuhnPoker>().cards[1]);
  }
  EXPECT_EQ(seen.size(), 2u);
  const auto t = new_game(GameId::TicTacToe, 0);
  EXPECT_EQ(determinize(t, Player::P1, rng), t);
}

TEST(GameCore, NotationRoundTrips) {
  Rng rng(1);
  for (auto g : kAllGames) {
    for (int episode = 0; episode < 50; ++episode) {
      auto s = new_game(g, episode);
      while (!is_terminal(s)) {
        for (auto a : legal_actions(s))
          EXPECT_EQ(action_from_string(s, action_to_string(s, a)), a) << action_to_string(s, a);
        const auto actions = legal_actions(s);
        s = apply_action(s, actions[uniform_index(rng, actions.size())]);
      }
    }
  }
}

// Random playouts: bounded length, terminal iff no legal moves, every
// successor legal and one ply further on.
TEST(GameCore, RandomPlayoutFuzz) {
  Rng rng(2024);
  std::vector<Action> actions;
  for (auto g : kAllGames) {
    const int bound = max_game_length(g);
    int longest = 0;
    for (int episode = 0; episode < 100000; ++episode) {
      auto s = new_game(g, static_cast<std::uint64_t>(episode));
      while (true) {
        legal_actions(s, actions);
        const bool terminal = terminal_outcome(s).has_value();
        ASSERT_EQ(terminal, actions.empty()) << game_name(g);
        if (terminal) break;
        const auto a = actions[uniform_index(rng, actions.size())];
        ASSERT_TRUE(is_legal(s, a));
        const auto next = apply_action(s, a);
        ASSERT_EQ(next.move_count(), s.move_count() + 1);
        s = next;
      }
      longest = std::max(longest, s.move_count());
      const auto o = *terminal_outcome(s);
      if (o.of(Player::P1) == Result::Tie) ASSERT_EQ(o.of(Player::P2), Result::Tie);
      if (o.of(Player::P1) == Result::Win) ASSERT_EQ(o.of(Player::P2), Result::Lose);
      if (o.of(Player::P1) == Result::Lose) ASSERT_EQ(o.of(Player::P2), Result::Win);
    }
    EXPECT_LE(longest, bound) << game_name(g);
    EXPECT_LT(longest, kMovePlyLimit) << game_name(g);
  }
}

TEST(GameCore, KuhnHasAtMostThreeDecisions) {
  EXPECT_EQ(max_game_length(GameId::KuhnPoker), 3);
  EXPECT_EQ(max_game_length(GameId::Nim), 16);
  EXPECT_EQ(max_game_length(GameId::ConnectFour), 42);
}

TEST(Solver, TicTacToeIsADraw) {
  MinimaxSolver solver(GameId::TicTacToe);
  auto s = new_game(GameId::TicTacToe, 0);
  EXPECT_EQ(solver.value(s), 0);
  while (!is_terminal(s)) s = apply_action(s, solver.best_action(s));
  EXPECT_EQ(*terminal_outcome(s), Outcome::tie());
}

TEST(Solver, MisereNimFirstPlayerLoses) {
  MinimaxSolver solver(GameId::Nim);
  auto s = new_game(GameId::Nim, 0);
  EXPECT_EQ(solver.value(s), -1);
  while (!is_terminal(s)) s = apply_action(s, solver.best_action(s));
  EXPECT_EQ(terminal_outcome(s)->of(Player::P2), Result::Win);
}

TEST(Solver, RejectsHiddenInformation) {
  EXPECT_THROW(MinimaxSolver(GameId::KuhnPoker), GameError);
}

}  // namespace
}  // namespace scopal
