#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "scopal/rewards.hpp"

namespace scopal {
namespace {

std::vector<Trajectory> tictactoe_store(int episodes, std::uint64_t seed,
                                        const char* opponent = "self") {
  InteractionConfig cfg;
  cfg.games = {GameId::TicTacToe};
  cfg.agent1 = AgentSpec::parse("self");
  cfg.agent2 = AgentSpec::parse(opponent);
  cfg.episodes = episodes;
  cfg.master_seed = seed;
  return collect_trajectories(cfg, std::make_shared<const Policy>());
}

Trajectory scripted(GameId game, std::initializer_list<const char*> moves,
                    std::vector<Player> learners = {Player::P1, Player::P2}) {
  Trajectory t;
  t.game = game;
  t.learner_seats = std::move(learners);
  auto s = new_game(game, 0);
  for (auto m : moves) {
    const auto a = action_from_string(s, m);
    t.steps.push_back({canonical_key(s, a), s.to_move(), a, m, s.move_count()});
    s = apply_action(s, a);
  }
  t.outcome = *terminal_outcome(s);
  return t;
}

// Independent recount: re-derive every key by replaying notation from the
// initial position, then count with a linear scan over a flat list.
std::vector<std::pair<std::string, StepStats>> brute_force_counts(const std::vector<Trajectory>& ts) {
  std::vector<std::pair<std::string, StepStats>> flat;
  for (const auto& t : ts) {
    auto s = new_game(t.game, t.chance_seed);
    for (const auto& step : t.steps) {
      const auto a = action_from_string(s, step.notation);
      const std::string key = std::string(game_name(t.game)) + "|" +
                              std::string(player_name(s.to_move())) + "|" +
                              observation(s, s.to_move()) + "|" + step.notation;
      const Player actor = s.to_move();
      s = apply_action(s, a);
      if (!t.is_learner(actor)) continue;
      auto it = std::find_if(flat.begin(), flat.end(), [&](auto& e) { return e.first == key; });
      if (it == flat.end()) {
        flat.push_back({key, {}});
        it = flat.end() - 1;
      }
      const auto r = t.outcome.of(actor);
      it->second.n_all += 1;
      it->second.n_win += r == Result::Win;
      it->second.n_tie += r == Result::Tie;
      it->second.n_lose += r == Result::Lose;
    }
  }
  std::sort(flat.begin(), flat.end(), [](auto& a, auto& b) { return a.first < b.first; });
  return flat;
}

TEST(Stats, WinnerStepsCountedUnderActorOutcome) {
  const auto t = scripted(GameId::TicTacToe, {"C1R1", "C1R2", "C2R1", "C2R2", "C3R1"});
  ASSERT_EQ(t.outcome.of(Player::P1), Result::Win);
  const auto stats = accumulate_stats(std::span(&t, 1));
  ASSERT_EQ(stats.size(), 5u);
  int winners = 0;
  for (const auto& s : t.steps) {
    const auto& st = stats.at(s.key);
    EXPECT_EQ(st.n_all, 1);
    if (s.actor == Player::P1) {
      EXPECT_EQ(st.n_win, 1);
      ++winners;
    } else {
      EXPECT_EQ(st.n_lose, 1);
    }
  }
  EXPECT_EQ(winners, 3);
}

TEST(Stats, SameStepInWinAndLoss) {
  const std::vector<Trajectory> ts = {
      scripted(GameId::TicTacToe, {"C1R1", "C1R2", "C2R1", "C2R2", "C3R1"}),  // X wins
      scripted(GameId::TicTacToe, {"C1R1", "C1R2", "C2R1", "C2R2", "C3R3", "C3R2"}),  // O wins
  };
  const auto stats = accumulate_stats(ts);
  const auto& first = stats.at(ts[0].steps[0].key);
  EXPECT_EQ(first.n_all, 2);
  EXPECT_EQ(first.n_win, 1);
  EXPECT_EQ(first.n_lose, 1);
}

TEST(Stats, LearnerFilter) {
  const auto t = scripted(GameId::Nim, {"<pile:4, take:7>", "<pile:3, take:5>", "<pile:2, take:3>",
                                        "<pile:1, take:1>"},
                          {Player::P2});
  EXPECT_EQ(accumulate_stats(std::span(&t, 1)).size(), 2u);
  EXPECT_EQ(accumulate_stats(std::span(&t, 1), StepFilter::All).size(), 4u);
}

TEST(Stats, MatchesBruteForceRecount) {
  auto ts = tictactoe_store(100, 5, "random");
  const auto more = tictactoe_store(50, 6, "self");
  ts.insert(ts.end(), more.begin(), more.end());
  const auto oracle = brute_force_counts(ts);
  for (int jobs : {1, 3}) {
    const auto stats = accumulate_stats(ts, StepFilter::Learner, jobs);
    ASSERT_EQ(stats.size(), oracle.size());
    std::size_t i = 0;
    for (const auto& [key, st] : stats) {
      EXPECT_EQ(key, oracle[i].first);
      EXPECT_EQ(st, oracle[i].second);
      EXPECT_EQ(st.n_all, st.n_win + st.n_tie + st.n_lose);
      ++i;
    }
  }
}

TEST(Stats, MergeIsAssociativeAndCommutative) {
  const auto ts = tictactoe_store(60, 8);
  const std::span all(ts);
  const auto a = accumulate_stats(all.subspan(0, 20));
  const auto b = accumulate_stats(all.subspan(20, 15));
  const auto c = accumulate_stats(all.subspan(35));
  // (a + b) + c versus c + (b + a)
  StatsMap left = a, right = c, ba = b;
  merge_stats(left, b);
  merge_stats(left, c);
  merge_stats(ba, a);
  merge_stats(right, ba);
  EXPECT_EQ(left, right);
  EXPECT_EQ(left, accumulate_stats(all));
}

TEST(Estimate, Formulas) {
  StatsMap stats;
  stats["a"] = {4, 3, 0, 1};
  stats["b"] = {1, 1, 0, 0};
  stats["c"] = {4, 1, 2, 1};
  RewardMethod wr;
  auto r = estimate_rewards(stats, wr);
  EXPECT_DOUBLE_EQ(r["a"], 0.75);
  EXPECT_DOUBLE_EQ(r["c"], 0.25);
  wr.tie_weight = 0.5;
  EXPECT_DOUBLE_EQ(estimate_rewards(stats, wr)["c"], 0.5);
  RewardMethod beta{RewardMethod::Kind::Beta};
  r = estimate_rewards(stats, beta);
  EXPECT_DOUBLE_EQ(r["b"], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r["c"], 2.0 / 4.0);
}

TEST(Estimate, Errors) {
  StatsMap stats;
  stats["z"] = {};
  EXPECT_THROW(estimate_rewards(stats, RewardMethod{}), std::invalid_argument);
  StatsMap ok;
  ok["a"] = {1, 1, 0, 0};
  EXPECT_THROW(estimate_rewards(ok, RewardMethod{RewardMethod::Kind::Discounted}),
               std::invalid_argument);
  RewardMethod bad{RewardMethod::Kind::Discounted};
  bad.gamma = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  RewardMethod bad_beta{RewardMethod::Kind::Beta};
  bad_beta.alpha0 = 0.0;
  EXPECT_THROW(estimate_rewards(ok, bad_beta), std::invalid_argument);
  EXPECT_THROW(RewardMethod::parse_kind("montecarlo"), std::invalid_argument);
}

TEST(Estimate, DiscountedReturn) {
  // Three plies, first player wins: step t=1 gets 0.8^2.
  Trajectory t;
  t.learner_seats = {Player::P1, Player::P2};
  t.steps = {{"a", Player::P1, {}, "", 0}, {"b", Player::P2, {}, "", 1}, {"c", Player::P1, {}, "", 2}};
  t.outcome = Outcome::win_for(Player::P1);
  Trajectory tie = t;
  tie.outcome = Outcome::tie();
  RewardMethod m{RewardMethod::Kind::Discounted};
  auto r = estimate_rewards(std::span(&t, 1), m);
  EXPECT_NEAR(r["a"], 0.64, 1e-12);
  EXPECT_NEAR(r["b"], -0.8, 1e-12);
  EXPECT_NEAR(r["c"], 1.0, 1e-12);
  const std::vector<Trajectory> both = {t, tie};
  r = estimate_rewards(both, m);
  EXPECT_NEAR(r["a"], 0.32, 1e-12);
}

TEST(Estimate, RangesOnRealStore) {
  const auto ts = tictactoe_store(200, 3, "mcts:20");
  const auto stats = accumulate_stats(ts);
  for (auto [k, v] : estimate_rewards(stats, RewardMethod{})) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  for (auto [k, v] : estimate_rewards(stats, RewardMethod{RewardMethod::Kind::Beta})) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  for (auto [k, v] : estimate_rewards(ts, RewardMethod{RewardMethod::Kind::Discounted})) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Estimate, PermutationInvariance) {
  auto ts = tictactoe_store(120, 4);
  std::vector<RewardMap> before;
  for (auto kind : {RewardMethod::Kind::WinRate, RewardMethod::Kind::Discounted,
                    RewardMethod::Kind::Beta})
    before.push_back(estimate_rewards(ts, RewardMethod{kind}));
  std::mt19937_64 rng(9);
  std::shuffle(ts.begin(), ts.end(), rng);
  std::size_t i = 0;
  for (auto kind : {RewardMethod::Kind::WinRate, RewardMethod::Kind::Discounted,
                    RewardMethod::Kind::Beta}) {
    const auto after = estimate_rewards(ts, RewardMethod{kind});
    ASSERT_EQ(after.size(), before[i].size());
    for (const auto& [k, v] : after) EXPECT_NEAR(v, before[i].at(k), 1e-12);
    ++i;
  }
}

TEST(Label, ThresholdIsStrict) {
  EXPECT_EQ(label_for(0.75, 0.5), Label::Desirable);
  EXPECT_EQ(label_for(0.2, 0.5), Label::Undesirable);
  EXPECT_EQ(label_for(0.5, 0.5), Label::Undesirable);
}

TEST(Label, SeparatesAlwaysWinningFromAlwaysLosing) {
  // Misere Nim lines where P1's opening decides the result.
  std::vector<Trajectory> ts;
  for (int i = 0; i < 3; ++i) {
    ts.push_back(scripted(GameId::Nim, {"<pile:4, take:7>", "<pile:3, take:5>", "<pile:2, take:3>",
                                        "<pile:1, take:1>"}));
    ts.push_back(scripted(GameId::Nim, {"<pile:4, take:6>", "<pile:3, take:5>", "<pile:2, take:3>",
                                        "<pile:1, take:1>", "<pile:4, take:1>"}));
  }
  const auto stats = accumulate_stats(ts);
  const auto rewards = estimate_rewards(stats, RewardMethod{});
  const auto& b = ts[0].steps[0].key;
  const auto& a = ts[1].steps[0].key;
  ASSERT_NE(a, b);
  EXPECT_EQ(ts[0].outcome.of(Player::P1), Result::Win);
  EXPECT_EQ(ts[1].outcome.of(Player::P1), Result::Lose);
  EXPECT_EQ(rewards.at(a), 0.0);
  EXPECT_EQ(rewards.at(b), 1.0);
  for (double delta : {0.01, 0.3, 0.5, 0.99}) {
    EXPECT_EQ(label_for(rewards.at(b), delta), Label::Desirable);
    EXPECT_EQ(label_for(rewards.at(a), delta), Label::Undesirable);
  }
}

TEST(Label, DatasetIsSortedCountedAndReplayable) {
  InteractionConfig cfg;
  cfg.games = {GameId::KuhnPoker, GameId::TicTacToe, GameId::Breakthrough};
  cfg.agent1 = AgentSpec::parse("self");
  cfg.agent2 = AgentSpec::parse("random");
  cfg.episodes = 40;
  cfg.options = GameOptions{3, 5};
  const auto ts = collect_trajectories(cfg, std::make_shared<const Policy>(cfg.options));
  const auto data = label_steps(ts, LabelingConfig{});
  ASSERT_FALSE(data.steps.empty());
  EXPECT_EQ(data.n_desirable + data.n_undesirable, data.steps.size());
  EXPECT_EQ(data.steps.size(), accumulate_stats(ts).size());
  for (std::size_t i = 1; i < data.steps.size(); ++i)
    EXPECT_LT(std::tie(data.steps[i - 1].game, data.steps[i - 1].key),
              std::tie(data.steps[i].game, data.steps[i].key));
  for (const auto& s : data.steps) {
    const auto state = s.state();
    EXPECT_EQ(state_key(state), s.state_key);
    EXPECT_EQ(canonical_key(state, s.action_code(state)), s.key);
    EXPECT_EQ(s.label, label_for(s.reward, 0.5));
  }

  const auto path = std::filesystem::temp_directory_path() / "scopal_labeled.jsonl";
  write_labeled(path, data);
  const auto back = read_labeled(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.steps, data.steps);
  EXPECT_EQ(back.n_desirable, data.n_desirable);

  auto line = labeled_step_to_json(data.steps[0]);
  line.replace(line.find("\"n_all\":"), 8, "\"n_all\":9");
  EXPECT_THROW(labeled_step_from_json(line), std::runtime_error);
}

TEST(Label, MinCountFilter) {
  const auto ts = tictactoe_store(100, 12);
  LabelingConfig cfg;
  const auto all = label_steps(ts, cfg);
  cfg.min_count = 3;
  const auto filtered = label_steps(ts, cfg);
  EXPECT_LT(filtered.steps.size(), all.steps.size());
  for (const auto& s : filtered.steps) EXPECT_GE(s.counts.n_all, 3);
}

}  // namespace
}  // namespace scopal
