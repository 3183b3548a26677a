#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "scopal/refine.hpp"

namespace scopal {
namespace {

std::vector<Trajectory> store(std::vector<GameId> games, int episodes, std::uint64_t seed,
                              const char* opponent = "random") {
  InteractionConfig cfg;
  cfg.games = std::move(games);
  cfg.agent1 = AgentSpec::parse("self");
  cfg.agent2 = AgentSpec::parse(opponent);
  cfg.episodes = episodes;
  cfg.master_seed = seed;
  return collect_trajectories(cfg, std::make_shared<const Policy>());
}

const std::vector<TrainingExample>& mixed_examples() {
  static const auto examples = [] {
    const auto ts = store({GameId::TicTacToe, GameId::KuhnPoker, GameId::Nim}, 30, 5);
    return make_examples(label_steps(ts, LabelingConfig{}).steps);
  }();
  return examples;
}

void randomize(Policy& p, std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  for (auto& v : p.theta()) v = n(gen);
}

// Oracle: log-softmax from dense feature rows and the game's theta block.
std::vector<double> oracle_log_probs(const Policy& p, const Decision& d) {
  const auto block = p.block(d.game);
  std::vector<double> z;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto row = d.dense_row(i);
    double s = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) s += row[k] * block[k];
    z.push_back(s);
  }
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - m);
  for (auto& v : z) v -= m + std::log(sum);
  return z;
}

double oracle_kto(const Policy& p, const Policy& ref, const std::vector<TrainingExample>& batch,
                  double beta, Lambdas lam, double z0) {
  double loss = 0.0;
  for (const auto& ex : batch) {
    const double r = oracle_log_probs(p, ex.decision)[ex.index] -
                     oracle_log_probs(ref, ex.decision)[ex.index];
    const bool good = ex.label == Label::Desirable;
    const double l = good ? lam.desirable : lam.undesirable;
    const double arg = good ? beta * (r - z0) : beta * (z0 - r);
    loss += l - l / (1.0 + std::exp(-arg));
  }
  return loss / static_cast<double>(batch.size());
}

// Central-difference check of `f`'s reported gradient on coordinates drawn
// from the blocks the batch touches.
template <typename F>
void check_gradient(Policy& p, const std::vector<GameId>& games, F f, std::mt19937_64& gen,
                    int coords) {
  const auto analytic = f(p).grad;
  const double h = 1e-5;
  for (int c = 0; c < coords; ++c) {
    const GameId g = games[gen() % games.size()];
    const std::size_t k = p.block_offset(g) + gen() % p.block_size(g);
    const double keep = p.theta()[k];
    p.theta()[k] = keep + h;
    const double up = f(p).loss;
    p.theta()[k] = keep - h;
    const double down = f(p).loss;
    p.theta()[k] = keep;
    const double numeric = (up - down) / (2 * h);
    ASSERT_NEAR(analytic[k], numeric, 1e-4 * std::max(1.0, std::abs(numeric)))
        << "coordinate " << k;
  }
}

std::vector<TrainingExample> pick(std::mt19937_64& gen, std::size_t n) {
  const auto& all = mixed_examples();
  std::vector<TrainingExample> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(all[gen() % all.size()]);
  return out;
}

std::vector<GameId> games_of(const std::vector<TrainingExample>& batch) {
  std::vector<GameId> g;
  for (const auto& ex : batch) g.push_back(ex.decision.game);
  return g;
}

TEST(Examples, MixedPoolHasBothLabels) {
  const auto& ex = mixed_examples();
  ASSERT_GT(ex.size(), 50u);
  EXPECT_TRUE(std::any_of(ex.begin(), ex.end(), [](auto& e) { return e.label == Label::Desirable; }));
  EXPECT_TRUE(
      std::any_of(ex.begin(), ex.end(), [](auto& e) { return e.label == Label::Undesirable; }));
}

TEST(Gradient, BehaviorCloningMatchesFiniteDifference) {
  std::mt19937_64 gen(1);
  std::vector<TrainingExample> good;
  for (const auto& e : mixed_examples())
    if (e.label == Label::Desirable) good.push_back(e);
  for (int trial = 0; trial < 64; ++trial) {
    Policy p;
    randomize(p, gen, 0.5);
    std::vector<TrainingExample> batch;
    for (int i = 0; i < 4; ++i) batch.push_back(good[gen() % good.size()]);
    check_gradient(p, games_of(batch), [&](const Policy& q) { return bc_loss(q, batch); }, gen, 6);
  }
}

TEST(Gradient, KtoMatchesFiniteDifferenceAndOracle) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 64; ++trial) {
    Policy p, ref;
    randomize(p, gen, 0.5);
    randomize(ref, gen, 0.5);
    const auto batch = pick(gen, 6);
    KtoOptions opt;
    opt.beta = 0.5 + trial % 3;
    opt.lambdas = {1.0, 0.4};
    opt.z0 = 0.05 * (trial % 5);
    const auto report = kto_loss(p, ref, batch, opt);
    ASSERT_NEAR(report.loss, oracle_kto(p, ref, batch, opt.beta, opt.lambdas, *opt.z0), 1e-12);
    check_gradient(p, games_of(batch),
                   [&](const Policy& q) { return kto_loss(q, ref, batch, opt); }, gen, 6);
  }
}

TEST(Gradient, DpoMatchesFiniteDifference) {
  std::mt19937_64 gen(3);
  const auto pairs = make_preference_pairs(mixed_examples());
  ASSERT_FALSE(pairs.empty());
  for (int trial = 0; trial < 64; ++trial) {
    Policy p, ref;
    randomize(p, gen, 0.5);
    randomize(ref, gen, 0.5);
    std::vector<PreferencePair> batch;
    std::vector<GameId> games;
    for (int i = 0; i < 3; ++i) {
      batch.push_back(pairs[gen() % pairs.size()]);
      games.push_back(batch.back().chosen->decision.game);
    }
    const double beta = 0.1 * (1 + trial % 4);
    check_gradient(p, games, [&](const Policy& q) { return dpo_loss(q, ref, batch, beta); }, gen, 6);
  }
}

TEST(Gradient, SpagMatchesFiniteDifference) {
  std::mt19937_64 gen(4);
  const auto ts = store({GameId::TicTacToe, GameId::Nim}, 10, 9);
  const auto steps = spag_examples(ts);
  ASSERT_FALSE(steps.empty());
  for (int trial = 0; trial < 64; ++trial) {
    Policy p, behavior;
    randomize(p, gen, 0.5);
    randomize(behavior, gen, 0.5);
    std::vector<TrainingExample> batch;
    for (int i = 0; i < 4; ++i) batch.push_back(steps[gen() % steps.size()]);
    check_gradient(p, games_of(batch),
                   [&](const Policy& q) { return spag_loss(q, behavior, batch, 0.2); }, gen, 6);
  }
}

TEST(FixedPoint, KtoAtReferenceIsHalfLambda) {
  std::mt19937_64 gen(5);
  Policy p;
  randomize(p, gen, 0.7);
  KtoOptions opt;
  opt.lambdas = {0.25, 1.0};
  for (const auto& ex : mixed_examples()) {
    const std::vector<TrainingExample> one{ex};
    const auto r = kto_loss(p, p, one, opt);
    const double lam = ex.label == Label::Desirable ? 0.25 : 1.0;
    ASSERT_NEAR(r.loss, lam / 2, 1e-9);
    EXPECT_EQ(r.z0, 0.0);
  }
  const auto r = kto_loss(p, p, mixed_examples(), opt);
  EXPECT_EQ(r.z0, 0.0);
}

TEST(FixedPoint, DpoAtReferenceIsLn2) {
  std::mt19937_64 gen(6);
  Policy p;
  randomize(p, gen, 0.7);
  const auto pairs = make_preference_pairs(mixed_examples());
  for (const auto& pair : pairs) {
    const std::vector<PreferencePair> one{pair};
    ASSERT_NEAR(dpo_loss(p, p, one).loss, std::log(2.0), 1e-9);
  }
}

TEST(Kto, LambdaBalance) {
  const auto l = balance_lambdas(100, 300);
  EXPECT_EQ(l.desirable, 1.0);
  EXPECT_DOUBLE_EQ(l.undesirable, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(l.desirable * 100, l.undesirable * 300);
  const auto m = balance_lambdas(7, 2);
  EXPECT_DOUBLE_EQ(m.desirable * 7, m.undesirable * 2);
  EXPECT_EQ(std::max(m.desirable, m.undesirable), 1.0);
  const auto e = balance_lambdas(5, 0);
  EXPECT_EQ(e.desirable, 1.0);
  EXPECT_EQ(e.undesirable, 1.0);
}

TEST(Kto, ShiftedPairReferencePoint) {
  std::mt19937_64 gen(7);
  Policy p, ref;
  randomize(p, gen, 0.5);
  randomize(ref, gen, 0.5);
  const auto batch = pick(gen, 12);
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& y = batch[(i + 1) % batch.size()];
    const auto& x = batch[i].decision;
    if (y.decision.game != x.game) continue;
    const auto it = std::find(x.actions.begin(), x.actions.end(), y.action());
    if (it == x.actions.end()) continue;
    const auto j = static_cast<std::size_t>(it - x.actions.begin());
    sum += oracle_log_probs(p, x)[j] - oracle_log_probs(ref, x)[j];
    ++n;
  }
  const double expect = n == 0 ? 0.0 : std::max(0.0, sum / n);
  EXPECT_NEAR(estimate_z0(p, ref, batch, KlEstimate::ShiftedPairs), expect, 1e-12);
  EXPECT_GE(estimate_z0(p, ref, batch, KlEstimate::Exact), 0.0);
  const std::vector<TrainingExample> single{batch[0]};
  EXPECT_EQ(estimate_z0(p, ref, single, KlEstimate::ShiftedPairs), 0.0);
}

TEST(Kto, PermutationInvariantWithExactKl) {
  std::mt19937_64 gen(8);
  Policy p, ref;
  randomize(p, gen, 0.5);
  randomize(ref, gen, 0.5);
  auto batch = pick(gen, 10);
  KtoOptions opt;
  opt.kl = KlEstimate::Exact;
  const auto a = kto_loss(p, ref, batch, opt);
  std::shuffle(batch.begin(), batch.end(), gen);
  const auto b = kto_loss(p, ref, batch, opt);
  EXPECT_NEAR(a.loss, b.loss, 1e-12);
  EXPECT_NEAR(a.z0, b.z0, 1e-12);
  for (std::size_t k = 0; k < a.grad.size(); ++k) ASSERT_NEAR(a.grad[k], b.grad[k], 1e-12);
}

TEST(Kto, DesirableOnlyBatchIsWellDefined) {
  std::vector<TrainingExample> good;
  for (const auto& e : mixed_examples())
    if (e.label == Label::Desirable && good.size() < 8) good.push_back(e);
  Policy p;
  const auto r = kto_loss(p, p, good, KtoOptions{});
  EXPECT_NEAR(r.loss, 0.5, 1e-12);
  EXPECT_EQ(r.n_undesirable, 0u);
  EXPECT_TRUE(std::all_of(r.grad.begin(), r.grad.end(), [](double g) { return std::isfinite(g); }));
}

TEST(Losses, Errors) {
  Policy p;
  EXPECT_THROW(bc_loss(p, {}), std::invalid_argument);
  EXPECT_THROW(kto_loss(p, p, {}, KtoOptions{}), std::invalid_argument);
  EXPECT_THROW(dpo_loss(p, p, {}), std::invalid_argument);
  EXPECT_THROW(spag_loss(p, p, {}), std::invalid_argument);
  std::vector<TrainingExample> bad;
  for (const auto& e : mixed_examples())
    if (e.label == Label::Undesirable) {
      bad.push_back(e);
      break;
    }
  EXPECT_THROW(bc_loss(p, bad), std::invalid_argument);
  KtoOptions opt;
  opt.beta = 0;
  EXPECT_THROW(kto_loss(p, p, bad, opt), std::invalid_argument);
}

TEST(Bc, RepeatedStepsDriveProbabilityTowardOne) {
  std::vector<TrainingExample> good;
  for (const auto& e : mixed_examples())
    if (e.label == Label::Desirable && e.decision.size() > 3) {
      good.push_back(e);
      break;
    }
  ASSERT_EQ(good.size(), 1u);
  Policy p;
  double prev = std::exp(oracle_log_probs(p, good[0].decision)[good[0].index]);
  for (int it = 0; it < 200; ++it) {
    const auto r = bc_loss(p, good);
    for (std::size_t k = 0; k < r.grad.size(); ++k) p.theta()[k] -= 0.5 * r.grad[k];
    const double now = std::exp(oracle_log_probs(p, good[0].decision)[good[0].index]);
    ASSERT_GE(now, prev);
    prev = now;
  }
  EXPECT_GT(prev, 0.95);
}

TEST(Dpo, PairsShareStateAndRespectCap) {
  const auto& ex = mixed_examples();
  const auto pairs = make_preference_pairs(ex, 4);
  std::map<std::string, int> per_state;
  for (const auto& p : pairs) {
    EXPECT_EQ(p.chosen->state_key, p.rejected->state_key);
    EXPECT_EQ(p.chosen->label, Label::Desirable);
    EXPECT_EQ(p.rejected->label, Label::Undesirable);
    ++per_state[p.chosen->state_key];
  }
  for (auto& [k, n] : per_state) EXPECT_LE(n, 4);
  EXPECT_LE(make_preference_pairs(ex, 1).size(), per_state.size());
}

// Closed form for a decisive game: round t of T gets
// (1 - g) g^(T - t) / (1 - g^(T + 1)).
TEST(Spag, RewardsFollowDiscountedSchedule) {
  Trajectory t;
  t.game = GameId::TicTacToe;
  t.learner_seats = {Player::P1, Player::P2};
  auto s = new_game(GameId::TicTacToe, 0);
  for (auto m : {"C1R1", "C1R2", "C2R1", "C2R2", "C3R1"}) {
    const auto a = action_from_string(s, m);
    t.steps.push_back({canonical_key(s, a), s.to_move(), a, m, s.move_count()});
    s = apply_action(s, a);
  }
  t.outcome = *terminal_outcome(s);
  ASSERT_EQ(t.outcome.of(Player::P1), Result::Win);
  const auto r = spag_assign_rewards(t, 0.8);
  ASSERT_EQ(r.size(), 5u);
  const double expect_p1[] = {0.21680216802168, 0.27100271002710, 0.33875338753388};
  const double expect_p2[] = {-0.21680216802168, -0.27100271002710};
  EXPECT_NEAR(r[0], expect_p1[0], 1e-12);
  EXPECT_NEAR(r[2], expect_p1[1], 1e-12);
  EXPECT_NEAR(r[4], expect_p1[2], 1e-12);
  EXPECT_NEAR(r[1], expect_p2[0], 1e-12);
  EXPECT_NEAR(r[3], expect_p2[1], 1e-12);
  // The schedule over rounds 0..T sums to one.
  const double g = 0.8;
  double total = (1 - g) * std::pow(g, 3) / (1 - std::pow(g, 4));
  for (int i : {0, 2, 4}) total += r[i];
  EXPECT_NEAR(total, 1.0, 1e-12);

  t.outcome = Outcome::tie();
  for (double v : spag_assign_rewards(t)) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(spag_assign_rewards(t, 1.0), std::invalid_argument);
}

TEST(TrajectoryBc, KeepsOnlyWinnersMoves) {
  const auto ts = store({GameId::TicTacToe}, 20, 3);
  const auto ex = winning_trajectory_examples(ts, StepFilter::All);
  std::size_t expect = 0;
  for (const auto& t : ts)
    for (const auto& s : t.steps) expect += t.outcome.of(s.actor) == Result::Win;
  EXPECT_EQ(ex.size(), expect);
  for (const auto& e : ex) EXPECT_EQ(e.label, Label::Desirable);
}

// ---------------------------------------------------------------------------

LabeledDataset synthetic(std::map<GameId, std::pair<int, int>> counts) {
  LabeledDataset d;
  for (auto& [game, c] : counts)
    for (int i = 0; i < c.first + c.second; ++i) {
      LabeledStep s;
      s.game = game;
      s.key = fmt::format("{}|{:05}", game_name(game), i);
      s.label = i < c.first ? Label::Desirable : Label::Undesirable;
      d.steps.push_back(s);
      (i < c.first ? d.n_desirable : d.n_undesirable) += 1;
    }
  return d;
}

std::map<GameId, std::size_t> per_game(const LabeledDataset& d) {
  std::map<GameId, std::size_t> m;
  for (const auto& s : d.steps) ++m[s.game];
  return m;
}

TEST(Resample, BalanceByGameEqualizes) {
  const auto d = synthetic({{GameId::TicTacToe, {40, 60}}, {GameId::Nim, {100, 200}}});
  const auto b = balance_by_game(d, 11);
  const auto m = per_game(b);
  EXPECT_EQ(m.at(GameId::TicTacToe), 200u);
  EXPECT_EQ(m.at(GameId::Nim), 200u);
  EXPECT_EQ(b.n_desirable + b.n_undesirable, 400u);
  // Downsampled game has no duplicates; every original of the upsampled one survives.
  std::map<std::string, int> seen;
  for (const auto& s : b.steps) ++seen[s.key];
  for (auto& [k, n] : seen)
    if (k.rfind("nim", 0) == 0) EXPECT_EQ(n, 1);
  int ttt_distinct = 0;
  for (auto& [k, n] : seen) ttt_distinct += k.rfind("tictactoe", 0) == 0;
  EXPECT_EQ(ttt_distinct, 100);
  EXPECT_EQ(balance_by_game(d, 11).steps, b.steps);

  const auto odd = balance_by_game(synthetic({{GameId::Breakthrough, {3, 3}},
                                              {GameId::TicTacToe, {1, 1}},
                                              {GameId::Nim, {2, 1}}}),
                                   1);
  const auto mo = per_game(odd);
  EXPECT_EQ(mo.at(GameId::Breakthrough), 4u);
  EXPECT_EQ(mo.at(GameId::TicTacToe), 4u);
  EXPECT_EQ(mo.at(GameId::Nim), 3u);
}

TEST(Resample, ScaleKeepRatio) {
  const std::size_t d = 5448, u = 14999, total = 36116;
  const auto expect_d = static_cast<std::size_t>(std::floor(
      static_cast<double>(total) * static_cast<double>(d) / static_cast<double>(d + u) + 0.5));
  const auto [sd, su] = scaled_counts(d, u, {ScaleTarget::Mode::KeepRatio, total, 0, 0});
  EXPECT_EQ(sd, expect_d);
  EXPECT_EQ(sd + su, total);
  EXPECT_EQ(sd, 9623u);

  const auto data = synthetic({{GameId::TicTacToe, {30, 70}}});
  const auto scaled = scale_dataset(data, {ScaleTarget::Mode::KeepRatio, 250, 0, 0}, 4);
  EXPECT_EQ(scaled.n_desirable, 75u);
  EXPECT_EQ(scaled.n_undesirable, 175u);
  EXPECT_EQ(scale_dataset(data, {ScaleTarget::Mode::KeepRatio, 250, 0, 0}, 4).steps, scaled.steps);
  EXPECT_EQ(scale_dataset(data, {ScaleTarget::Mode::KeepRatio, 100, 0, 0}, 4).steps, data.steps);
  EXPECT_THROW(scale_dataset(data, {ScaleTarget::Mode::KeepRatio, 50, 0, 0}, 4),
               std::invalid_argument);
}

TEST(Resample, ScaleExact) {
  const auto [sd, su] = scaled_counts(5448, 14999, {ScaleTarget::Mode::Exact, 0, 12210, 23906});
  EXPECT_EQ(sd, 12210u);
  EXPECT_EQ(su, 23906u);
  const auto data = synthetic({{GameId::Nim, {10, 20}}});
  const auto s = scale_dataset(data, {ScaleTarget::Mode::Exact, 0, 33, 21}, 9);
  EXPECT_EQ(s.n_desirable, 33u);
  EXPECT_EQ(s.n_undesirable, 21u);
  EXPECT_THROW(scale_dataset(data, {ScaleTarget::Mode::Exact, 0, 5, 30}, 9), std::invalid_argument);
}

// ---------------------------------------------------------------------------

LabeledDataset tictactoe_dataset(int episodes, std::uint64_t seed) {
  return label_steps(store({GameId::TicTacToe}, episodes, seed), LabelingConfig{});
}

TEST(Train, DeterministicAndVersioned) {
  const auto data = tictactoe_dataset(60, 21);
  Policy init;
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.bc_epochs = 2;
  cfg.seed = 3;
  const auto a = train(init, {data.steps, {}}, cfg);
  const auto b = train(init, {data.steps, {}}, cfg);
  EXPECT_TRUE(std::equal(a.policy.theta().begin(), a.policy.theta().end(),
                         b.policy.theta().begin()));
  EXPECT_EQ(a.policy.version(), 1u);
  ASSERT_EQ(a.metrics.size(), 4u);
  EXPECT_EQ(a.metrics[0].stage, "bc");
  EXPECT_EQ(a.metrics[2].stage, "kto");
  EXPECT_EQ(a.metrics[2].n_desirable, data.n_desirable);
  EXPECT_DOUBLE_EQ(a.metrics[2].lambda_desirable * data.n_desirable,
                   a.metrics[2].lambda_undesirable * data.n_undesirable);
  cfg.seed = 4;
  const auto c = train(init, {data.steps, {}}, cfg);
  EXPECT_FALSE(std::equal(a.policy.theta().begin(), a.policy.theta().end(),
                          c.policy.theta().begin()));

  const auto path = std::filesystem::temp_directory_path() / "scopal_metrics.csv";
  write_metrics_csv(path, a.metrics);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "stage,epoch,loss,n_D,n_U,lambda_D,lambda_U,z0");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 4);
  std::filesystem::remove(path);
}

TEST(Train, EveryModeRuns) {
  const auto ts = store({GameId::TicTacToe}, 40, 22);
  const auto data = label_steps(ts, LabelingConfig{});
  for (auto mode : {TrainMode::TwoStage, TrainMode::DirectKto, TrainMode::JointLoss,
                    TrainMode::BcOnly, TrainMode::BcThenDpo, TrainMode::TrajectoryBc,
                    TrainMode::Spag}) {
    TrainConfig cfg;
    cfg.mode = mode;
    cfg.epochs = 1;
    cfg.bc_epochs = 1;
    const auto r = train(Policy{}, {data.steps, ts}, cfg);
    EXPECT_FALSE(r.metrics.empty()) << train_mode_name(mode);
    EXPECT_EQ(parse_train_mode(train_mode_name(mode)), mode);
    for (double v : r.policy.theta()) ASSERT_TRUE(std::isfinite(v));
  }
  EXPECT_THROW(parse_train_mode("adam"), std::invalid_argument);
  TrainConfig bad;
  bad.learning_rate = -1;
  EXPECT_THROW(train(Policy{}, {data.steps, {}}, bad), std::invalid_argument);
  TrainConfig spag;
  spag.mode = TrainMode::Spag;
  EXPECT_THROW(train(Policy{}, {data.steps, {}}, spag), std::invalid_argument);
}

TEST(Train, DivergenceIsReported) {
  const auto data = tictactoe_dataset(20, 23);
  TrainConfig cfg;
  cfg.mode = TrainMode::BcOnly;
  cfg.learning_rate = 1e306;
  EXPECT_THROW(train(Policy{}, {data.steps, {}}, cfg), TrainingDiverged);
}

// Trained policy puts more mass on desirable actions of its training data.
TEST(Train, RaisesLikelihoodOfDesirableActions) {
  const auto data = tictactoe_dataset(150, 24);
  const auto examples = make_examples(data.steps);
  const auto trained = train(Policy{}, {data.steps, {}}, TrainConfig{}).policy;
  double before = 0.0, after = 0.0;
  int n = 0;
  for (const auto& e : examples)
    if (e.label == Label::Desirable) {
      before += oracle_log_probs(Policy{}, e.decision)[e.index];
      after += oracle_log_probs(trained, e.decision)[e.index];
      ++n;
    }
  ASSERT_GT(n, 0);
  EXPECT_GT(after / n, before / n);
}

}  // namespace
}  // namespace scopal
