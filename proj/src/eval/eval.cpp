#include "scopal/eval.hpp"

#include <fstream>
#include <mutex>
#include <stdexcept>

#include <fmt/format.h>

#include "scopal/random.hpp"
#include "scopal/solver.hpp"

namespace scopal {

double win_rate(std::size_t n_win, std::size_t n_lose, std::size_t n_tie) {
  const std::size_t n = n_win + n_lose + n_tie;
  if (n == 0) throw std::invalid_argument("win rate of zero games");
  return (static_cast<double>(n_win) + 0.5 * static_cast<double>(n_tie)) / static_cast<double>(n);
}

void EvalConfig::validate() const {
  if (episodes < 2)
    throw std::invalid_argument(
        fmt::format("evaluation needs at least 2 episodes for seat alternation, got {}", episodes));
  if (games.empty()) throw std::invalid_argument("evaluation needs at least one game");
  if (!(temperature > 0.0)) throw std::invalid_argument("evaluation temperature must be positive");
}

Agent eval_agent(const AgentSpec& spec, const EvalConfig& config,
                 std::shared_ptr<const Policy> learner) {
  return make_agent(spec, AgentContext{std::move(learner), config.temperature,
                                       config.exploration_c, config.rollout_count});
}

Agent optimal_agent(GameId game) {
  auto solver = std::make_shared<MinimaxSolver>(game);
  auto lock = std::make_shared<std::mutex>();
  return {"optimal", [solver, lock](const GameState& s, std::uint64_t) {
            std::lock_guard guard(*lock);
            return solver->best_action(s);
          }};
}

namespace {

InteractionConfig schedule(const EvalConfig& config, GameId game) {
  InteractionConfig ic;
  ic.games = {game};
  ic.episodes = config.episodes;
  ic.master_seed = config.master_seed;
  ic.options = config.options;
  ic.jobs = config.jobs;
  return ic;
}

Player agent1_seat(const Trajectory& t) { return t.episode % 2 == 0 ? Player::P1 : Player::P2; }

void write_or_throw(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
}

}  // namespace

MatchReport play_match(const Agent& agent1, const Agent& agent2, GameId game,
                       const EvalConfig& config) {
  config.validate();
  const auto ts = collect_trajectories(schedule(config, game), agent1, agent2, false);
  MatchReport r{game, agent1.label, agent2.label, 0, 0, 0, 0.0, config.master_seed};
  for (const auto& t : ts) {
    switch (t.outcome.of(agent1_seat(t))) {
      case Result::Win: ++r.n_win; break;
      case Result::Lose: ++r.n_lose; break;
      case Result::Tie: ++r.n_tie; break;
    }
  }
  r.win_rate = win_rate(r.n_win, r.n_lose, r.n_tie);
  return r;
}

std::vector<MatchReport> tournament(const Agent& agent, const std::vector<Agent>& opponents,
                                    const EvalConfig& config) {
  std::vector<MatchReport> out;
  for (auto game : config.games)
    for (const auto& opp : opponents) out.push_back(play_match(agent, opp, game, config));
  return out;
}

double pooled_win_rate(std::span<const MatchReport> reports) {
  std::size_t w = 0, l = 0, t = 0;
  for (const auto& r : reports) {
    w += r.n_win;
    l += r.n_lose;
    t += r.n_tie;
  }
  return win_rate(w, l, t);
}

void write_tournament_csv(const std::filesystem::path& path, std::span<const MatchReport> reports) {
  std::string text = "game,agent,opponent,episodes,n_win,n_lose,n_tie,win_rate,master_seed\n";
  for (const auto& r : reports)
    text += fmt::format("{},{},{},{},{},{},{},{},{}\n", game_name(r.game), r.agent1, r.agent2,
                        r.episodes(), r.n_win, r.n_lose, r.n_tie, r.win_rate, r.master_seed);
  write_or_throw(path, text);
}

HeadToHead head_to_head(const std::vector<Agent>& agents, const EvalConfig& config) {
  config.validate();
  HeadToHead h;
  const auto n = agents.size();
  for (const auto& a : agents) h.labels.push_back(a.label);
  h.matrix.assign(n, std::vector<double>(n, 0.5));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<MatchReport> pair;
      for (auto game : config.games) pair.push_back(play_match(agents[i], agents[j], game, config));
      h.matrix[i][j] = pooled_win_rate(pair);
      h.matrix[j][i] = 1.0 - h.matrix[i][j];
      h.matches.insert(h.matches.end(), pair.begin(), pair.end());
    }
  return h;
}

void write_head_to_head_csv(const std::filesystem::path& path, const HeadToHead& h2h) {
  std::string text = "agent";
  for (const auto& l : h2h.labels) text += "," + l;
  text += "\n";
  for (std::size_t i = 0; i < h2h.labels.size(); ++i) {
    text += h2h.labels[i];
    for (double v : h2h.matrix[i]) text += fmt::format(",{}", v);
    text += "\n";
  }
  write_or_throw(path, text);
}

// ---------------------------------------------------------------------------

LabeledDataset build_dataset(std::span<const Trajectory> trajectories,
                             const PipelineConfig& config) {
  auto data = label_steps(trajectories, config.labeling);
  if (config.balance_games) data = balance_by_game(data, mix_seed({config.resample_seed, 1}));
  if (config.scale) data = scale_dataset(data, *config.scale, mix_seed({config.resample_seed, 2}));
  return data;
}

namespace {

std::vector<Agent> resolve_opponents(const PipelineConfig& config,
                                     std::shared_ptr<const Policy> learner) {
  std::vector<Agent> out;
  for (const auto& spec : config.eval_opponents)
    out.push_back(eval_agent(spec, config.eval, learner));
  return out;
}

PipelineResult finish_pipeline(std::vector<Trajectory> ts, const Policy& start,
                               const PipelineConfig& config, const TrainConfig& train_config) {
  PipelineResult r;
  r.trajectories = std::move(ts);
  r.dataset = build_dataset(r.trajectories, config);
  r.trained = train(start, {r.dataset.steps, r.trajectories}, train_config);
  auto trained = std::make_shared<const Policy>(r.trained.policy);
  r.reports = tournament(policy_agent(trained, config.eval.temperature, "trained"),
                         resolve_opponents(config, trained), config.eval);
  return r;
}

}  // namespace

PipelineResult run_pipeline(const Policy& base, const PipelineConfig& config) {
  config.eval.validate();
  auto ic = config.interaction;
  ic.agent1 = AgentSpec::parse("self");
  return finish_pipeline(collect_trajectories(ic, std::make_shared<const Policy>(base)), base,
                         config, config.train);
}

double interaction_win_rate(std::span<const Trajectory> trajectories) {
  std::size_t w = 0, l = 0, t = 0;
  for (const auto& tr : trajectories) {
    switch (tr.outcome.of(agent1_seat(tr))) {
      case Result::Win: ++w; break;
      case Result::Lose: ++l; break;
      case Result::Tie: ++t; break;
    }
  }
  return win_rate(w, l, t);
}

std::vector<SweepRow> opponent_sweep(const Policy& base, const std::vector<AgentSpec>& ladder,
                                     const PipelineConfig& config) {
  if (ladder.empty()) throw std::invalid_argument("opponent ladder is empty");
  std::vector<SweepRow> rows;
  for (const auto& rung : ladder) {
    auto cfg = config;
    cfg.interaction.agent2 = rung;
    const auto r = run_pipeline(base, cfg);
    rows.push_back({rung.label(), interaction_win_rate(r.trajectories), r.dataset.n_desirable,
                    r.dataset.n_undesirable, pooled_win_rate(r.reports)});
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  std::string text = "rung,interaction_win_rate,n_desirable,n_undesirable,trained_win_rate\n";
  for (const auto& r : rows)
    text += fmt::format("{},{},{},{},{}\n", r.rung, r.interaction_win_rate, r.n_desirable,
                        r.n_undesirable, r.trained_win_rate);
  write_or_throw(path, text);
}

std::vector<IterationRound> iterate(const Policy& base, int rounds, const PipelineConfig& config) {
  if (rounds < 1) throw std::invalid_argument("iterate needs at least one round");
  std::vector<IterationRound> out;
  // Checkpoint 0 is the base policy; round k starts from checkpoint k - 1 and
  // plays it against checkpoint k - 2.
  Policy current = base;
  Policy previous = base;
  for (int round = 1; round <= rounds; ++round) {
    PipelineResult r;
    if (round == 1) {
      auto cfg = config;
      cfg.interaction.agent2 = AgentSpec::parse("self");
      r = run_pipeline(current, cfg);
    } else {
      auto ic = config.interaction;
      ic.master_seed = mix_seed({config.interaction.master_seed, static_cast<std::uint64_t>(round)});
      auto tc = config.train;
      tc.seed = mix_seed({config.train.seed, static_cast<std::uint64_t>(round)});
      const double tau = config.interaction.temperature;
      const auto me = policy_agent(std::make_shared<const Policy>(current), tau, "self");
      const auto prev = policy_agent(std::make_shared<const Policy>(previous), tau,
                                     fmt::format("iter{}", round - 2));
      r = finish_pipeline(collect_trajectories(ic, me, prev, false), current, config, tc);
    }
    IterationRound ir;
    ir.round = round;
    ir.policy = r.trained.policy;
    ir.n_desirable = r.dataset.n_desirable;
    ir.n_undesirable = r.dataset.n_undesirable;
    ir.eval_win_rate = pooled_win_rate(r.reports);
    ir.reports = std::move(r.reports);
    previous = current;
    current = ir.policy;
    out.push_back(std::move(ir));
  }
  return out;
}

// ---------------------------------------------------------------------------

RegretReport regret(const Agent& agent, const Agent& opponent, GameId game,
                    const EvalConfig& config) {
  if (game != GameId::Nim && game != GameId::TicTacToe)
    throw std::invalid_argument(
        fmt::format("regret needs an exactly solvable game (nim, tictactoe), got {}",
                    game_name(game)));
  config.validate();
  const auto ts = collect_trajectories(schedule(config, game), agent, opponent, false);
  MinimaxSolver solver(game);
  RegretReport r{game, 0.0, 0, config.episodes};
  double total = 0.0;
  for (const auto& t : ts) {
    const Player me = agent1_seat(t);
    auto s = new_game(game, t.chance_seed, t.options);
    for (const auto& step : t.steps) {
      if (step.actor == me) {
        total += (solver.value(s) - solver.action_value(s, step.action)) / 2.0;
        ++r.moves;
      }
      s = apply_action(s, step.action);
    }
  }
  r.mean_regret = r.moves == 0 ? 0.0 : total / static_cast<double>(r.moves);
  return r;
}

void write_regret_csv(const std::filesystem::path& path, std::span<const RegretReport> reports,
                      std::span<const std::string> labels) {
  if (labels.size() != reports.size())
    throw std::invalid_argument("one label per regret report is required");
  std::string text = "agent,game,episodes,moves,mean_regret\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    text += fmt::format("{},{},{},{},{}\n", labels[i], game_name(r.game), r.episodes, r.moves,
                        r.mean_regret);
  }
  write_or_throw(path, text);
}

}  // namespace scopal
