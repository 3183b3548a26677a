#pragma once

// Evaluation: win rates, tournaments against the opponent ladder, pairwise
// matches, the opponent-selection sweep, iterative self-play and exact-solver
// regret.
//
// Matches reuse the interaction schedule (seats alternate by episode, every
// seed derived from the master seed), so each report is a pure function of
// its configuration.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scopal/interaction.hpp"
#include "scopal/refine.hpp"
#include "scopal/rewards.hpp"

namespace scopal {

/// (w + 0.5 t) / (w + l + t). Throws std::invalid_argument when all are zero.
double win_rate(std::size_t n_win, std::size_t n_lose, std::size_t n_tie);

struct EvalConfig {
  std::vector<GameId> games{kAllGames.begin(), kAllGames.end()};
  int episodes = 100;  // per game and opponent
  double temperature = 0.2;
  std::uint64_t master_seed = 0;
  double exploration_c = 2.0;
  int rollout_count = 1;
  GameOptions options;
  int jobs = 0;

  /// Throws std::invalid_argument when episodes < 2 or games is empty.
  void validate() const;
};

/// Resolves a spec with the evaluation temperature.
Agent eval_agent(const AgentSpec& spec, const EvalConfig& config,
                 std::shared_ptr<const Policy> learner = nullptr);

/// Plays the minimax move (lowest code among ties). Perfect-information
/// games only; safe to share across workers.
Agent optimal_agent(GameId game);

/// Counts from agent 1's perspective.
struct MatchReport {
  GameId game = GameId::TicTacToe;
  std::string agent1;
  std::string agent2;
  std::size_t n_win = 0;
  std::size_t n_lose = 0;
  std::size_t n_tie = 0;
  double win_rate = 0.0;
  std::uint64_t master_seed = 0;

  std::size_t episodes() const { return n_win + n_lose + n_tie; }
  friend bool operator==(const MatchReport&, const MatchReport&) = default;
};

MatchReport play_match(const Agent& agent1, const Agent& agent2, GameId game,
                       const EvalConfig& config);

/// One report per (game, opponent), game-major in config order.
std::vector<MatchReport> tournament(const Agent& agent, const std::vector<Agent>& opponents,
                                    const EvalConfig& config);

/// Win rate summed over reports (pooled counts).
double pooled_win_rate(std::span<const MatchReport> reports);

void write_tournament_csv(const std::filesystem::path& path, std::span<const MatchReport> reports);

struct HeadToHead {
  std::vector<std::string> labels;
  /// matrix[i][j]: win rate of agent i against agent j over all games.
  /// Diagonal fixed at 0.5; matrix[j][i] = 1 - matrix[i][j].
  std::vector<std::vector<double>> matrix;
  std::vector<MatchReport> matches;  // i < j only
};

HeadToHead head_to_head(const std::vector<Agent>& agents, const EvalConfig& config);

void write_head_to_head_csv(const std::filesystem::path& path, const HeadToHead& h2h);

// ---------------------------------------------------------------------------
// Collect, label, train, evaluate.

struct PipelineConfig {
  InteractionConfig interaction;  // agent 1 is always the learner ("self")
  LabelingConfig labeling;
  TrainConfig train;
  EvalConfig eval;
  std::vector<AgentSpec> eval_opponents{AgentSpec{}};  // random
  bool balance_games = false;
  std::optional<ScaleTarget> scale;
  std::uint64_t resample_seed = 0;
};

/// Labels the trajectories, then applies the optional per-game balancing and
/// class scaling.
LabeledDataset build_dataset(std::span<const Trajectory> trajectories,
                             const PipelineConfig& config);

struct PipelineResult {
  std::vector<Trajectory> trajectories;
  LabeledDataset dataset;
  TrainResult trained;
  std::vector<MatchReport> reports;  // trained policy vs eval_opponents
};

PipelineResult run_pipeline(const Policy& base, const PipelineConfig& config);

/// Share of the learner's games won (ties count half) in a trajectory set.
double interaction_win_rate(std::span<const Trajectory> trajectories);

struct SweepRow {
  std::string rung;
  double interaction_win_rate = 0.0;
  std::size_t n_desirable = 0;
  std::size_t n_undesirable = 0;
  double trained_win_rate = 0.0;  // pooled over the eval opponents
};

/// Runs the pipeline once per ladder rung, each time from `base` with the rung
/// as agent 2.
std::vector<SweepRow> opponent_sweep(const Policy& base, const std::vector<AgentSpec>& ladder,
                                     const PipelineConfig& config);

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

struct IterationRound {
  int round = 0;
  Policy policy;  // checkpoint after this round's training
  std::size_t n_desirable = 0;
  std::size_t n_undesirable = 0;
  double eval_win_rate = 0.0;
  std::vector<MatchReport> reports;
};

/// Round 1 is self-play; round k >= 2 plays the current checkpoint against the
/// previous one. Each round trains from the current checkpoint. Round 1 uses
/// the configured seeds unchanged, later rounds derive theirs from the round
/// number.
std::vector<IterationRound> iterate(const Policy& base, int rounds, const PipelineConfig& config);

// ---------------------------------------------------------------------------
// Exact-solver regret.

struct RegretReport {
  GameId game = GameId::TicTacToe;
  double mean_regret = 0.0;
  std::size_t moves = 0;
  int episodes = 0;
};

/// Per move (V*(s) - Q*(s, a)) / 2 with minimax values in {-1, 0, 1}, averaged
/// over the agent's moves in seat-alternated games against `opponent`.
/// Throws std::invalid_argument for games other than Nim and Tic-Tac-Toe.
RegretReport regret(const Agent& agent, const Agent& opponent, GameId game,
                    const EvalConfig& config);

void write_regret_csv(const std::filesystem::path& path, std::span<const RegretReport> reports,
                      std::span<const std::string> labels);

}  // namespace scopal
