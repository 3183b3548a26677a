#pragma once

// Experiment configuration: one INI file with a fixed schema.
//
// Precedence, lowest first: built-in defaults, the config file, SCOPAL_*
// environment variables (SCOPAL_<SECTION>_<KEY>, upper case), then command
// line flags. Unknown sections, keys and SCOPAL_ variables are errors.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scopal/eval.hpp"

namespace scopal {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // [run]
  std::uint64_t seed = 0;
  int jobs = 0;  // not part of the run identity
  std::string out = "runs";
  std::string init_policy;  // checkpoint path; empty means theta = 0

  // [interaction]
  std::vector<GameId> games{GameId::TicTacToe};
  std::string opponent = "self";
  int episodes = 1000;
  double interact_temperature = 0.7;
  double exploration_c = 2.0;
  int rollout_count = 1;
  GameOptions options;

  // [estimate]
  RewardMethod method;
  double delta = 0.5;
  std::int64_t min_count = 1;
  StepFilter filter = StepFilter::Learner;
  bool balance_games = false;
  std::string scale_mode = "none";  // none, keep_ratio, exact
  std::uint64_t scale_total = 0;
  std::uint64_t scale_desirable = 0;
  std::uint64_t scale_undesirable = 0;

  // [train]
  TrainConfig train;

  // [eval]
  std::vector<GameId> eval_games;  // empty: the interaction games
  // mcts:100 and mcts:500 stand in for the two language-model opponents.
  std::vector<std::string> eval_opponents{"random", "mcts:1000", "mcts:100", "mcts:500"};
  int eval_episodes = 100;
  double eval_temperature = 0.2;

  // [sweep]
  std::vector<std::string> ladder{"random",  "self",    "mcts:5",   "mcts:10",
                                  "mcts:100", "mcts:200", "mcts:500", "mcts:1000"};
  // [iterate]
  int rounds = 3;
  // [head2head]
  std::vector<std::string> h2h_agents{"self", "random"};
  // [regret]
  std::vector<GameId> regret_games{GameId::Nim, GameId::TicTacToe};
  std::string regret_opponent = "mcts:1000";
  int regret_episodes = 100;

  /// Checks ranges and agent specs; throws ConfigError.
  void validate() const;

  /// Seeds derived from `seed`, one per pipeline stage.
  std::uint64_t interaction_seed() const;
  std::uint64_t train_seed() const;
  std::uint64_t eval_seed() const;
  std::uint64_t resample_seed() const;

  InteractionConfig interaction_config() const;
  LabelingConfig labeling_config() const;
  TrainConfig train_config() const;
  EvalConfig eval_config() const;
  PipelineConfig pipeline_config() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

/// Full effective config as INI text, every key present, fixed order.
std::string to_ini(const ExperimentConfig& config);

/// Applies INI text on top of `base`. Throws ConfigError.
ExperimentConfig apply_ini(ExperimentConfig base, const std::string& text);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Applies every SCOPAL_* entry of `env`. Throws ConfigError.
ExperimentConfig apply_env(ExperimentConfig base, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> scopal_environment();

/// Identity of a run: everything in to_ini except jobs and out.
std::uint64_t config_hash(const ExperimentConfig& config);

struct ConfigKey {
  std::string section;
  std::string key;
  std::string doc;
};
/// The published schema, in file order.
std::vector<ConfigKey> config_schema();

}  // namespace scopal
