#pragma once

// Episode runner and trajectory store.
//
// An episode pits agent 1 (the learner) against agent 2. Seats alternate by
// episode index: agent 1 is P1 in even episodes and P2 in odd ones. Every
// seed is derived from (master seed, game, episode index), so a trajectory
// set is a pure function of its configuration.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "scopal/game.hpp"
#include "scopal/policy.hpp"

namespace scopal {

/// "random", "mcts:<n>", "policy:<checkpoint path>", or "self" (the learner
/// policy handed to the runner).
struct AgentSpec {
  enum class Kind { Random, Mcts, Policy, Self };
  Kind kind = Kind::Random;
  int simulations = 0;
  std::string path;

  static AgentSpec parse(std::string_view text);
  std::string label() const;
  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

struct Agent {
  std::string label;
  /// Must be deterministic in (state, seed).
  std::function<Action(const GameState&, std::uint64_t seed)> act;
};

Agent random_agent();
Agent mcts_agent(int simulations, double exploration_c = 2.0, int rollout_count = 1);
Agent policy_agent(std::shared_ptr<const Policy> policy, double temperature, std::string label);

/// Knobs shared by every agent resolved for one run.
struct AgentContext {
  std::shared_ptr<const Policy> learner;  // needed for "self"
  double temperature = 0.7;
  double exploration_c = 2.0;
  int rollout_count = 1;
};

/// Loads checkpoints for "policy:" specs. Throws std::invalid_argument when
/// "self" is requested without a learner policy.
Agent make_agent(const AgentSpec& spec, const AgentContext& context);

struct Step {
  std::string key;  // canonical_key of (state, action)
  Player actor = Player::P1;
  Action action;
  std::string notation;
  int move_index = 0;
  friend bool operator==(const Step&, const Step&) = default;
};

struct Trajectory {
  GameId game = GameId::TicTacToe;
  GameOptions options;
  std::uint64_t episode = 0;
  std::uint64_t chance_seed = 0;
  std::uint64_t sampling_seed = 0;
  std::string p1_agent;
  std::string p2_agent;
  /// Seats whose steps are training data (agent 1's seat; both under self-play).
  std::vector<Player> learner_seats;
  std::vector<Step> steps;
  Outcome outcome;
  bool truncated = false;  // hit the ply bound

  const std::string& first_player_agent() const { return p1_agent; }
  bool is_learner(Player p) const;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct EpisodeSeeds {
  std::uint64_t chance = 0;
  std::uint64_t sampling = 0;
};

EpisodeSeeds episode_seeds(std::uint64_t master_seed, GameId game, std::uint64_t episode);

/// Per-ply seed handed to the acting agent.
std::uint64_t ply_seed(std::uint64_t sampling_seed, int move_index);

/// agent1 sits at P1 when agent1_first, otherwise at P2. If both agents are
/// the learner (self-play), both seats are learner seats.
Trajectory run_episode(const Agent& agent1, const Agent& agent2, GameId game,
                       const EpisodeSeeds& seeds, bool agent1_first,
                       bool self_play = false, const GameOptions& options = {});

struct InteractionConfig {
  std::vector<GameId> games;
  AgentSpec agent1;
  AgentSpec agent2;
  int episodes = 1000;
  double temperature = 0.7;
  std::uint64_t master_seed = 0;
  double exploration_c = 2.0;
  int rollout_count = 1;
  GameOptions options;
  int jobs = 0;  // <= 0: hardware concurrency
};

/// Runs `episodes` per game. Output is sorted by (game order in config,
/// episode index) regardless of how many workers ran.
std::vector<Trajectory> collect_trajectories(const InteractionConfig& config,
                                             std::shared_ptr<const Policy> learner = nullptr);

/// Same schedule with already-resolved agents; the specs in `config` are
/// ignored.
std::vector<Trajectory> collect_trajectories(const InteractionConfig& config, const Agent& agent1,
                                             const Agent& agent2, bool self_play);

// ---------------------------------------------------------------------------
// JSON-lines store: one trajectory per line, actions in textual notation.

std::string trajectory_to_json(const Trajectory& t);
/// Replays the record, so keys and outcome are checked against the rules.
/// Throws std::runtime_error on a corrupt record.
Trajectory trajectory_from_json(std::string_view line);

void append_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& ts);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);

}  // namespace scopal
