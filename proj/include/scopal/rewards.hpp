#pragma once

// Step-wise Monte Carlo reward estimation and threshold labeling.
//
// Every learner step of every trajectory is counted under the outcome of the
// player who took it, keyed by canonical_key. Estimators turn the counts (or,
// for the discounted return, the raw trajectories) into one reward per key.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scopal/interaction.hpp"

namespace scopal {

struct StepStats {
  std::int64_t n_all = 0;
  std::int64_t n_win = 0;
  std::int64_t n_tie = 0;
  std::int64_t n_lose = 0;

  void add(Result r);
  StepStats& operator+=(const StepStats& o);
  friend bool operator==(const StepStats&, const StepStats&) = default;
};

using StatsMap = std::map<std::string, StepStats>;
using RewardMap = std::map<std::string, double>;

enum class StepFilter {
  Learner,  // only steps taken from a learner seat
  All,
};

/// Map-then-merge over `jobs` workers; the result does not depend on jobs.
StatsMap accumulate_stats(std::span<const Trajectory> trajectories,
                          StepFilter filter = StepFilter::Learner, int jobs = 1);
void merge_stats(StatsMap& into, const StatsMap& from);

struct RewardMethod {
  enum class Kind { WinRate, Discounted, Beta };
  Kind kind = Kind::WinRate;
  double tie_weight = 0.0;  // WinRate: credit for a tie
  double gamma = 0.8;       // Discounted
  double alpha0 = 1.0;      // Beta prior
  double beta0 = 1.0;

  /// "winrate", "discounted" or "beta".
  static Kind parse_kind(std::string_view name);
  static std::string_view kind_name(Kind kind);
  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// WinRate: (n_win + tie_weight * n_tie) / n_all.
/// Beta: (alpha0 + n_win) / (alpha0 + beta0 + n_win + n_lose).
/// Discounted needs per-occurrence timing and throws std::invalid_argument
/// here; use the trajectory overload.
RewardMap estimate_rewards(const StatsMap& stats, const RewardMethod& method);

/// All methods. Discounted: mean over occurrences of gamma^(T - t) * R_T,
/// where T is the trajectory's ply count, t the 1-based ply of the step and
/// R_T is +1 / -1 / 0 for the actor's win / loss / tie.
RewardMap estimate_rewards(std::span<const Trajectory> trajectories, const RewardMethod& method,
                           StepFilter filter = StepFilter::Learner);

enum class Label { Desirable, Undesirable };
std::string_view label_name(Label label);

/// Strict threshold: Desirable iff reward > delta.
inline Label label_for(double reward, double delta) {
  return reward > delta ? Label::Desirable : Label::Undesirable;
}

struct LabeledStep {
  GameId game = GameId::TicTacToe;
  GameOptions options;  // meaningful for Breakthrough only
  std::string key;
  std::string state_key;
  std::string action;  // notation
  double reward = 0.0;
  Label label = Label::Undesirable;
  StepStats counts;
  // One representative occurrence: replaying `history` from the seeded
  // initial state reaches a state with this state_key.
  std::uint64_t chance_seed = 0;
  std::vector<std::string> history;

  GameState state() const;
  Action action_code(const GameState& s) const { return action_from_string(s, action); }
  friend bool operator==(const LabeledStep&, const LabeledStep&) = default;
};

struct LabeledDataset {
  std::vector<LabeledStep> steps;  // sorted by (game, key)
  std::size_t n_desirable = 0;
  std::size_t n_undesirable = 0;
};

struct LabelingConfig {
  RewardMethod method;
  double delta = 0.5;
  std::int64_t min_count = 1;
  StepFilter filter = StepFilter::Learner;
  int jobs = 1;
};

/// Counts, estimates, filters by min_count and labels. Representatives are
/// the first occurrence in trajectory order.
LabeledDataset label_steps(std::span<const Trajectory> trajectories, const LabelingConfig& config);

/// Lower-level form: label every key of `rewards` that has stats. Each key
/// needs a representative, taken from `trajectories`.
LabeledDataset label_steps(const RewardMap& rewards, double delta, const StatsMap& stats,
                           std::span<const Trajectory> trajectories,
                           StepFilter filter = StepFilter::Learner, std::int64_t min_count = 1);

std::string labeled_step_to_json(const LabeledStep& step);
LabeledStep labeled_step_from_json(std::string_view line);
void write_labeled(const std::filesystem::path& path, const LabeledDataset& data);
LabeledDataset read_labeled(const std::filesystem::path& path);

}  // namespace scopal
