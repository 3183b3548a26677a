#pragma once

// Strategy refinement: losses over a frozen reference policy, dataset
// resampling, and the trainer that chains them.
//
// All losses are evaluated at temperature 1 and return the exact gradient with
// respect to the full parameter vector. Optimization is plain gradient descent
// with gradient accumulation; every shuffle is seeded.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scopal/features.hpp"
#include "scopal/policy.hpp"
#include "scopal/rewards.hpp"

namespace scopal {

/// A labeled decision with its feature rows precomputed.
struct TrainingExample {
  std::string state_key;
  Decision decision;
  std::size_t index = 0;  // chosen action within decision.actions
  Label label = Label::Desirable;
  Player actor = Player::P1;
  double reward = 0.0;  // SPAG advantage

  Action action() const { return decision.actions[index]; }
};

TrainingExample make_example(const LabeledStep& step);
std::vector<TrainingExample> make_examples(std::span<const LabeledStep> steps);

struct LossReport {
  double loss = 0.0;
  std::vector<double> grad;
  std::size_t n_desirable = 0;
  std::size_t n_undesirable = 0;
  double z0 = 0.0;
};

/// Mean negative log-likelihood. Throws std::invalid_argument on an empty
/// batch or an undesirable example.
LossReport bc_loss(const Policy& policy, std::span<const TrainingExample> batch);

struct Lambdas {
  double desirable = 1.0;
  double undesirable = 1.0;
};

/// lambda_D * n_D = lambda_U * n_U with the larger weight equal to 1. A class
/// with no examples keeps weight 1.
Lambdas balance_lambdas(std::size_t n_desirable, std::size_t n_undesirable);

enum class KlEstimate {
  ShiftedPairs,  // batch mean of r_theta over (x_i, y_{i+1}) pairs
  Exact,         // batch mean of KL[pi_theta(.|x_i) || pi_ref(.|x_i)]
};

struct KtoOptions {
  double beta = 0.1;
  Lambdas lambdas;
  KlEstimate kl = KlEstimate::ShiftedPairs;
  /// Use this reference point instead of estimating one (still detached).
  std::optional<double> z0;
};

/// Shifted-pair estimate: pairs whose borrowed action is illegal in x_i (or
/// that cross games) are skipped; zero when nothing is left. Clamped at 0.
double estimate_z0(const Policy& policy, const Policy& reference,
                   std::span<const TrainingExample> batch, KlEstimate kl);

/// Throws std::invalid_argument on an empty batch and std::domain_error if
/// the reference assigns zero probability to a batch action.
LossReport kto_loss(const Policy& policy, const Policy& reference,
                    std::span<const TrainingExample> batch, const KtoOptions& options);

struct PreferencePair {
  const TrainingExample* chosen = nullptr;
  const TrainingExample* rejected = nullptr;
};

/// Cross-pairs desirable and undesirable actions sharing a state key, at
/// most `cap` pairs per state, in (state key, action) order.
std::vector<PreferencePair> make_preference_pairs(std::span<const TrainingExample> examples,
                                                  int cap = 4);

/// Throws std::invalid_argument when there are no pairs.
LossReport dpo_loss(const Policy& policy, const Policy& reference,
                    std::span<const PreferencePair> pairs, double beta = 0.1);

/// Per-step rewards of one trajectory. Rounds T = ceil(plies / 2); the step at
/// ply k belongs to round t = k / 2 + 1. The winner's steps get
/// (1 - g) g^(T - t) / (1 - g^(T + 1)), the loser's the negation, ties zero.
std::vector<double> spag_assign_rewards(const Trajectory& trajectory, double gamma = 0.8);

/// Learner steps of every trajectory with SPAG rewards attached.
std::vector<TrainingExample> spag_examples(std::span<const Trajectory> trajectories,
                                           double gamma = 0.8,
                                           StepFilter filter = StepFilter::Learner);

/// -mean_i [ pi(a_i|s_i) / pi_ref(a_i|s_i) * A_i - beta2 * KL(pi(.|s_i) || pi_ref(.|s_i)) ]
/// pooled over both seats' steps.
LossReport spag_loss(const Policy& policy, const Policy& behavior,
                     std::span<const TrainingExample> steps, double beta2 = 0.2);

/// All actions the actor took in trajectories it won.
std::vector<TrainingExample> winning_trajectory_examples(std::span<const Trajectory> trajectories,
                                                         StepFilter filter = StepFilter::Learner);

// ---------------------------------------------------------------------------
// Dataset resampling.

/// Equalizes per-game counts to total / games (the first games in GameId
/// order take the remainder) by seeded down- and upsampling. Total preserved.
LabeledDataset balance_by_game(const LabeledDataset& data, std::uint64_t seed);

struct ScaleTarget {
  enum class Mode {
    KeepRatio,  // grow to `total`, preserving the desirable fraction
    Exact,      // grow each class to its own target
  };
  Mode mode = Mode::KeepRatio;
  std::size_t total = 0;
  std::size_t desirable = 0;
  std::size_t undesirable = 0;
};

/// Class counts after scaling (KeepRatio rounds the desirable share).
std::pair<std::size_t, std::size_t> scaled_counts(std::size_t n_desirable,
                                                  std::size_t n_undesirable,
                                                  const ScaleTarget& target);

/// Upsamples with replacement. Throws std::invalid_argument when a target is
/// below the current count.
LabeledDataset scale_dataset(const LabeledDataset& data, const ScaleTarget& target,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Trainer.

enum class TrainMode {
  TwoStage,      // BC on desirable steps, then KTO against the post-BC snapshot
  DirectKto,     // KTO against the initial policy
  JointLoss,     // BC + KTO summed, reference = initial policy
  BcOnly,        // stage A alone
  BcThenDpo,     // BC, then DPO against the post-BC snapshot
  TrajectoryBc,  // BC on every action of won trajectories
  Spag,          // SPAG objective, behavior policy = initial policy
};

std::string_view train_mode_name(TrainMode mode);
TrainMode parse_train_mode(std::string_view name);

struct TrainConfig {
  TrainMode mode = TrainMode::TwoStage;
  double learning_rate = 1e-2;
  int bc_epochs = 5;
  int bc_batch_size = 2;
  int bc_grad_accum = 1;
  int epochs = 5;  // preference stage
  int batch_size = 2;
  int grad_accum = 8;
  double beta = 0.1;
  KlEstimate kl = KlEstimate::ShiftedPairs;
  /// <= 0: balance from the dataset's class counts.
  double lambda_desirable = 0.0;
  double lambda_undesirable = 0.0;
  int dpo_pair_cap = 4;
  double spag_beta2 = 0.2;
  double spag_gamma = 0.8;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct EpochMetrics {
  std::string stage;  // "bc", "kto", "joint", "dpo", "spag"
  int epoch = 0;
  double loss = 0.0;
  std::size_t n_desirable = 0;
  std::size_t n_undesirable = 0;
  double lambda_desirable = 0.0;
  double lambda_undesirable = 0.0;
  double z0 = 0.0;  // mean over the epoch's batches
};

struct TrainResult {
  Policy policy;
  std::vector<EpochMetrics> metrics;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainingData {
  std::span<const LabeledStep> labeled;
  std::span<const Trajectory> trajectories;  // TrajectoryBc and Spag only
};

/// Returns the trained copy with version bumped by one. Throws
/// TrainingDiverged if a loss turns non-finite.
TrainResult train(const Policy& initial, const TrainingData& data, const TrainConfig& config);

void write_metrics_csv(const std::filesystem::path& path, std::span<const EpochMetrics> metrics);

}  // namespace scopal
