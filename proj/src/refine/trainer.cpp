#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "scopal/random.hpp"
#include "scopal/refine.hpp"

namespace scopal {

std::string_view train_mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::TwoStage: return "two_stage";
    case TrainMode::DirectKto: return "direct_kto";
    case TrainMode::JointLoss: return "joint";
    case TrainMode::BcOnly: return "bc";
    case TrainMode::BcThenDpo: return "bc_dpo";
    case TrainMode::TrajectoryBc: return "trajectory_bc";
    case TrainMode::Spag: return "spag";
  }
  return "?";
}

TrainMode parse_train_mode(std::string_view name) {
  for (auto m : {TrainMode::TwoStage, TrainMode::DirectKto, TrainMode::JointLoss, TrainMode::BcOnly,
                 TrainMode::BcThenDpo, TrainMode::TrajectoryBc, TrainMode::Spag})
    if (train_mode_name(m) == name) return m;
  throw std::invalid_argument(fmt::format(
      "unknown training mode '{}' (expected two_stage, direct_kto, joint, bc, bc_dpo, "
      "trajectory_bc or spag)",
      name));
}

void TrainConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(fmt::format("{} must be positive, got {}", name, v));
  };
  positive(learning_rate, "learning_rate");
  positive(beta, "beta");
  for (auto [v, name] : {std::pair{bc_epochs, "bc_epochs"}, {bc_batch_size, "bc_batch_size"},
                         {bc_grad_accum, "bc_grad_accum"}, {epochs, "epochs"},
                         {batch_size, "batch_size"}, {grad_accum, "grad_accum"},
                         {dpo_pair_cap, "dpo_pair_cap"}})
    if (v < 1) throw std::invalid_argument(fmt::format("{} must be at least 1, got {}", name, v));
  if (!(spag_beta2 >= 0.0)) throw std::invalid_argument("spag_beta2 must be non-negative");
  if (!(spag_gamma > 0.0 && spag_gamma < 1.0))
    throw std::invalid_argument("spag_gamma must lie in (0, 1)");
}

namespace {

struct StageSpec {
  std::string name;
  int epochs;
  int batch_size;
  int grad_accum;
};

// Seeded mini-batch gradient descent. `loss` maps a list of item indices to a
// report; gradients of `grad_accum` consecutive batches are averaged before a
// step.
void run_stage(Policy& policy, std::size_t n_items, const StageSpec& stage,
               const TrainConfig& config, EpochMetrics base,
               const std::function<LossReport(std::span<const std::size_t>)>& loss,
               std::vector<EpochMetrics>& metrics) {
  if (n_items == 0) return;
  std::vector<double> acc(policy.dimension(), 0.0);
  const auto bs = static_cast<std::size_t>(stage.batch_size);
  for (int epoch = 1; epoch <= stage.epochs; ++epoch) {
    std::vector<std::size_t> order(n_items);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed({config.seed, fnv1a(stage.name), static_cast<std::uint64_t>(epoch)}));
    stable_shuffle(rng, order);

    double loss_sum = 0.0, z0_sum = 0.0;
    std::size_t batches = 0;
    int pending = 0;
    auto step = [&] {
      const double scale = config.learning_rate / pending;
      auto theta = policy.theta();
      for (std::size_t k = 0; k < acc.size(); ++k) {
        theta[k] -= scale * acc[k];
        acc[k] = 0.0;
      }
      pending = 0;
    };
    for (std::size_t start = 0; start < n_items; start += bs) {
      const auto len = std::min(bs, n_items - start);
      const auto report = loss(std::span(order).subspan(start, len));
      if (!std::isfinite(report.loss))
        throw TrainingDiverged(
            fmt::format("{} loss became non-finite in epoch {}", stage.name, epoch));
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += report.grad[k];
      loss_sum += report.loss;
      z0_sum += report.z0;
      ++batches;
      if (++pending == stage.grad_accum) step();
    }
    if (pending > 0) step();
    for (double v : policy.theta())
      if (!std::isfinite(v))
        throw TrainingDiverged(fmt::format("{} parameters became non-finite", stage.name));

    EpochMetrics m = base;
    m.stage = stage.name;
    m.epoch = epoch;
    m.loss = loss_sum / static_cast<double>(batches);
    m.z0 = z0_sum / static_cast<double>(batches);
    metrics.push_back(m);
  }
}

template <typename T>
std::vector<T> gather(const std::vector<T>& items, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

// Copies of examples are cheap enough at batch sizes of a few items; pointers
// would tie the batch to the pool's lifetime for no gain.
std::vector<TrainingExample> gather_examples(const std::vector<TrainingExample>& pool,
                                             std::span<const std::size_t> idx) {
  return gather(pool, idx);
}

}  // namespace

TrainResult train(const Policy& initial, const TrainingData& data, const TrainConfig& config) {
  config.validate();
  TrainResult result{initial, {}};
  Policy& policy = result.policy;

  const bool from_trajectories =
      config.mode == TrainMode::TrajectoryBc || config.mode == TrainMode::Spag;
  std::vector<TrainingExample> examples;
  if (from_trajectories) {
    if (data.trajectories.empty())
      throw std::invalid_argument(
          fmt::format("{} training needs trajectories", train_mode_name(config.mode)));
    examples = config.mode == TrainMode::Spag
                   ? spag_examples(data.trajectories, config.spag_gamma)
                   : winning_trajectory_examples(data.trajectories);
  } else {
    if (data.labeled.empty()) throw std::invalid_argument("training needs a non-empty dataset");
    examples = make_examples(data.labeled);
  }

  std::vector<TrainingExample> desirable;
  for (const auto& ex : examples)
    if (ex.label == Label::Desirable) desirable.push_back(ex);
  const std::size_t n_d = desirable.size();
  const std::size_t n_u = examples.size() - n_d;
  Lambdas lambdas = balance_lambdas(n_d, n_u);
  if (config.lambda_desirable > 0) lambdas.desirable = config.lambda_desirable;
  if (config.lambda_undesirable > 0) lambdas.undesirable = config.lambda_undesirable;

  EpochMetrics base;
  base.n_desirable = n_d;
  base.n_undesirable = n_u;
  base.lambda_desirable = lambdas.desirable;
  base.lambda_undesirable = lambdas.undesirable;

  const StageSpec bc_stage{"bc", config.bc_epochs, config.bc_batch_size, config.bc_grad_accum};
  auto run_bc = [&](const std::vector<TrainingExample>& pool) {
    run_stage(policy, pool.size(), bc_stage, config, base,
              [&](std::span<const std::size_t> idx) {
                return bc_loss(policy, gather_examples(pool, idx));
              },
              result.metrics);
  };
  KtoOptions kto{config.beta, lambdas, config.kl, std::nullopt};
  auto run_kto = [&](const Policy& reference) {
    run_stage(policy, examples.size(), {"kto", config.epochs, config.batch_size, config.grad_accum},
              config, base,
              [&](std::span<const std::size_t> idx) {
                return kto_loss(policy, reference, gather_examples(examples, idx), kto);
              },
              result.metrics);
  };

  switch (config.mode) {
    case TrainMode::TwoStage: {
      run_bc(desirable);
      const Policy reference = policy;
      run_kto(reference);
      break;
    }
    case TrainMode::DirectKto: {
      run_kto(initial);
      break;
    }
    case TrainMode::JointLoss: {
      run_stage(policy, examples.size(),
                {"joint", config.epochs, config.batch_size, config.grad_accum}, config, base,
                [&](std::span<const std::size_t> idx) {
                  const auto batch = gather_examples(examples, idx);
                  auto report = kto_loss(policy, initial, batch, kto);
                  std::vector<TrainingExample> good;
                  for (const auto& ex : batch)
                    if (ex.label == Label::Desirable) good.push_back(ex);
                  if (!good.empty()) {
                    const auto bc = bc_loss(policy, good);
                    report.loss += bc.loss;
                    for (std::size_t k = 0; k < report.grad.size(); ++k) report.grad[k] += bc.grad[k];
                  }
                  return report;
                },
                result.metrics);
      break;
    }
    case TrainMode::BcOnly:
    case TrainMode::TrajectoryBc: run_bc(desirable); break;
    case TrainMode::BcThenDpo: {
      run_bc(desirable);
      const Policy reference = policy;
      const auto pairs = make_preference_pairs(examples, config.dpo_pair_cap);
      run_stage(policy, pairs.size(), {"dpo", config.epochs, config.batch_size, config.grad_accum},
                config, base,
                [&](std::span<const std::size_t> idx) {
                  return dpo_loss(policy, reference, gather(pairs, idx), config.beta);
                },
                result.metrics);
      break;
    }
    case TrainMode::Spag: {
      run_stage(policy, examples.size(),
                {"spag", config.epochs, config.batch_size, config.grad_accum}, config, base,
                [&](std::span<const std::size_t> idx) {
                  return spag_loss(policy, initial, gather_examples(examples, idx),
                                   config.spag_beta2);
                },
                result.metrics);
      break;
    }
  }
  policy.set_version(initial.version() + 1);
  return result;
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const EpochMetrics> metrics) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << "stage,epoch,loss,n_D,n_U,lambda_D,lambda_U,z0\n";
  for (const auto& m : metrics)
    out << fmt::format("{},{},{},{},{},{},{},{}\n", m.stage, m.epoch, m.loss, m.n_desirable,
                       m.n_undesirable, m.lambda_desirable, m.lambda_undesirable, m.z0);
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

}  // namespace scopal
