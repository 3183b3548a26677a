#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "scopal/refine.hpp"

namespace scopal {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

std::vector<double> log_softmax(const Policy& policy, const Decision& d) {
  std::vector<double> z(d.size());
  double max_z = -INFINITY;
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = policy.logit(d, i);
    max_z = std::max(max_z, z[i]);
  }
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - max_z);
  const double lse = max_z + std::log(sum);
  for (auto& v : z) v -= lse;
  return z;
}

double reference_log_prob(const Policy& reference, const Decision& d, std::size_t index) {
  const double lq = log_softmax(reference, d)[index];
  if (!std::isfinite(lq))
    throw std::domain_error(fmt::format("reference policy gives zero probability to action {}",
                                        d.actions[index].code));
  return lq;
}

// scale * dKL[p || q] / dtheta, where both are softmaxes over d's rows.
// dKL/dz_j = p_j (log p_j - log q_j - KL).
double add_kl_grad(const Policy& policy, const Decision& d, const std::vector<double>& lp,
                   const std::vector<double>& lq, double scale, std::span<double> grad) {
  double kl = 0.0;
  for (std::size_t j = 0; j < lp.size(); ++j) kl += std::exp(lp[j]) * (lp[j] - lq[j]);
  const auto block = grad.subspan(policy.block_offset(d.game), static_cast<std::size_t>(d.dim));
  for (std::size_t j = 0; j < lp.size(); ++j) {
    const double c = scale * std::exp(lp[j]) * (lp[j] - lq[j] - kl);
    if (c != 0.0) d.add_row(j, c, block);
  }
  return kl;
}

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw std::invalid_argument(fmt::format("{}: empty batch", what));
}

}  // namespace

TrainingExample make_example(const LabeledStep& step) {
  const auto state = step.state();
  TrainingExample ex;
  ex.state_key = step.state_key;
  ex.decision = make_decision(state);
  ex.index = *ex.decision.index_of(step.action_code(state));
  ex.label = step.label;
  ex.actor = state.to_move();
  ex.reward = step.reward;
  return ex;
}

std::vector<TrainingExample> make_examples(std::span<const LabeledStep> steps) {
  std::vector<TrainingExample> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(make_example(s));
  return out;
}

LossReport bc_loss(const Policy& policy, std::span<const TrainingExample> batch) {
  require_nonempty(batch.size(), "bc_loss");
  LossReport r;
  r.grad.assign(policy.dimension(), 0.0);
  const double w = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    if (ex.label != Label::Desirable)
      throw std::invalid_argument("bc_loss only takes desirable examples");
    r.loss -= w * accumulate_log_prob_grad(policy, ex.decision, ex.index, 1.0, -w, r.grad);
  }
  r.n_desirable = batch.size();
  return r;
}

Lambdas balance_lambdas(std::size_t n_desirable, std::size_t n_undesirable) {
  Lambdas l;
  if (n_desirable == 0 || n_undesirable == 0) return l;
  if (n_desirable >= n_undesirable)
    l.desirable = static_cast<double>(n_undesirable) / static_cast<double>(n_desirable);
  else
    l.undesirable = static_cast<double>(n_desirable) / static_cast<double>(n_undesirable);
  return l;
}

double estimate_z0(const Policy& policy, const Policy& reference,
                   std::span<const TrainingExample> batch, KlEstimate kl) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& x = batch[i].decision;
    if (kl == KlEstimate::Exact) {
      const auto lp = log_softmax(policy, x);
      const auto lq = log_softmax(reference, x);
      for (std::size_t j = 0; j < lp.size(); ++j) sum += std::exp(lp[j]) * (lp[j] - lq[j]);
      ++n;
      continue;
    }
    const std::size_t k = (i + 1) % batch.size();
    if (k == i) continue;
    const auto& y = batch[k];
    if (y.decision.game != x.game || y.decision.dim != x.dim) continue;
    const auto idx = x.index_of(y.action());
    if (!idx) continue;
    sum += log_softmax(policy, x)[*idx] - reference_log_prob(reference, x, *idx);
    ++n;
  }
  if (n == 0) return 0.0;
  return std::max(0.0, sum / static_cast<double>(n));
}

LossReport kto_loss(const Policy& policy, const Policy& reference,
                    std::span<const TrainingExample> batch, const KtoOptions& options) {
  require_nonempty(batch.size(), "kto_loss");
  if (!(options.beta > 0.0)) throw std::invalid_argument("KTO beta must be positive");
  LossReport r;
  r.grad.assign(policy.dimension(), 0.0);
  r.z0 = options.z0 ? std::max(0.0, *options.z0)
                    : estimate_z0(policy, reference, batch, options.kl);
  const double w = 1.0 / static_cast<double>(batch.size());
  const double beta = options.beta;
  for (const auto& ex : batch) {
    const double lq = reference_log_prob(reference, ex.decision, ex.index);
    const double lp = log_softmax(policy, ex.decision)[ex.index];
    const double rt = lp - lq;
    if (ex.label == Label::Desirable) {
      const double lam = options.lambdas.desirable;
      const double s = sigmoid(beta * (rt - r.z0));
      r.loss += w * (lam - lam * s);
      accumulate_log_prob_grad(policy, ex.decision, ex.index, 1.0, -w * lam * s * (1 - s) * beta,
                               r.grad);
      ++r.n_desirable;
    } else {
      const double lam = options.lambdas.undesirable;
      const double s = sigmoid(beta * (r.z0 - rt));
      r.loss += w * (lam - lam * s);
      accumulate_log_prob_grad(policy, ex.decision, ex.index, 1.0, w * lam * s * (1 - s) * beta,
                               r.grad);
      ++r.n_undesirable;
    }
  }
  return r;
}

std::vector<PreferencePair> make_preference_pairs(std::span<const TrainingExample> examples,
                                                  int cap) {
  std::map<std::string, std::pair<std::vector<const TrainingExample*>,
                                  std::vector<const TrainingExample*>>>
      groups;
  for (const auto& ex : examples) {
    auto& g = groups[ex.state_key];
    (ex.label == Label::Desirable ? g.first : g.second).push_back(&ex);
  }
  auto by_action = [](const TrainingExample* a, const TrainingExample* b) {
    return a->action() < b->action();
  };
  std::vector<PreferencePair> pairs;
  for (auto& [key, g] : groups) {
    std::stable_sort(g.first.begin(), g.first.end(), by_action);
    std::stable_sort(g.second.begin(), g.second.end(), by_action);
    int made = 0;
    for (auto* d : g.first)
      for (auto* u : g.second)
        if (made < cap) {
          pairs.push_back({d, u});
          ++made;
        }
  }
  return pairs;
}

LossReport dpo_loss(const Policy& policy, const Policy& reference,
                    std::span<const PreferencePair> pairs, double beta) {
  if (pairs.empty()) throw std::invalid_argument("dpo_loss: no preference pairs");
  if (!(beta > 0.0)) throw std::invalid_argument("DPO beta must be positive");
  LossReport r;
  r.grad.assign(policy.dimension(), 0.0);
  const double w = 1.0 / static_cast<double>(pairs.size());
  for (const auto& p : pairs) {
    const auto& c = *p.chosen;
    const auto& u = *p.rejected;
    const double rc =
        log_softmax(policy, c.decision)[c.index] - reference_log_prob(reference, c.decision, c.index);
    const double ru =
        log_softmax(policy, u.decision)[u.index] - reference_log_prob(reference, u.decision, u.index);
    const double m = beta * (rc - ru);
    r.loss += w * softplus(-m);
    const double g = -w * (1.0 - sigmoid(m)) * beta;
    accumulate_log_prob_grad(policy, c.decision, c.index, 1.0, g, r.grad);
    accumulate_log_prob_grad(policy, u.decision, u.index, 1.0, -g, r.grad);
    ++r.n_desirable;
    ++r.n_undesirable;
  }
  return r;
}

std::vector<double> spag_assign_rewards(const Trajectory& t, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  std::vector<double> out(t.steps.size(), 0.0);
  if (t.outcome == Outcome::tie()) return out;
  const int rounds = static_cast<int>((t.steps.size() + 1) / 2);
  const double norm = (1.0 - gamma) / (1.0 - std::pow(gamma, rounds + 1));
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& s = t.steps[k];
    const int round = s.move_index / 2 + 1;
    const double mag = norm * std::pow(gamma, rounds - round);
    out[k] = t.outcome.of(s.actor) == Result::Win ? mag : -mag;
  }
  return out;
}

namespace {

template <typename Keep>
std::vector<TrainingExample> replay_examples(std::span<const Trajectory> trajectories,
                                             StepFilter filter, Keep keep) {
  std::vector<TrainingExample> out;
  for (const auto& t : trajectories) {
    const auto rewards = keep.rewards(t);
    auto state = new_game(t.game, t.chance_seed, t.options);
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      const auto& s = t.steps[k];
      if ((filter == StepFilter::All || t.is_learner(s.actor)) && keep(t, s)) {
        TrainingExample ex;
        ex.state_key = state_key(state);
        ex.decision = make_decision(state);
        ex.index = *ex.decision.index_of(s.action);
        ex.actor = s.actor;
        ex.reward = rewards.empty() ? 0.0 : rewards[k];
        ex.label = ex.reward > 0.0 || rewards.empty() ? Label::Desirable : Label::Undesirable;
        out.push_back(std::move(ex));
      }
      state = apply_action(state, s.action);
    }
  }
  return out;
}

}  // namespace

std::vector<TrainingExample> spag_examples(std::span<const Trajectory> trajectories, double gamma,
                                           StepFilter filter) {
  struct Keep {
    double gamma;
    std::vector<double> rewards(const Trajectory& t) const { return spag_assign_rewards(t, gamma); }
    bool operator()(const Trajectory&, const Step&) const { return true; }
  };
  return replay_examples(trajectories, filter, Keep{gamma});
}

std::vector<TrainingExample> winning_trajectory_examples(std::span<const Trajectory> trajectories,
                                                         StepFilter filter) {
  struct Keep {
    std::vector<double> rewards(const Trajectory&) const { return {}; }
    bool operator()(const Trajectory& t, const Step& s) const {
      return t.outcome.of(s.actor) == Result::Win;
    }
  };
  return replay_examples(trajectories, filter, Keep{});
}

LossReport spag_loss(const Policy& policy, const Policy& behavior,
                     std::span<const TrainingExample> steps, double beta2) {
  require_nonempty(steps.size(), "spag_loss");
  if (!(beta2 >= 0.0)) throw std::invalid_argument("SPAG beta2 must be non-negative");
  LossReport r;
  r.grad.assign(policy.dimension(), 0.0);
  const double w = 1.0 / static_cast<double>(steps.size());
  for (const auto& ex : steps) {
    const auto lp = log_softmax(policy, ex.decision);
    const auto lq = log_softmax(behavior, ex.decision);
    if (!std::isfinite(lq[ex.index]))
      throw std::domain_error("behavior policy gives zero probability to a recorded action");
    const double ratio = std::exp(lp[ex.index] - lq[ex.index]);
    // d/dtheta of -(ratio * A - beta2 * KL)
    accumulate_log_prob_grad(policy, ex.decision, ex.index, 1.0, -w * ratio * ex.reward, r.grad);
    const double kl = add_kl_grad(policy, ex.decision, lp, lq, w * beta2, r.grad);
    r.loss -= w * (ratio * ex.reward - beta2 * kl);
    (ex.reward > 0 ? r.n_desirable : r.n_undesirable) += 1;
  }
  return r;
}

}  // namespace scopal
