#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "scopal/random.hpp"
#include "scopal/refine.hpp"

namespace scopal {

namespace {

void recount(LabeledDataset& data) {
  data.n_desirable = data.n_undesirable = 0;
  for (const auto& s : data.steps)
    (s.label == Label::Desirable ? data.n_desirable : data.n_undesirable) += 1;
}

void sort_steps(std::vector<LabeledStep>& steps) {
  std::stable_sort(steps.begin(), steps.end(), [](const LabeledStep& a, const LabeledStep& b) {
    return std::tie(a.game, a.key) < std::tie(b.game, b.key);
  });
}

// `want` items from `pool`: a seeded subset without replacement when the pool
// is large enough, otherwise the whole pool plus draws with replacement.
std::vector<std::size_t> resample(std::size_t pool, std::size_t want, Rng& rng) {
  std::vector<std::size_t> idx(pool);
  std::iota(idx.begin(), idx.end(), 0);
  if (want <= pool) {
    stable_shuffle(rng, idx);
    idx.resize(want);
    std::sort(idx.begin(), idx.end());
    return idx;
  }
  if (pool == 0) throw std::invalid_argument("cannot upsample an empty class");
  for (std::size_t i = pool; i < want; ++i) idx.push_back(uniform_index(rng, pool));
  return idx;
}

}  // namespace

LabeledDataset balance_by_game(const LabeledDataset& data, std::uint64_t seed) {
  std::map<GameId, std::vector<const LabeledStep*>> by_game;
  for (const auto& s : data.steps) by_game[s.game].push_back(&s);
  if (by_game.size() <= 1) return data;

  const std::size_t total = data.steps.size();
  const std::size_t base = total / by_game.size();
  std::size_t remainder = total % by_game.size();
  LabeledDataset out;
  for (const auto& [game, steps] : by_game) {
    const std::size_t target = base + (remainder > 0 ? 1 : 0);
    if (remainder > 0) --remainder;
    Rng rng(mix_seed({seed, static_cast<std::uint64_t>(game)}));
    for (auto i : resample(steps.size(), target, rng)) out.steps.push_back(*steps[i]);
  }
  sort_steps(out.steps);
  recount(out);
  return out;
}

std::pair<std::size_t, std::size_t> scaled_counts(std::size_t n_desirable,
                                                  std::size_t n_undesirable,
                                                  const ScaleTarget& target) {
  std::size_t d = target.desirable;
  std::size_t u = target.undesirable;
  if (target.mode == ScaleTarget::Mode::KeepRatio) {
    const std::size_t current = n_desirable + n_undesirable;
    if (target.total < current)
      throw std::invalid_argument(
          fmt::format("scale target {} is below the current size {}", target.total, current));
    if (current == 0) return {0, 0};
    d = static_cast<std::size_t>(std::llround(static_cast<double>(target.total) *
                                              static_cast<double>(n_desirable) /
                                              static_cast<double>(current)));
    u = target.total - d;
  }
  if (d < n_desirable || u < n_undesirable)
    throw std::invalid_argument(fmt::format(
        "scale targets ({}, {}) are below the current counts ({}, {})", d, u, n_desirable,
        n_undesirable));
  return {d, u};
}

LabeledDataset scale_dataset(const LabeledDataset& data, const ScaleTarget& target,
                             std::uint64_t seed) {
  std::vector<const LabeledStep*> pos, neg;
  for (const auto& s : data.steps) (s.label == Label::Desirable ? pos : neg).push_back(&s);
  const auto [d, u] = scaled_counts(pos.size(), neg.size(), target);
  LabeledDataset out;
  Rng rng_d(mix_seed({seed, 1}));
  Rng rng_u(mix_seed({seed, 2}));
  for (auto i : resample(pos.size(), d, rng_d)) out.steps.push_back(*pos[i]);
  for (auto i : resample(neg.size(), u, rng_u)) out.steps.push_back(*neg[i]);
  sort_steps(out.steps);
  recount(out);
  return out;
}

}  // namespace scopal
