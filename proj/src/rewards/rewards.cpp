#include "scopal/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "scopal/parallel.hpp"

namespace scopal {

using json = nlohmann::ordered_json;

void StepStats::add(Result r) {
  ++n_all;
  switch (r) {
    case Result::Win: ++n_win; break;
    case Result::Tie: ++n_tie; break;
    case Result::Lose: ++n_lose; break;
  }
}

StepStats& StepStats::operator+=(const StepStats& o) {
  n_all += o.n_all;
  n_win += o.n_win;
  n_tie += o.n_tie;
  n_lose += o.n_lose;
  return *this;
}

namespace {

bool counted(const Trajectory& t, const Step& s, StepFilter filter) {
  return filter == StepFilter::All || t.is_learner(s.actor);
}

}  // namespace

void merge_stats(StatsMap& into, const StatsMap& from) {
  for (const auto& [key, st] : from) into[key] += st;
}

StatsMap accumulate_stats(std::span<const Trajectory> trajectories, StepFilter filter, int jobs) {
  if (jobs <= 0) jobs = default_jobs();
  const std::size_t chunks = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(jobs), trajectories.size()));
  std::vector<StatsMap> partial(chunks);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    const std::size_t begin = trajectories.size() * c / chunks;
    const std::size_t end = trajectories.size() * (c + 1) / chunks;
    auto& m = partial[c];
    for (std::size_t i = begin; i < end; ++i) {
      const auto& t = trajectories[i];
      for (const auto& s : t.steps)
        if (counted(t, s, filter)) m[s.key].add(t.outcome.of(s.actor));
    }
  });
  StatsMap out;
  for (const auto& m : partial) merge_stats(out, m);
  return out;
}

RewardMethod::Kind RewardMethod::parse_kind(std::string_view name) {
  if (name == "winrate") return Kind::WinRate;
  if (name == "discounted") return Kind::Discounted;
  if (name == "beta") return Kind::Beta;
  throw std::invalid_argument(
      fmt::format("unknown reward method '{}' (expected winrate, discounted or beta)", name));
}

std::string_view RewardMethod::kind_name(Kind kind) {
  switch (kind) {
    case Kind::WinRate: return "winrate";
    case Kind::Discounted: return "discounted";
    case Kind::Beta: return "beta";
  }
  return "?";
}

void RewardMethod::validate() const {
  if (!(tie_weight >= 0.0 && tie_weight <= 1.0))
    throw std::invalid_argument(fmt::format("tie_weight must lie in [0, 1], got {}", tie_weight));
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument(fmt::format("gamma must lie in (0, 1), got {}", gamma));
  if (!(alpha0 > 0.0) || !(beta0 > 0.0))
    throw std::invalid_argument(fmt::format("Beta prior must be positive, got ({}, {})", alpha0, beta0));
}

RewardMap estimate_rewards(const StatsMap& stats, const RewardMethod& method) {
  method.validate();
  if (method.kind == RewardMethod::Kind::Discounted)
    throw std::invalid_argument("the discounted estimator needs trajectories, not counts");
  RewardMap out;
  for (const auto& [key, st] : stats) {
    if (st.n_all <= 0) throw std::invalid_argument(fmt::format("no occurrences for key {}", key));
    const double w = static_cast<double>(st.n_win);
    if (method.kind == RewardMethod::Kind::WinRate) {
      out[key] = (w + method.tie_weight * static_cast<double>(st.n_tie)) /
                 static_cast<double>(st.n_all);
    } else {
      const double l = static_cast<double>(st.n_lose);
      out[key] = (method.alpha0 + w) / (method.alpha0 + method.beta0 + w + l);
    }
  }
  return out;
}

RewardMap estimate_rewards(std::span<const Trajectory> trajectories, const RewardMethod& method,
                           StepFilter filter) {
  method.validate();
  if (method.kind != RewardMethod::Kind::Discounted)
    return estimate_rewards(accumulate_stats(trajectories, filter), method);
  std::map<std::string, std::pair<double, std::int64_t>> sums;
  for (const auto& t : trajectories) {
    const int total = static_cast<int>(t.steps.size());
    for (const auto& s : t.steps) {
      if (!counted(t, s, filter)) continue;
      const Result r = t.outcome.of(s.actor);
      const double rt = r == Result::Win ? 1.0 : r == Result::Lose ? -1.0 : 0.0;
      auto& [sum, n] = sums[s.key];
      sum += std::pow(method.gamma, total - (s.move_index + 1)) * rt;
      ++n;
    }
  }
  RewardMap out;
  for (const auto& [key, v] : sums) out[key] = v.first / static_cast<double>(v.second);
  return out;
}

std::string_view label_name(Label label) {
  return label == Label::Desirable ? "desirable" : "undesirable";
}

GameState LabeledStep::state() const {
  auto s = new_game(game, chance_seed, options);
  for (const auto& h : history) s = apply_action(s, action_from_string(s, h));
  return s;
}

LabeledDataset label_steps(const RewardMap& rewards, double delta, const StatsMap& stats,
                           std::span<const Trajectory> trajectories, StepFilter filter,
                           std::int64_t min_count) {
  struct Where {
    std::size_t trajectory;
    std::size_t step;
  };
  std::map<std::string, Where> first;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& t = trajectories[i];
    for (std::size_t j = 0; j < t.steps.size(); ++j)
      if (counted(t, t.steps[j], filter)) first.try_emplace(t.steps[j].key, Where{i, j});
  }

  LabeledDataset out;
  for (const auto& [key, reward] : rewards) {
    const auto st = stats.find(key);
    if (st == stats.end() || st->second.n_all < min_count) continue;
    const auto where = first.find(key);
    if (where == first.end())
      throw std::invalid_argument(fmt::format("no occurrence of {} in the trajectories", key));
    const auto& t = trajectories[where->second.trajectory];
    LabeledStep ls;
    ls.game = t.game;
    ls.options = t.options;
    ls.key = key;
    ls.action = t.steps[where->second.step].notation;
    ls.state_key = key.substr(0, key.size() - ls.action.size() - 1);
    ls.reward = reward;
    ls.label = label_for(reward, delta);
    ls.counts = st->second;
    ls.chance_seed = t.chance_seed;
    for (std::size_t j = 0; j < where->second.step; ++j) ls.history.push_back(t.steps[j].notation);
    (ls.label == Label::Desirable ? out.n_desirable : out.n_undesirable) += 1;
    out.steps.push_back(std::move(ls));
  }
  std::sort(out.steps.begin(), out.steps.end(), [](const LabeledStep& a, const LabeledStep& b) {
    return std::tie(a.game, a.key) < std::tie(b.game, b.key);
  });
  return out;
}

LabeledDataset label_steps(std::span<const Trajectory> trajectories, const LabelingConfig& config) {
  const auto stats = accumulate_stats(trajectories, config.filter, config.jobs);
  const auto rewards = config.method.kind == RewardMethod::Kind::Discounted
                           ? estimate_rewards(trajectories, config.method, config.filter)
                           : estimate_rewards(stats, config.method);
  return label_steps(rewards, config.delta, stats, trajectories, config.filter, config.min_count);
}

std::string labeled_step_to_json(const LabeledStep& s) {
  json j;
  j["game"] = game_name(s.game);
  if (s.game == GameId::Breakthrough)
    j["board"] = {s.options.breakthrough_width, s.options.breakthrough_height};
  j["key"] = s.key;
  j["state_key"] = s.state_key;
  j["action"] = s.action;
  j["reward"] = s.reward;
  j["label"] = label_name(s.label);
  j["n_all"] = s.counts.n_all;
  j["n_win"] = s.counts.n_win;
  j["n_tie"] = s.counts.n_tie;
  j["n_lose"] = s.counts.n_lose;
  j["chance_seed"] = s.chance_seed;
  j["history"] = s.history;
  return j.dump();
}

LabeledStep labeled_step_from_json(std::string_view line) {
  LabeledStep s;
  try {
    const auto j = json::parse(line);
    s.game = parse_game(j.at("game").get<std::string>());
    if (s.game == GameId::Breakthrough) {
      s.options.breakthrough_width = j.at("board").at(0).get<int>();
      s.options.breakthrough_height = j.at("board").at(1).get<int>();
    }
    s.key = j.at("key").get<std::string>();
    s.state_key = j.at("state_key").get<std::string>();
    s.action = j.at("action").get<std::string>();
    s.reward = j.at("reward").get<double>();
    const auto label = j.at("label").get<std::string>();
    if (label != "desirable" && label != "undesirable")
      throw std::runtime_error(fmt::format("bad label '{}'", label));
    s.label = label == "desirable" ? Label::Desirable : Label::Undesirable;
    s.counts = {j.at("n_all").get<std::int64_t>(), j.at("n_win").get<std::int64_t>(),
                j.at("n_tie").get<std::int64_t>(), j.at("n_lose").get<std::int64_t>()};
    s.chance_seed = j.at("chance_seed").get<std::uint64_t>();
    s.history = j.at("history").get<std::vector<std::string>>();
    if (s.counts.n_all != s.counts.n_win + s.counts.n_tie + s.counts.n_lose || s.counts.n_all < 1)
      throw std::runtime_error("inconsistent counts");
    const auto state = s.state();
    if (canonical_key(state, s.action_code(state)) != s.key)
      throw std::runtime_error("history does not lead to the recorded key");
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(fmt::format("corrupt labeled step: {}", e.what()));
  } catch (const GameError& e) {
    throw std::runtime_error(fmt::format("corrupt labeled step: {}", e.what()));
  }
  return s;
}

void write_labeled(const std::filesystem::path& path, const LabeledDataset& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  for (const auto& s : data.steps) out << labeled_step_to_json(s) << '\n';
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

LabeledDataset read_labeled(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  LabeledDataset data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      data.steps.push_back(labeled_step_from_json(line));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
    (data.steps.back().label == Label::Desirable ? data.n_desirable : data.n_undesirable) += 1;
  }
  return data;
}

}  // namespace scopal
