#include "scopal/interaction.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "scopal/mcts.hpp"
#include "scopal/parallel.hpp"
#include "scopal/random.hpp"

namespace scopal {

using json = nlohmann::ordered_json;

AgentSpec AgentSpec::parse(std::string_view text) {
  AgentSpec spec;
  if (text == "random") return spec;
  if (text == "self") {
    spec.kind = Kind::Self;
    return spec;
  }
  if (text.starts_with("mcts:")) {
    const auto digits = text.substr(5);
    int n = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (res.ec != std::errc() || res.ptr != digits.data() + digits.size() || n < 1)
      throw std::invalid_argument(fmt::format("bad MCTS budget in agent '{}'", text));
    spec.kind = Kind::Mcts;
    spec.simulations = n;
    return spec;
  }
  if (text.starts_with("policy:") && text.size() > 7) {
    spec.kind = Kind::Policy;
    spec.path = std::string(text.substr(7));
    return spec;
  }
  throw std::invalid_argument(
      fmt::format("unknown agent '{}' (expected random, self, mcts:<n> or policy:<path>)", text));
}

std::string AgentSpec::label() const {
  switch (kind) {
    case Kind::Random: return "random";
    case Kind::Self: return "self";
    case Kind::Mcts: return fmt::format("mcts:{}", simulations);
    case Kind::Policy: return "policy:" + path;
  }
  return "?";
}

Agent random_agent() {
  return {"random", [](const GameState& s, std::uint64_t seed) { return random_act(s, seed); }};
}

Agent mcts_agent(int simulations, double exploration_c, int rollout_count) {
  return {fmt::format("mcts:{}", simulations),
          [=](const GameState& s, std::uint64_t seed) {
            MctsConfig cfg;
            cfg.max_simulations = simulations;
            cfg.exploration_c = exploration_c;
            cfg.rollout_count = rollout_count;
            cfg.rng_seed = seed;
            return mcts_act(s, cfg);
          }};
}

Agent policy_agent(std::shared_ptr<const Policy> policy, double temperature, std::string label) {
  if (!policy) throw std::invalid_argument("policy agent needs a policy");
  if (!(temperature > 0.0)) throw std::invalid_argument("policy agent temperature must be positive");
  return {std::move(label), [policy = std::move(policy), temperature](const GameState& s,
                                                                     std::uint64_t seed) {
            return sample_action(*policy, s, temperature, seed);
          }};
}

Agent make_agent(const AgentSpec& spec, const AgentContext& context) {
  switch (spec.kind) {
    case AgentSpec::Kind::Random: return random_agent();
    case AgentSpec::Kind::Mcts:
      return mcts_agent(spec.simulations, context.exploration_c, context.rollout_count);
    case AgentSpec::Kind::Self:
      if (!context.learner) throw std::invalid_argument("agent 'self' needs a learner policy");
      return policy_agent(context.learner, context.temperature, "self");
    case AgentSpec::Kind::Policy:
      return policy_agent(std::make_shared<const Policy>(Policy::load(spec.path)),
                          context.temperature, spec.label());
  }
  throw std::invalid_argument("unknown agent kind");
}

bool Trajectory::is_learner(Player p) const {
  return std::find(learner_seats.begin(), learner_seats.end(), p) != learner_seats.end();
}

EpisodeSeeds episode_seeds(std::uint64_t master_seed, GameId game, std::uint64_t episode) {
  const auto base = mix_seed({master_seed, static_cast<std::uint64_t>(game), episode});
  return {mix_seed({base, 1}), mix_seed({base, 2})};
}

std::uint64_t ply_seed(std::uint64_t sampling_seed, int move_index) {
  return mix_seed({sampling_seed, static_cast<std::uint64_t>(move_index)});
}

Trajectory run_episode(const Agent& agent1, const Agent& agent2, GameId game,
                       const EpisodeSeeds& seeds, bool agent1_first, bool self_play,
                       const GameOptions& options) {
  Trajectory t;
  t.game = game;
  if (game == GameId::Breakthrough) t.options = options;
  t.chance_seed = seeds.chance;
  t.sampling_seed = seeds.sampling;
  const Agent& first = agent1_first ? agent1 : agent2;
  const Agent& second = agent1_first ? agent2 : agent1;
  t.p1_agent = first.label;
  t.p2_agent = second.label;
  if (self_play)
    t.learner_seats = {Player::P1, Player::P2};
  else
    t.learner_seats = {agent1_first ? Player::P1 : Player::P2};

  auto state = new_game(game, seeds.chance, options);
  while (!is_terminal(state)) {
    const Player mover = state.to_move();
    const Agent& agent = mover == Player::P1 ? first : second;
    const Action a = agent.act(state, ply_seed(seeds.sampling, state.move_count()));
    if (!is_legal(state, a))
      throw GameError(fmt::format("agent {} chose illegal action {} in {}", agent.label, a.code,
                                  state_key(state)));
    t.steps.push_back({canonical_key(state, a), mover, a, action_to_string(state, a),
                       state.move_count()});
    state = apply_action(state, a);
  }
  t.outcome = *terminal_outcome(state);
  t.truncated = state.move_count() >= kMovePlyLimit;
  return t;
}

std::vector<Trajectory> collect_trajectories(const InteractionConfig& config,
                                             std::shared_ptr<const Policy> learner) {
  if (config.episodes < 1) throw std::invalid_argument("episode count must be at least 1");
  AgentContext ctx{std::move(learner), config.temperature, config.exploration_c,
                   config.rollout_count};
  const Agent a1 = make_agent(config.agent1, ctx);
  const Agent a2 = make_agent(config.agent2, ctx);
  const bool self_play = config.agent1.kind == AgentSpec::Kind::Self &&
                         config.agent2.kind == AgentSpec::Kind::Self;
  return collect_trajectories(config, a1, a2, self_play);
}

std::vector<Trajectory> collect_trajectories(const InteractionConfig& config, const Agent& a1,
                                             const Agent& a2, bool self_play) {
  if (config.episodes < 1) throw std::invalid_argument("episode count must be at least 1");
  const auto per_game = static_cast<std::size_t>(config.episodes);
  std::vector<Trajectory> out(config.games.size() * per_game);
  parallel_for(out.size(), config.jobs, [&](std::size_t i) {
    const auto game = config.games[i / per_game];
    const auto episode = static_cast<std::uint64_t>(i % per_game);
    auto t = run_episode(a1, a2, game, episode_seeds(config.master_seed, game, episode),
                         episode % 2 == 0, self_play, config.options);
    t.episode = episode;
    out[i] = std::move(t);
  });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Player parse_player(const std::string& s) {
  if (s == "P1") return Player::P1;
  if (s == "P2") return Player::P2;
  throw std::runtime_error(fmt::format("bad player '{}'", s));
}

Result parse_result(const std::string& s) {
  if (s == "win") return Result::Win;
  if (s == "lose") return Result::Lose;
  if (s == "tie") return Result::Tie;
  throw std::runtime_error(fmt::format("bad result '{}'", s));
}

}  // namespace

std::string trajectory_to_json(const Trajectory& t) {
  json j;
  j["game"] = game_name(t.game);
  if (t.game == GameId::Breakthrough)
    j["board"] = {t.options.breakthrough_width, t.options.breakthrough_height};
  j["episode"] = t.episode;
  j["chance_seed"] = t.chance_seed;
  j["sampling_seed"] = t.sampling_seed;
  j["p1"] = t.p1_agent;
  j["p2"] = t.p2_agent;
  j["first_player_agent"] = t.first_player_agent();
  auto& seats = j["learner"] = json::array();
  for (auto p : t.learner_seats) seats.push_back(player_name(p));
  auto& steps = j["steps"] = json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"move_index", s.move_index},
                     {"actor", player_name(s.actor)},
                     {"action", s.notation},
                     {"key", s.key}});
  j["outcome"] = {{"P1", result_name(t.outcome.of(Player::P1))},
                  {"P2", result_name(t.outcome.of(Player::P2))}};
  j["truncated"] = t.truncated;
  return j.dump();
}

Trajectory trajectory_from_json(std::string_view line) {
  Trajectory t;
  try {
    const auto j = json::parse(line);
    t.game = parse_game(j.at("game").get<std::string>());
    if (t.game == GameId::Breakthrough) {
      t.options.breakthrough_width = j.at("board").at(0).get<int>();
      t.options.breakthrough_height = j.at("board").at(1).get<int>();
    }
    t.episode = j.at("episode").get<std::uint64_t>();
    t.chance_seed = j.at("chance_seed").get<std::uint64_t>();
    t.sampling_seed = j.at("sampling_seed").get<std::uint64_t>();
    t.p1_agent = j.at("p1").get<std::string>();
    t.p2_agent = j.at("p2").get<std::string>();
    for (const auto& p : j.at("learner")) t.learner_seats.push_back(parse_player(p.get<std::string>()));
    t.outcome.results = {parse_result(j.at("outcome").at("P1").get<std::string>()),
                         parse_result(j.at("outcome").at("P2").get<std::string>())};
    t.truncated = j.at("truncated").get<bool>();

    auto state = new_game(t.game, t.chance_seed, t.options);
    for (const auto& js : j.at("steps")) {
      Step s;
      s.move_index = js.at("move_index").get<int>();
      s.actor = parse_player(js.at("actor").get<std::string>());
      s.notation = js.at("action").get<std::string>();
      s.key = js.at("key").get<std::string>();
      if (s.move_index != state.move_count() || s.actor != state.to_move())
        throw std::runtime_error(fmt::format("step {} is out of turn order", s.move_index));
      s.action = action_from_string(state, s.notation);
      if (canonical_key(state, s.action) != s.key)
        throw std::runtime_error(fmt::format("step {} key does not match its replayed state",
                                             s.move_index));
      state = apply_action(state, s.action);
      t.steps.push_back(std::move(s));
    }
    const auto outcome = terminal_outcome(state);
    if (!outcome || !(*outcome == t.outcome))
      throw std::runtime_error("recorded outcome does not match the replayed game");
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(fmt::format("corrupt trajectory record: {}", e.what()));
  } catch (const GameError& e) {
    throw std::runtime_error(fmt::format("corrupt trajectory record: {}", e.what()));
  }
  return t;
}

void append_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& ts) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error(fmt::format("cannot open trajectory store {}", path.string()));
  for (const auto& t : ts) out << trajectory_to_json(t) << '\n';
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read trajectory store {}", path.string()));
  std::vector<Trajectory> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(trajectory_from_json(line));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

}  // namespace scopal
