#include "scopal/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "scopal/random.hpp"

extern char** environ;

namespace scopal {

namespace {

using Getter = std::function<std::string(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

struct Field {
  std::string section;
  std::string key;
  std::string doc;
  Getter get;
  Setter set;
};

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text) {
  const auto s = trim(text);
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty())
    throw ConfigError(fmt::format("'{}' is not a valid number", text));
  return v;
}

bool parse_bool(const std::string& text) {
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(fmt::format("'{}' is not a boolean (true/false)", text));
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::vector<GameId> parse_games(const std::string& text) {
  std::vector<GameId> out;
  for (const auto& name : split_list(text)) {
    if (name == "all") {
      out.insert(out.end(), kAllGames.begin(), kAllGames.end());
      continue;
    }
    try {
      out.push_back(parse_game(name));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

std::string games_text(const std::vector<GameId>& games) {
  std::vector<std::string> names;
  for (auto g : games) names.emplace_back(game_name(g));
  return join(names);
}

// Field builders bound to a member accessor.
template <typename Access>
Field number(std::string section, std::string key, std::string doc, Access access) {
  using T = std::remove_reference_t<decltype(access(std::declval<ExperimentConfig&>()))>;
  return {std::move(section), std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) {
            return fmt::format("{}", access(const_cast<ExperimentConfig&>(c)));
          },
          [access](ExperimentConfig& c, const std::string& v) { access(c) = parse_number<T>(v); }};
}

template <typename Access>
Field text(std::string section, std::string key, std::string doc, Access access) {
  return {std::move(section), std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) { return access(const_cast<ExperimentConfig&>(c)); },
          [access](ExperimentConfig& c, const std::string& v) { access(c) = trim(v); }};
}

template <typename Access>
Field list(std::string section, std::string key, std::string doc, Access access) {
  return {std::move(section), std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) {
            return join(access(const_cast<ExperimentConfig&>(c)));
          },
          [access](ExperimentConfig& c, const std::string& v) { access(c) = split_list(v); }};
}

template <typename Access>
Field games(std::string section, std::string key, std::string doc, Access access) {
  return {std::move(section), std::move(key), std::move(doc),
          [access](const ExperimentConfig& c) {
            return games_text(access(const_cast<ExperimentConfig&>(c)));
          },
          [access](ExperimentConfig& c, const std::string& v) { access(c) = parse_games(v); }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> all = {
      number("run", "seed", "master seed; every stage seed derives from it",
             [](C& c) -> auto& { return c.seed; }),
      number("run", "jobs", "worker threads, 0 = available parallelism (not hashed)",
             [](C& c) -> auto& { return c.jobs; }),
      text("run", "out", "root directory for run directories (not hashed)",
           [](C& c) -> auto& { return c.out; }),
      text("run", "init_policy", "starting checkpoint; empty = uniform policy",
           [](C& c) -> auto& { return c.init_policy; }),

      games("interaction", "games", "comma list of games, or all",
            [](C& c) -> auto& { return c.games; }),
      text("interaction", "opponent", "agent 2: random, self, mcts:<n> or policy:<path>",
           [](C& c) -> auto& { return c.opponent; }),
      number("interaction", "episodes", "episodes per game",
             [](C& c) -> auto& { return c.episodes; }),
      number("interaction", "temperature", "sampling temperature of the learner",
             [](C& c) -> auto& { return c.interact_temperature; }),
      number("interaction", "exploration_c", "UCT exploration constant",
             [](C& c) -> auto& { return c.exploration_c; }),
      number("interaction", "rollout_count", "random rollouts per MCTS leaf",
             [](C& c) -> auto& { return c.rollout_count; }),
      number("interaction", "breakthrough_width", "Breakthrough board columns",
             [](C& c) -> auto& { return c.options.breakthrough_width; }),
      number("interaction", "breakthrough_height", "Breakthrough board rows",
             [](C& c) -> auto& { return c.options.breakthrough_height; }),

      Field{"estimate", "method", "winrate, discounted or beta",
            [](const C& c) { return std::string(RewardMethod::kind_name(c.method.kind)); },
            [](C& c, const std::string& v) {
              try {
                c.method.kind = RewardMethod::parse_kind(trim(v));
              } catch (const std::exception& e) {
                throw ConfigError(e.what());
              }
            }},
      number("estimate", "tie_weight", "winrate credit for a tie",
             [](C& c) -> auto& { return c.method.tie_weight; }),
      number("estimate", "gamma", "discounted estimator decay",
             [](C& c) -> auto& { return c.method.gamma; }),
      number("estimate", "alpha0", "beta estimator prior wins",
             [](C& c) -> auto& { return c.method.alpha0; }),
      number("estimate", "beta0", "beta estimator prior losses",
             [](C& c) -> auto& { return c.method.beta0; }),
      number("estimate", "delta", "desirable iff reward > delta",
             [](C& c) -> auto& { return c.delta; }),
      number("estimate", "min_count", "drop pairs seen fewer times",
             [](C& c) -> auto& { return c.min_count; }),
      Field{"estimate", "filter", "learner (learner seats only) or all",
            [](const C& c) {
              return std::string(c.filter == StepFilter::Learner ? "learner" : "all");
            },
            [](C& c, const std::string& v) {
              const auto s = trim(v);
              if (s == "learner") c.filter = StepFilter::Learner;
              else if (s == "all") c.filter = StepFilter::All;
              else throw ConfigError(fmt::format("filter must be learner or all, got '{}'", s));
            }},
      Field{"estimate", "balance_games", "equalize per-game counts",
            [](const C& c) { return std::string(c.balance_games ? "true" : "false"); },
            [](C& c, const std::string& v) { c.balance_games = parse_bool(v); }},
      text("estimate", "scale", "none, keep_ratio (scale_total) or exact (scale_desirable/undesirable)",
           [](C& c) -> auto& { return c.scale_mode; }),
      number("estimate", "scale_total", "keep_ratio target size",
             [](C& c) -> auto& { return c.scale_total; }),
      number("estimate", "scale_desirable", "exact target of desirable steps",
             [](C& c) -> auto& { return c.scale_desirable; }),
      number("estimate", "scale_undesirable", "exact target of undesirable steps",
             [](C& c) -> auto& { return c.scale_undesirable; }),

      Field{"train", "mode", "two_stage, direct_kto, joint, bc, bc_dpo, trajectory_bc or spag",
            [](const C& c) { return std::string(train_mode_name(c.train.mode)); },
            [](C& c, const std::string& v) {
              try {
                c.train.mode = parse_train_mode(trim(v));
              } catch (const std::exception& e) {
                throw ConfigError(e.what());
              }
            }},
      number("train", "learning_rate", "gradient descent step size",
             [](C& c) -> auto& { return c.train.learning_rate; }),
      number("train", "bc_epochs", "behavior cloning epochs",
             [](C& c) -> auto& { return c.train.bc_epochs; }),
      number("train", "bc_batch_size", "behavior cloning batch size",
             [](C& c) -> auto& { return c.train.bc_batch_size; }),
      number("train", "bc_grad_accum", "behavior cloning accumulation steps",
             [](C& c) -> auto& { return c.train.bc_grad_accum; }),
      number("train", "epochs", "preference stage epochs",
             [](C& c) -> auto& { return c.train.epochs; }),
      number("train", "batch_size", "preference stage batch size",
             [](C& c) -> auto& { return c.train.batch_size; }),
      number("train", "grad_accum", "preference stage accumulation steps",
             [](C& c) -> auto& { return c.train.grad_accum; }),
      number("train", "beta", "KTO / DPO inverse temperature",
             [](C& c) -> auto& { return c.train.beta; }),
      Field{"train", "kl", "KTO reference point: shifted_pairs or exact",
            [](const C& c) {
              return std::string(c.train.kl == KlEstimate::Exact ? "exact" : "shifted_pairs");
            },
            [](C& c, const std::string& v) {
              const auto s = trim(v);
              if (s == "exact") c.train.kl = KlEstimate::Exact;
              else if (s == "shifted_pairs") c.train.kl = KlEstimate::ShiftedPairs;
              else throw ConfigError(fmt::format("kl must be shifted_pairs or exact, got '{}'", s));
            }},
      number("train", "lambda_desirable", "KTO desirable weight, 0 = balance from counts",
             [](C& c) -> auto& { return c.train.lambda_desirable; }),
      number("train", "lambda_undesirable", "KTO undesirable weight, 0 = balance from counts",
             [](C& c) -> auto& { return c.train.lambda_undesirable; }),
      number("train", "dpo_pair_cap", "DPO pairs per state",
             [](C& c) -> auto& { return c.train.dpo_pair_cap; }),
      number("train", "spag_beta2", "SPAG KL weight",
             [](C& c) -> auto& { return c.train.spag_beta2; }),
      number("train", "spag_gamma", "SPAG reward decay",
             [](C& c) -> auto& { return c.train.spag_gamma; }),

      games("eval", "games", "evaluation games; empty = the interaction games",
            [](C& c) -> auto& { return c.eval_games; }),
      list("eval", "opponents", "comma list of opponent specs",
           [](C& c) -> auto& { return c.eval_opponents; }),
      number("eval", "episodes", "episodes per game and opponent",
             [](C& c) -> auto& { return c.eval_episodes; }),
      number("eval", "temperature", "sampling temperature of evaluated policies",
             [](C& c) -> auto& { return c.eval_temperature; }),

      list("sweep", "ladder", "opponent rungs for the sweep",
           [](C& c) -> auto& { return c.ladder; }),
      number("iterate", "rounds", "self-play iterations",
             [](C& c) -> auto& { return c.rounds; }),
      list("head2head", "agents", "agent specs to pair up; self = init_policy",
           [](C& c) -> auto& { return c.h2h_agents; }),
      games("regret", "games", "nim and/or tictactoe",
            [](C& c) -> auto& { return c.regret_games; }),
      text("regret", "opponent", "opponent during regret episodes",
           [](C& c) -> auto& { return c.regret_opponent; }),
      number("regret", "episodes", "episodes per game",
             [](C& c) -> auto& { return c.regret_episodes; }),
  };
  return all;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

void set_field(ExperimentConfig& c, const Field& f, const std::string& value,
               const std::string& where) {
  try {
    f.set(c, value);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{} {}.{}: {}", where, f.section, f.key, e.what()));
  }
}

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

void check_spec(const std::string& spec, const char* what) {
  try {
    AgentSpec::parse(spec);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("{}: {}", what, e.what()));
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(!games.empty(), "interaction.games is empty");
  require(episodes >= 1, "interaction.episodes must be at least 1");
  require(interact_temperature > 0, "interaction.temperature must be positive");
  require(exploration_c >= 0, "interaction.exploration_c must be non-negative");
  require(rollout_count >= 1, "interaction.rollout_count must be at least 1");
  require(options.breakthrough_width >= 2 && options.breakthrough_height >= 4,
          "Breakthrough needs at least 2 columns and 4 rows");
  require(min_count >= 1, "estimate.min_count must be at least 1");
  require(scale_mode == "none" || scale_mode == "keep_ratio" || scale_mode == "exact",
          fmt::format("estimate.scale must be none, keep_ratio or exact, got '{}'", scale_mode));
  require(eval_episodes >= 2, "eval.episodes must be at least 2");
  require(eval_temperature > 0, "eval.temperature must be positive");
  require(rounds >= 1, "iterate.rounds must be at least 1");
  require(regret_episodes >= 1, "regret.episodes must be at least 1");
  require(!ladder.empty(), "sweep.ladder is empty");
  for (auto g : regret_games)
    require(g == GameId::Nim || g == GameId::TicTacToe,
            fmt::format("regret.games: {} has no exact solver", game_name(g)));
  try {
    method.validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  check_spec(opponent, "interaction.opponent");
  check_spec(regret_opponent, "regret.opponent");
  for (const auto& s : eval_opponents) check_spec(s, "eval.opponents");
  for (const auto& s : ladder) check_spec(s, "sweep.ladder");
  for (const auto& s : h2h_agents) check_spec(s, "head2head.agents");
}

std::uint64_t ExperimentConfig::interaction_seed() const { return seed; }
std::uint64_t ExperimentConfig::train_seed() const { return mix_seed({seed, fnv1a("train")}); }
std::uint64_t ExperimentConfig::eval_seed() const { return mix_seed({seed, fnv1a("eval")}); }
std::uint64_t ExperimentConfig::resample_seed() const {
  return mix_seed({seed, fnv1a("resample")});
}

InteractionConfig ExperimentConfig::interaction_config() const {
  InteractionConfig ic;
  ic.games = games;
  ic.agent1 = AgentSpec::parse("self");
  ic.agent2 = AgentSpec::parse(opponent);
  ic.episodes = episodes;
  ic.temperature = interact_temperature;
  ic.master_seed = interaction_seed();
  ic.exploration_c = exploration_c;
  ic.rollout_count = rollout_count;
  ic.options = options;
  ic.jobs = jobs;
  return ic;
}

LabelingConfig ExperimentConfig::labeling_config() const {
  return {method, delta, min_count, filter, jobs};
}

TrainConfig ExperimentConfig::train_config() const {
  auto t = train;
  t.seed = train_seed();
  return t;
}

EvalConfig ExperimentConfig::eval_config() const {
  EvalConfig e;
  e.games = eval_games.empty() ? games : eval_games;
  e.episodes = eval_episodes;
  e.temperature = eval_temperature;
  e.master_seed = eval_seed();
  e.exploration_c = exploration_c;
  e.rollout_count = rollout_count;
  e.options = options;
  e.jobs = jobs;
  return e;
}

PipelineConfig ExperimentConfig::pipeline_config() const {
  PipelineConfig p;
  p.interaction = interaction_config();
  p.labeling = labeling_config();
  p.train = train_config();
  p.eval = eval_config();
  p.eval_opponents.clear();
  for (const auto& s : eval_opponents) p.eval_opponents.push_back(AgentSpec::parse(s));
  p.balance_games = balance_games;
  if (scale_mode == "keep_ratio")
    p.scale = ScaleTarget{ScaleTarget::Mode::KeepRatio, scale_total, 0, 0};
  else if (scale_mode == "exact")
    p.scale = ScaleTarget{ScaleTarget::Mode::Exact, 0, scale_desirable, scale_undesirable};
  p.resample_seed = resample_seed();
  return p;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return to_ini(a) == to_ini(b);
}

std::string to_ini(const ExperimentConfig& config) {
  std::string out, section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      out += fmt::format("{}[{}]\n", section.empty() ? "" : "\n", f.section);
      section = f.section;
    }
    out += fmt::format("{} = {}\n", f.key, f.get(config));
  }
  return out;
}

ExperimentConfig apply_ini(ExperimentConfig base, const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("malformed config: {}", e.message()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(fmt::format("key '{}' outside of a section", section));
    for (const auto& [key, value] : body) {
      const Field* f = find_field(section, key);
      if (!f) throw ConfigError(fmt::format("unknown config key {}.{}", section, key));
      set_field(base, *f, value.data(), "config");
    }
    if (body.empty()) {
      const bool known = std::any_of(fields().begin(), fields().end(),
                                     [&](const Field& f) { return f.section == section; });
      if (!known) throw ConfigError(fmt::format("unknown config section [{}]", section));
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return apply_ini(std::move(base), ss.str());
}

ExperimentConfig apply_env(ExperimentConfig base, const std::map<std::string, std::string>& env) {
  for (const auto& [name, value] : env) {
    if (name.rfind("SCOPAL_", 0) != 0) continue;
    const Field* match = nullptr;
    for (const auto& f : fields())
      if (name == "SCOPAL_" + upper(f.section) + "_" + upper(f.key)) match = &f;
    if (!match) throw ConfigError(fmt::format("unknown environment override {}", name));
    set_field(base, *match, value, "environment");
  }
  return base;
}

std::map<std::string, std::string> scopal_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    auto name = entry.substr(0, eq);
    if (name.rfind("SCOPAL_", 0) == 0) out[name] = entry.substr(eq + 1);
  }
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  auto c = config;
  c.jobs = 0;
  c.out = "";
  return fnv1a(to_ini(c));
}

std::vector<ConfigKey> config_schema() {
  std::vector<ConfigKey> out;
  for (const auto& f : fields()) out.push_back({f.section, f.key, f.doc});
  return out;
}

}  // namespace scopal
