#include "scopal/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "scopal/config.hpp"
#include "scopal/random.hpp"

namespace scopal {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

struct Inputs {
  std::string trajectories;
  std::string dataset;
  std::string policy;
};

// Named input files that feed a run, in a fixed order.
std::vector<std::pair<std::string, std::string>> input_files(const ExperimentConfig& cfg,
                                                             const Inputs& in) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!cfg.init_policy.empty()) out.emplace_back("init_policy", cfg.init_policy);
  if (!in.trajectories.empty()) out.emplace_back("trajectories", in.trajectories);
  if (!in.dataset.empty()) out.emplace_back("dataset", in.dataset);
  if (!in.policy.empty()) out.emplace_back("policy", in.policy);
  return out;
}

class RunDir {
 public:
  RunDir(const std::string& subcommand, const ExperimentConfig& cfg, const Inputs& inputs)
      : subcommand_(subcommand), cfg_(cfg) {
    std::string identity = subcommand + "\n" + hex(config_hash(cfg)) + "\n";
    for (const auto& [name, path] : input_files(cfg, inputs)) {
      const auto h = hex(fnv1a(read_file(path)));
      inputs_.emplace_back(name, h);
      identity += name + "=" + h + "\n";
    }
    final_ = fs::path(cfg.out) / fmt::format("{}-{}", subcommand, hex(fnv1a(identity)));
    tmp_ = final_;
    tmp_ += ".partial";
  }

  RunDir(const RunDir&) = delete;
  RunDir& operator=(const RunDir&) = delete;
  ~RunDir() {
    std::error_code ec;
    if (begun_ && !committed_) fs::remove_all(tmp_, ec);
  }

  bool exists() const { return fs::exists(final_ / "manifest.json"); }
  const fs::path& final_path() const { return final_; }

  fs::path begin() {
    fs::remove_all(tmp_);
    fs::create_directories(tmp_);
    begun_ = true;
    // Stored without jobs and out so equivalent runs store identical files.
    auto stored = cfg_;
    stored.jobs = 0;
    stored.out.clear();
    std::ofstream(tmp_ / "config.ini", std::ios::binary) << to_ini(stored);
    return tmp_;
  }

  void commit() {
    nlohmann::ordered_json m;
    m["subcommand"] = subcommand_;
    m["config_hash"] = hex(config_hash(cfg_));
    m["seeds"] = {{"master", cfg_.seed},
                  {"interaction", cfg_.interaction_seed()},
                  {"train", cfg_.train_seed()},
                  {"eval", cfg_.eval_seed()},
                  {"resample", cfg_.resample_seed()}};
    nlohmann::ordered_json in = nlohmann::ordered_json::object();
    for (const auto& [name, h] : inputs_) in[name] = h;
    m["inputs"] = in;
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(tmp_)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    nlohmann::ordered_json art = nlohmann::ordered_json::object();
    for (const auto& n : names) art[n] = hex(fnv1a(read_file(tmp_ / n)));
    m["artifacts"] = art;
    std::ofstream(tmp_ / "manifest.json", std::ios::binary) << m.dump(2) << "\n";
    fs::rename(tmp_, final_);
    committed_ = true;
  }

 private:
  std::string subcommand_;
  ExperimentConfig cfg_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  fs::path final_, tmp_;
  bool begun_ = false;
  bool committed_ = false;
};

Policy initial_policy(const ExperimentConfig& cfg) {
  return cfg.init_policy.empty() ? Policy(cfg.options) : Policy::load(cfg.init_policy);
}

std::vector<Agent> resolve(const std::vector<std::string>& specs, const EvalConfig& ec,
                           const std::shared_ptr<const Policy>& self) {
  std::vector<Agent> out;
  for (const auto& s : specs) out.push_back(eval_agent(AgentSpec::parse(s), ec, self));
  return out;
}

using Command = std::function<void(const ExperimentConfig&, const Inputs&, const fs::path&,
                                   std::ostream&)>;

void print_reports(std::ostream& out, const std::vector<MatchReport>& reports) {
  for (const auto& r : reports)
    out << fmt::format("  {:<13} vs {:<12} win rate {:.4f} ({}W {}L {}T)\n", game_name(r.game),
                       r.agent2, r.win_rate, r.n_win, r.n_lose, r.n_tie);
}

void cmd_interact(const ExperimentConfig& cfg, const Inputs&, const fs::path& dir,
                  std::ostream& out) {
  const auto ts = collect_trajectories(cfg.interaction_config(),
                                       std::make_shared<const Policy>(initial_policy(cfg)));
  append_trajectories(dir / "traj.jsonl", ts);
  out << fmt::format("{} trajectories, learner win rate {:.4f}\n", ts.size(),
                     interaction_win_rate(ts));
}

void cmd_estimate(const ExperimentConfig& cfg, const Inputs& in, const fs::path& dir,
                  std::ostream& out) {
  const auto ts = read_trajectories(in.trajectories);
  const auto data = build_dataset(ts, cfg.pipeline_config());
  write_labeled(dir / "labeled.jsonl", data);
  out << fmt::format("{} labeled pairs: {} desirable, {} undesirable\n", data.steps.size(),
                     data.n_desirable, data.n_undesirable);
}

void cmd_train(const ExperimentConfig& cfg, const Inputs& in, const fs::path& dir,
               std::ostream& out) {
  LabeledDataset data;
  if (!in.dataset.empty()) data = read_labeled(in.dataset);
  std::vector<Trajectory> ts;
  if (!in.trajectories.empty()) ts = read_trajectories(in.trajectories);
  const auto r = train(initial_policy(cfg), {data.steps, ts}, cfg.train_config());
  r.policy.save(dir / "policy.ckpt");
  write_metrics_csv(dir / "metrics.csv", r.metrics);
  if (!r.metrics.empty())
    out << fmt::format("trained ({}), final {} loss {:.6f}\n", train_mode_name(cfg.train.mode),
                       r.metrics.back().stage, r.metrics.back().loss);
}

void cmd_evaluate(const ExperimentConfig& cfg, const Inputs& in, const fs::path& dir,
                  std::ostream& out) {
  auto policy = std::make_shared<const Policy>(in.policy.empty() ? initial_policy(cfg)
                                                                 : Policy::load(in.policy));
  const auto ec = cfg.eval_config();
  const auto reports =
      tournament(policy_agent(policy, ec.temperature, "policy"),
                 resolve(cfg.eval_opponents, ec, policy), ec);
  write_tournament_csv(dir / "tournament.csv", reports);
  print_reports(out, reports);
}

void cmd_pipeline(const ExperimentConfig& cfg, const Inputs&, const fs::path& dir,
                  std::ostream& out) {
  const auto r = run_pipeline(initial_policy(cfg), cfg.pipeline_config());
  append_trajectories(dir / "traj.jsonl", r.trajectories);
  write_labeled(dir / "labeled.jsonl", r.dataset);
  r.trained.policy.save(dir / "policy.ckpt");
  write_metrics_csv(dir / "metrics.csv", r.trained.metrics);
  write_tournament_csv(dir / "tournament.csv", r.reports);
  out << fmt::format("{} trajectories, {} desirable / {} undesirable\n", r.trajectories.size(),
                     r.dataset.n_desirable, r.dataset.n_undesirable);
  print_reports(out, r.reports);
}

void cmd_sweep(const ExperimentConfig& cfg, const Inputs&, const fs::path& dir,
               std::ostream& out) {
  std::vector<AgentSpec> ladder;
  for (const auto& s : cfg.ladder) ladder.push_back(AgentSpec::parse(s));
  const auto rows = opponent_sweep(initial_policy(cfg), ladder, cfg.pipeline_config());
  write_sweep_csv(dir / "sweep.csv", rows);
  for (const auto& r : rows)
    out << fmt::format("  {:<10} interaction {:.4f}  D {:>6}  U {:>6}  trained {:.4f}\n", r.rung,
                       r.interaction_win_rate, r.n_desirable, r.n_undesirable, r.trained_win_rate);
}

void cmd_head2head(const ExperimentConfig& cfg, const Inputs&, const fs::path& dir,
                   std::ostream& out) {
  const auto self = std::make_shared<const Policy>(initial_policy(cfg));
  const auto ec = cfg.eval_config();
  const auto h = head_to_head(resolve(cfg.h2h_agents, ec, self), ec);
  write_head_to_head_csv(dir / "head2head.csv", h);
  for (std::size_t i = 0; i < h.labels.size(); ++i) {
    out << fmt::format("  {:<16}", h.labels[i]);
    for (double v : h.matrix[i]) out << fmt::format(" {:.4f}", v);
    out << "\n";
  }
}

void cmd_iterate(const ExperimentConfig& cfg, const Inputs&, const fs::path& dir,
                 std::ostream& out) {
  const auto rounds = iterate(initial_policy(cfg), cfg.rounds, cfg.pipeline_config());
  std::string csv = "round,version,n_desirable,n_undesirable,eval_win_rate\n";
  for (const auto& r : rounds) {
    r.policy.save(dir / fmt::format("iter{}.ckpt", r.round));
    csv += fmt::format("{},{},{},{},{}\n", r.round, r.policy.version(), r.n_desirable,
                       r.n_undesirable, r.eval_win_rate);
    out << fmt::format("  round {}: eval win rate {:.4f}\n", r.round, r.eval_win_rate);
  }
  std::ofstream(dir / "iterate.csv", std::ios::binary) << csv;
}

void cmd_regret(const ExperimentConfig& cfg, const Inputs& in, const fs::path& dir,
                std::ostream& out) {
  auto policy = std::make_shared<const Policy>(in.policy.empty() ? initial_policy(cfg)
                                                                 : Policy::load(in.policy));
  auto uniform = std::make_shared<const Policy>(cfg.options);
  auto ec = cfg.eval_config();
  ec.episodes = std::max(2, cfg.regret_episodes);
  const auto opponent = eval_agent(AgentSpec::parse(cfg.regret_opponent), ec);
  std::vector<RegretReport> reports;
  std::vector<std::string> labels;
  for (auto game : cfg.regret_games) {
    for (auto& [label, p] : {std::pair{"policy", policy}, std::pair{"uniform", uniform}}) {
      reports.push_back(regret(policy_agent(p, ec.temperature, label), opponent, game, ec));
      labels.emplace_back(label);
      out << fmt::format("  {:<10} {:<8} mean regret {:.5f} over {} moves\n", game_name(game),
                         label, reports.back().mean_regret, reports.back().moves);
    }
  }
  write_regret_csv(dir / "regret.csv", reports, labels);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::map<std::string, std::string>& env) {
  CLI::App app{"Game-play strategy refinement: interaction, reward estimation, training and "
               "evaluation.",
               "scopal"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool print_config = false;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed (overrides run.seed)");
  app.add_option("--jobs", jobs, "worker threads; 1 = single-threaded");
  app.add_option("--out", out_dir, "root directory for run directories");
  app.add_flag("--print-config", print_config, "print the effective config and exit");

  Inputs inputs;
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"interact", "collect trajectories (traj.jsonl)", cmd_interact},
      {"estimate", "label step-wise rewards (labeled.jsonl)", cmd_estimate},
      {"train", "refine the policy (policy.ckpt, metrics.csv)", cmd_train},
      {"evaluate", "tournament against the eval opponents (tournament.csv)", cmd_evaluate},
      {"sweep", "opponent-selection sweep (sweep.csv)", cmd_sweep},
      {"head2head", "pairwise win-rate matrix (head2head.csv)", cmd_head2head},
      {"iterate", "iterative self-play (iter<k>.ckpt, iterate.csv)", cmd_iterate},
      {"regret", "exact-solver regret (regret.csv)", cmd_regret},
      {"pipeline", "interact, estimate, train, evaluate", cmd_pipeline},
  };
  std::map<std::string, Command> by_name;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    by_name[name] = fn;
    if (name == "estimate")
      sub->add_option("--trajectories", inputs.trajectories, "trajectory store")
          ->required()
          ->check(CLI::ExistingFile);
    if (name == "train") {
      sub->add_option("--dataset", inputs.dataset, "labeled dataset")->check(CLI::ExistingFile);
      sub->add_option("--trajectories", inputs.trajectories,
                      "trajectory store (trajectory_bc, spag)")
          ->check(CLI::ExistingFile);
    }
    if (name == "evaluate" || name == "regret")
      sub->add_option("--policy", inputs.policy, "checkpoint to evaluate (default: init_policy)")
          ->check(CLI::ExistingFile);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  if (app.get_subcommands().empty() && !print_config) {
    err << "error: A subcommand is required\n\n" << app.help();
    return kExitUsage;
  }
  const std::string name =
      app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    cfg = apply_env(std::move(cfg), env);
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (!out_dir.empty()) cfg.out = out_dir;
    cfg.validate();
    if (name == "train" && inputs.dataset.empty() && inputs.trajectories.empty())
      throw ConfigError("train needs --dataset (or --trajectories for trajectory_bc / spag)");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (print_config) {
    out << to_ini(cfg);
    return kExitOk;
  }

  try {
    RunDir run(name, cfg, inputs);
    if (run.exists()) {
      out << fmt::format("run already complete: {}\n", run.final_path().string());
      return kExitOk;
    }
    const auto dir = run.begin();
    by_name.at(name)(cfg, inputs, dir, out);
    run.commit();
    out << fmt::format("run directory: {}\n", run.final_path().string());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace scopal
