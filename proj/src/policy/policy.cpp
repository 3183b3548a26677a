#include "scopal/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace scopal {

namespace {

constexpr std::string_view kMagic = "scopal-policy";
constexpr int kFormatVersion = 1;

void check_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw std::invalid_argument(fmt::format("temperature must be positive, got {}", temperature));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error(fmt::format("checkpoint: bad number '{}'", s));
  return v;
}

}  // namespace

Policy::Policy(const GameOptions& options) : options_(options) {
  std::size_t offset = 0;
  for (int g = 0; g < 6; ++g) {
    offsets_[g] = offset;
    sizes_[g] = feature_dimension(static_cast<GameId>(g), options);
    offset += static_cast<std::size_t>(sizes_[g]);
  }
  theta_.assign(offset, 0.0);
}

double Policy::logit(const Decision& decision, std::size_t index) const {
  const auto w = block(decision.game);
  if (static_cast<int>(w.size()) != decision.dim)
    throw GameError(fmt::format("{} decision has {} features but the policy block has {}",
                                game_name(decision.game), decision.dim, w.size()));
  return decision.dot(index, w);
}

std::vector<double> action_distribution(const Policy& policy, const Decision& decision,
                                        double temperature) {
  check_temperature(temperature);
  std::vector<double> p(decision.size());
  double max_z = -INFINITY;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = policy.logit(decision, i) / temperature;
    max_z = std::max(max_z, p[i]);
  }
  double sum = 0.0;
  for (auto& v : p) {
    v = std::exp(v - max_z);
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> action_distribution(const Policy& policy, const GameState& state,
                                        double temperature) {
  check_temperature(temperature);
  return action_distribution(policy, make_decision(state), temperature);
}

double log_prob(const Policy& policy, const Decision& decision, std::size_t index,
                double temperature) {
  check_temperature(temperature);
  double max_z = -INFINITY;
  std::vector<double> z(decision.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = policy.logit(decision, i) / temperature;
    max_z = std::max(max_z, z[i]);
  }
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - max_z);
  return z[index] - max_z - std::log(sum);
}

double accumulate_log_prob_grad(const Policy& policy, const Decision& decision,
                                std::size_t index, double temperature, double scale,
                                std::span<double> grad) {
  const auto p = action_distribution(policy, decision, temperature);
  const std::size_t offset = policy.block_offset(decision.game);
  // d log pi(a) / d theta = (phi(a) - E_pi[phi]) / t
  const double s = scale / temperature;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double coeff = s * ((i == index ? 1.0 : 0.0) - p[i]);
    if (coeff == 0.0) continue;
    decision.add_row(i, coeff, grad.subspan(offset, static_cast<std::size_t>(decision.dim)));
  }
  return std::log(p[index]);
}

LogProbGrad log_prob_and_grad(const Policy& policy, const GameState& state, Action action,
                              double temperature) {
  check_temperature(temperature);
  if (!is_legal(state, action))
    throw GameError(fmt::format("{} is not legal here", action_to_string(state, action)));
  const auto decision = make_decision(state);
  const auto index = *decision.index_of(action);
  LogProbGrad out;
  out.grad.assign(policy.dimension(), 0.0);
  accumulate_log_prob_grad(policy, decision, index, temperature, 1.0, out.grad);
  out.log_prob = log_prob(policy, decision, index, temperature);
  return out;
}

Action sample_action(const Policy& policy, const Decision& decision, double temperature,
                     std::uint64_t seed) {
  const auto p = action_distribution(policy, decision, temperature);
  Rng rng(seed);
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return decision.actions[i];
  }
  return decision.actions.back();
}

Action sample_action(const Policy& policy, const GameState& state, double temperature,
                     std::uint64_t seed) {
  check_temperature(temperature);
  const auto actions = legal_actions(state);
  if (actions.size() == 1) return actions.front();
  return sample_action(policy, make_decision(state), temperature, seed);
}

std::string Policy::serialize() const {
  std::string out;
  out += fmt::format("{} {}\n", kMagic, kFormatVersion);
  out += fmt::format("version {}\n", version_);
  out += fmt::format("breakthrough_board {} {}\n", options_.breakthrough_width,
                     options_.breakthrough_height);
  for (int g = 0; g < 6; ++g) {
    out += fmt::format("block {} {}\n", game_name(static_cast<GameId>(g)), sizes_[g]);
    for (int k = 0; k < sizes_[g]; ++k) {
      out += format_double(theta_[offsets_[g] + static_cast<std::size_t>(k)]);
      out.push_back('\n');
    }
  }
  out += "end\n";
  return out;
}

Policy Policy::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  int format = 0;
  if (!(in >> word >> format) || word != kMagic || format != kFormatVersion)
    throw std::runtime_error("checkpoint: missing or unsupported header");
  std::uint64_t version = 0;
  if (!(in >> word >> version) || word != "version")
    throw std::runtime_error("checkpoint: missing version line");
  GameOptions options;
  if (!(in >> word >> options.breakthrough_width >> options.breakthrough_height) ||
      word != "breakthrough_board")
    throw std::runtime_error("checkpoint: missing breakthrough_board line");
  Policy policy(options);
  policy.version_ = version;
  for (int g = 0; g < 6; ++g) {
    std::string name;
    int size = 0;
    if (!(in >> word >> name >> size) || word != "block")
      throw std::runtime_error("checkpoint: missing block header");
    const auto game = parse_game(name);
    if (size != policy.block_size(game))
      throw std::runtime_error(fmt::format("checkpoint: block {} has {} values, expected {}",
                                           name, size, policy.block_size(game)));
    for (int k = 0; k < size; ++k) {
      if (!(in >> word)) throw std::runtime_error("checkpoint: truncated block");
      policy.theta_[policy.block_offset(game) + static_cast<std::size_t>(k)] = parse_double(word);
    }
  }
  if (!(in >> word) || word != "end") throw std::runtime_error("checkpoint: missing end marker");
  return policy;
}

void Policy::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write checkpoint {}", path.string()));
  out << serialize();
  if (!out) throw std::runtime_error(fmt::format("failed writing checkpoint {}", path.string()));
}

Policy Policy::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read checkpoint {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace scopal
