#pragma once

// Linear softmax policy over legal actions.
//
// logits(s, a) = theta_g . phi(s, a) with one parameter block per game g.
// At temperature t the action distribution is softmax(logits / t) restricted
// to the legal actions of s, in canonical order.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "scopal/features.hpp"
#include "scopal/game.hpp"

namespace scopal {

class Policy {
 public:
  /// theta = 0: uniform over legal actions in every game.
  explicit Policy(const GameOptions& options = {});

  const GameOptions& options() const { return options_; }

  std::size_t dimension() const { return theta_.size(); }
  std::span<const double> theta() const { return theta_; }
  std::span<double> theta() { return theta_; }

  std::size_t block_offset(GameId game) const { return offsets_[static_cast<int>(game)]; }
  int block_size(GameId game) const { return sizes_[static_cast<int>(game)]; }
  std::span<const double> block(GameId game) const {
    return std::span<const double>(theta_).subspan(block_offset(game), block_size(game));
  }

  /// Checkpoint counter; bumped by the trainer after each completed run.
  std::uint64_t version() const { return version_; }
  void set_version(std::uint64_t v) { version_ = v; }

  double logit(const Decision& decision, std::size_t index) const;

  /// Versioned text format; doubles are written in shortest round-trip form.
  std::string serialize() const;
  static Policy deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Policy load(const std::filesystem::path& path);

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  GameOptions options_;
  std::array<std::size_t, 6> offsets_{};
  std::array<int, 6> sizes_{};
  std::vector<double> theta_;
  std::uint64_t version_ = 0;
};

/// Throws std::invalid_argument when temperature <= 0.
std::vector<double> action_distribution(const Policy& policy, const Decision& decision,
                                        double temperature);
std::vector<double> action_distribution(const Policy& policy, const GameState& state,
                                        double temperature);

/// log pi(a_index | s) at the given temperature.
double log_prob(const Policy& policy, const Decision& decision, std::size_t index,
                double temperature);

/// Adds scale * d/dtheta log pi(a_index | s) into `grad` (full theta length)
/// and returns log pi(a_index | s).
double accumulate_log_prob_grad(const Policy& policy, const Decision& decision,
                                std::size_t index, double temperature, double scale,
                                std::span<double> grad);

struct LogProbGrad {
  double log_prob = 0.0;
  std::vector<double> grad;  // full theta length, zero outside the game block
};

/// Throws GameError when `action` is not legal in `state`.
LogProbGrad log_prob_and_grad(const Policy& policy, const GameState& state, Action action,
                              double temperature);

Action sample_action(const Policy& policy, const Decision& decision, double temperature,
                     std::uint64_t seed);
Action sample_action(const Policy& policy, const GameState& state, double temperature,
                     std::uint64_t seed);

}  // namespace scopal
