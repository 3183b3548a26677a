#include "scopal/mcts.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace scopal {

namespace {

double score_for(const Outcome& o, Player p) {
  switch (o.of(p)) {
    case Result::Win: return 1.0;
    case Result::Tie: return 0.5;
    case Result::Lose: return 0.0;
  }
  return 0.5;
}

}  // namespace

double uct_score(const SearchNode& node, int parent_visits, double c) {
  if (node.visits == 0) return std::numeric_limits<double>::infinity();
  const double n = node.visits;
  return node.wins / n + c * std::sqrt(std::log(static_cast<double>(parent_visits)) / n);
}

MctsSearch::MctsSearch(const GameState& root, const MctsConfig& config)
    : root_state_(root), config_(config), rng_(config.rng_seed) {
  if (config.max_simulations < 1) throw GameError("mcts: max_simulations must be >= 1");
  if (config.rollout_count < 1) throw GameError("mcts: rollout_count must be >= 1");
  SearchNode r;
  r.mover = root.to_move();
  r.untried = legal_actions(root);
  r.terminal = r.untried.empty();
  nodes_.push_back(std::move(r));
}

void MctsSearch::run() {
  for (int i = 0; i < config_.max_simulations; ++i) {
    GameState s = has_hidden_information(root_state_.game())
                      ? determinize(root_state_, root_state_.to_move(), rng_)
                      : root_state_;
    root_score_total_ += simulate(std::move(s));
  }
}

// One select / expand / rollout / backpropagate pass. Returns the score for
// the root mover.
double MctsSearch::simulate(GameState state) {
  int node = 0;
  // Selection.
  while (nodes_[node].untried.empty() && !nodes_[node].children.empty()) {
    const int parent_visits = nodes_[node].visits;
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int child : nodes_[node].children) {
      const double score = uct_score(nodes_[child], parent_visits, config_.exploration_c);
      if (score > best_score) {
        best_score = score;
        best = child;
      }
    }
    state = apply_action(state, nodes_[best].action);
    node = best;
  }

  // Expansion.
  if (!nodes_[node].untried.empty()) {
    auto& untried = nodes_[node].untried;
    const auto pick = uniform_index(rng_, untried.size());
    const Action a = untried[pick];
    untried.erase(untried.begin() + static_cast<std::ptrdiff_t>(pick));
    SearchNode child;
    child.action = a;
    child.mover = state.to_move();
    child.parent = node;
    state = apply_action(state, a);
    child.untried = legal_actions(state);
    child.terminal = child.untried.empty();
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(child));
    nodes_[node].children.push_back(index);
    node = index;
  }

  // Simulation, scored for P1 and converted per node below.
  double p1_score = 0.0;
  for (int r = 0; r < config_.rollout_count; ++r) p1_score += rollout(state, Player::P1);
  p1_score /= config_.rollout_count;

  // Backpropagation.
  const Player root_mover = nodes_.front().mover;
  for (int n = node; n >= 0; n = nodes_[n].parent) {
    auto& sn = nodes_[n];
    ++sn.visits;
    sn.wins += sn.mover == Player::P1 ? p1_score : 1.0 - p1_score;
  }
  return root_mover == Player::P1 ? p1_score : 1.0 - p1_score;
}

double MctsSearch::rollout(GameState state, Player perspective) {
  while (true) {
    if (auto o = terminal_outcome(state)) return score_for(*o, perspective);
    legal_actions(state, buffer_);
    state = apply_action(state, buffer_[uniform_index(rng_, buffer_.size())]);
  }
}

Action MctsSearch::best_action() const {
  const auto& root = nodes_.front();
  if (root.children.empty()) throw GameError("mcts: search has no expanded moves");
  int best = root.children.front();
  for (int child : root.children) {
    const auto& c = nodes_[child];
    const auto& b = nodes_[best];
    if (c.visits > b.visits || (c.visits == b.visits && c.action < b.action)) best = child;
  }
  return nodes_[best].action;
}

Action mcts_act(const GameState& state, const MctsConfig& config) {
  const auto actions = legal_actions(state);
  if (actions.empty())
    throw GameError(fmt::format("mcts_act called on a terminal {} state", game_name(state.game())));
  if (actions.size() == 1) return actions.front();
  MctsSearch search(state, config);
  search.run();
  return search.best_action();
}

Action random_act(const GameState& state, std::uint64_t seed) {
  const auto actions = legal_actions(state);
  if (actions.empty())
    throw GameError(fmt::format("random_act called on a terminal {} state", game_name(state.game())));
  Rng rng(seed);
  return actions[uniform_index(rng, actions.size())];
}

}  // namespace scopal
