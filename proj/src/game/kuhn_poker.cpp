#include <fmt/format.h>

#include "scopal/games.hpp"

namespace scopal {

namespace {

constexpr char kCardNames[] = {'J', 'Q', 'K'};

}  // namespace

KuhnPoker KuhnPoker::deal(Rng& rng) {
  KuhnPoker k;
  const auto first = static_cast<std::int8_t>(uniform_index(rng, 3));
  auto second = static_cast<std::int8_t>(uniform_index(rng, 2));
  if (second >= first) ++second;
  k.cards = {first, second};
  return k;
}

int KuhnPoker::history_index() const {
  switch (history_len) {
    case 0: return 0;
    case 1: return history[0] == kPass ? 1 : 2;
    case 2: return history[0] == kPass && history[1] == kBet ? 3 : -1;
    default: return -1;
  }
}

void KuhnPoker::legal_actions(Player mover, std::vector<Action>& out) const {
  out.clear();
  if (outcome(mover)) return;
  out.push_back({kPass});
  out.push_back({kBet});
}

std::optional<std::string> KuhnPoker::violation(Player mover, Action a) const {
  if (a.code != kPass && a.code != kBet) return fmt::format("action code {} is neither Pass nor Bet", a.code);
  if (outcome(mover)) return std::string("betting round is over");
  return std::nullopt;
}

void KuhnPoker::apply(Player, Action a) { history[history_len++] = static_cast<std::int8_t>(a.code); }

int KuhnPoker::p1_payoff() const {
  const int showdown = cards[0] > cards[1] ? 1 : -1;
  if (history_len == 2) {
    if (history[0] == kPass && history[1] == kPass) return showdown;
    if (history[0] == kBet && history[1] == kPass) return 1;  // P2 folds
    if (history[0] == kBet && history[1] == kBet) return 2 * showdown;
  }
  if (history_len == 3) {
    if (history[2] == kPass) return -1;  // P1 folds to the bet
    return 2 * showdown;
  }
  return 0;
}

std::optional<Outcome> KuhnPoker::outcome(Player) const {
  if (history_len < 2) return std::nullopt;
  if (history_len == 2 && history[0] == kPass && history[1] == kBet) return std::nullopt;
  return Outcome::win_for(p1_payoff() > 0 ? Player::P1 : Player::P2);
}

std::string KuhnPoker::notation(Action a) const { return a.code == kBet ? "<Bet>" : "<Pass>"; }

std::optional<Action> KuhnPoker::parse(std::string_view text) const {
  if (text == "<Pass>") return Action{kPass};
  if (text == "<Bet>") return Action{kBet};
  return std::nullopt;
}

void KuhnPoker::observe(Player viewer, std::string& out) const {
  out += "card=";
  out.push_back(kCardNames[cards[seat_index(viewer)]]);
  out += ";hist=";
  for (int i = 0; i < history_len; ++i) out.push_back(history[i] == kBet ? 'b' : 'p');
}

void KuhnPoker::resample_hidden(Player viewer, Rng& rng) {
  const auto mine = cards[seat_index(viewer)];
  auto other = static_cast<std::int8_t>(uniform_index(rng, 2));
  if (other >= mine) ++other;
  cards[seat_index(opponent(viewer))] = other;
}

}  // namespace scopal
