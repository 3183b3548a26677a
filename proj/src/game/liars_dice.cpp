#include <charconv>

#include <fmt/format.h>

#include "scopal/games.hpp"

namespace scopal {

LiarsDice LiarsDice::roll(Rng& rng) {
  LiarsDice d;
  d.dice[0] = static_cast<std::int8_t>(uniform_index(rng, kFaces) + 1);
  d.dice[1] = static_cast<std::int8_t>(uniform_index(rng, kFaces) + 1);
  return d;
}

int LiarsDice::last_bid() const {
  for (int i = history_len - 1; i >= 0; --i)
    if (history[i] != kChallenge) return history[i];
  return -1;
}

void LiarsDice::legal_actions(Player, std::vector<Action>& out) const {
  out.clear();
  if (challenged()) return;
  const int last = last_bid();
  for (int bid = last + 1; bid < kBids; ++bid) out.push_back({bid});
  if (last >= 0) out.push_back({kChallenge});
}

std::optional<std::string> LiarsDice::violation(Player, Action a) const {
  if (challenged()) return std::string("the last bid was already challenged");
  if (a.code == kChallenge) {
    if (last_bid() < 0) return std::string("cannot call liar before any bid");
    return std::nullopt;
  }
  if (a.code < 0 || a.code >= kBids) return fmt::format("bid code {} does not exist", a.code);
  if (a.code <= last_bid())
    return fmt::format("{} does not raise {}: raise the quantity, or keep it and raise the face",
                       notation(a), notation(Action{last_bid()}));
  return std::nullopt;
}

void LiarsDice::apply(Player, Action a) { history[history_len++] = static_cast<std::int8_t>(a.code); }

std::optional<Outcome> LiarsDice::outcome(Player to_move) const {
  if (!challenged()) return std::nullopt;
  // The challenger just moved, so it is the opponent of the player to move.
  const Player challenger = opponent(to_move);
  const Player bidder = to_move;
  const int bid = last_bid();
  int count = 0;
  for (auto d : dice) count += d == face(bid);
  // An exact or understated bid defeats the challenger.
  return Outcome::win_for(count >= quantity(bid) ? bidder : challenger);
}

std::string LiarsDice::notation(Action a) const {
  if (a.code == kChallenge) return "<Liar>";
  return fmt::format("<{} dices, {} value>", quantity(a.code), face(a.code));
}

std::optional<Action> LiarsDice::parse(std::string_view text) const {
  if (text == "<Liar>") return Action{kChallenge};
  constexpr std::string_view kMid = " dices, ";
  constexpr std::string_view kEnd = " value>";
  if (text.size() < 2 || text.front() != '<' || !text.ends_with(kEnd)) return std::nullopt;
  const auto mid = text.find(kMid);
  if (mid == std::string_view::npos) return std::nullopt;
  int q = 0, f = 0;
  const auto qs = text.substr(1, mid - 1);
  const auto fs = text.substr(mid + kMid.size(), text.size() - kEnd.size() - mid - kMid.size());
  if (std::from_chars(qs.data(), qs.data() + qs.size(), q).ptr != qs.data() + qs.size()) return std::nullopt;
  if (std::from_chars(fs.data(), fs.data() + fs.size(), f).ptr != fs.data() + fs.size()) return std::nullopt;
  if (q < 1 || q > kDice || f < 1 || f > kFaces) return std::nullopt;
  return Action{(q - 1) * kFaces + (f - 1)};
}

void LiarsDice::observe(Player viewer, std::string& out) const {
  out += "die=";
  out.push_back(static_cast<char>('0' + dice[seat_index(viewer)]));
  out += ";bids=";
  for (int i = 0; i < history_len; ++i) {
    if (i > 0) out.push_back(',');
    out += history[i] == kChallenge ? std::string("L") : std::to_string(history[i]);
  }
}

void LiarsDice::resample_hidden(Player viewer, Rng& rng) {
  dice[seat_index(opponent(viewer))] = static_cast<std::int8_t>(uniform_index(rng, kFaces) + 1);
}

}  // namespace scopal
