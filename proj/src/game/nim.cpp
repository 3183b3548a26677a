#include <charconv>

#include <fmt/format.h>

#include "scopal/games.hpp"

namespace scopal {

int Nim::total() const {
  int n = 0;
  for (auto p : piles) n += p;
  return n;
}

int Nim::nim_sum() const {
  int x = 0;
  for (auto p : piles) x ^= p;
  return x;
}

void Nim::legal_actions(Player, std::vector<Action>& out) const {
  out.clear();
  for (int p = 0; p < 4; ++p)
    for (int take = 1; take <= piles[p]; ++take) out.push_back({encode(p, take)});
}

std::optional<std::string> Nim::violation(Player, Action a) const {
  const int pile = pile_of(a);
  const int take = take_of(a);
  if (a.code < 0 || pile >= 4) return fmt::format("pile {} does not exist", pile + 1);
  if (take > piles[pile])
    return fmt::format("cannot take {} from pile {} holding {} match(es)", take, pile + 1, piles[pile]);
  return std::nullopt;
}

void Nim::apply(Player, Action a) { piles[pile_of(a)] -= static_cast<std::int8_t>(take_of(a)); }

std::optional<Outcome> Nim::outcome(Player to_move) const {
  if (total() > 0) return std::nullopt;
  // Misere: the player who took the last match (the previous mover) loses.
  return Outcome::win_for(to_move);
}

std::string Nim::notation(Action a) const {
  return fmt::format("<pile:{}, take:{}>", pile_of(a) + 1, take_of(a));
}

std::optional<Action> Nim::parse(std::string_view text) const {
  constexpr std::string_view kHead = "<pile:";
  constexpr std::string_view kMid = ", take:";
  if (!text.starts_with(kHead) || !text.ends_with(">")) return std::nullopt;
  const auto mid = text.find(kMid);
  if (mid == std::string_view::npos) return std::nullopt;
  const auto ps = text.substr(kHead.size(), mid - kHead.size());
  const auto ts = text.substr(mid + kMid.size(), text.size() - 1 - mid - kMid.size());
  int pile = 0, take = 0;
  if (std::from_chars(ps.data(), ps.data() + ps.size(), pile).ptr != ps.data() + ps.size()) return std::nullopt;
  if (std::from_chars(ts.data(), ts.data() + ts.size(), take).ptr != ts.data() + ts.size()) return std::nullopt;
  if (pile < 1 || pile > 4 || take < 1 || take > 7) return std::nullopt;
  return Action{encode(pile - 1, take)};
}

void Nim::observe(Player, std::string& out) const {
  for (int p = 0; p < 4; ++p) {
    if (p > 0) out.push_back(',');
    out += std::to_string(piles[p]);
  }
}

}  // namespace scopal
