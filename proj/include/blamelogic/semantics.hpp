// Truth of formulas at plays of a finite game.
//
//   p        holds at plays in the valuation of p
//   ~f, f->g classical
//   K_C f    f holds at every play whose initial state is C-indistinguishable
//            from the current one
//   B_C f    f holds here, and some action profile s of C makes f false at
//            every play whose initial state is C-indistinguishable from the
//            current one and whose profile agrees with s on C
//
// Evaluation is bottom-up over whole extensions (one bit per play), cached per
// Evaluator. Both modalities depend on the play only through its initial
// state, so they are computed once per state.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "blamelogic/error.hpp"
#include "blamelogic/game.hpp"
#include "blamelogic/syntax.hpp"

namespace blamelogic {

using PlaySet = std::vector<bool>;

namespace detail {

// Test-only mutation seam: replaces the relation used for the empty
// coalition. Never set outside of mutation tests.
enum class EmptyCoalitionRelation : std::uint8_t { Universal, Identity, Nothing };

}  // namespace detail

struct EvalOptions {
  // Largest |actions|^|C| a single B_C may enumerate.
  std::uint64_t strategy_cap = 1'000'000;
  detail::EmptyCoalitionRelation empty_relation = detail::EmptyCoalitionRelation::Universal;
};

class Evaluator {
 public:
  explicit Evaluator(const Game& g, EvalOptions opts = {}) : game_(g), opts_(opts) {}

  const Game& game() const noexcept { return game_; }

  const PlaySet& extension_bits(const Formula& f) {
    check_agents(f);
    return compute(f);
  }

  bool evaluate(std::size_t play, const Formula& f) {
    check_play(play);
    return extension_bits(f)[play];
  }

  bool evaluate(const Play& play, const Formula& f) {
    auto ix = game_.find_play(play);
    if (!ix) throw PlayNotInGame("play is not in the game");
    return extension_bits(f)[*ix];
  }

  std::vector<std::size_t> extension(const Formula& f) {
    const PlaySet& bits = extension_bits(f);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) out.push_back(i);
    return out;
  }

  bool is_valid(const Formula& f) {
    const PlaySet& bits = extension_bits(f);
    for (bool b : bits)
      if (!b) return false;
    return true;
  }

  // Smallest strategy of c (first sorted member most significant, actions in
  // declared order) witnessing B_c f at the play, or nothing when B_c f is
  // false there.
  std::optional<Strategy> blame_witness(std::size_t play, const Coalition& c, const Formula& f) {
    check_play(play);
    check_agents(Formula::blames(c, f));
    if (!compute(f)[play]) return std::nullopt;
    const std::vector<std::size_t> members = member_indices(c);
    std::vector<char> preventing = preventing_strategies(game_.state_of(play), members, compute(f));
    for (std::size_t code = 0; code < preventing.size(); ++code) {
      if (!preventing[code]) continue;
      Strategy s{c, {}};
      std::size_t rest = code;
      for (std::size_t k = members.size(); k-- > 0;) {
        s.choice[game_.agents()[members[k]]] = game_.actions()[rest % game_.num_actions()];
        rest /= game_.num_actions();
      }
      return s;
    }
    return std::nullopt;
  }

  // Every play satisfying all hypotheses satisfies f.
  bool entails(std::span<const Formula> hypotheses, const Formula& f) {
    for (const auto& h : hypotheses) check_agents(h);
    const PlaySet& goal = extension_bits(f);
    for (std::size_t i = 0; i < game_.num_plays(); ++i) {
      bool all = true;
      for (const auto& h : hypotheses)
        if (!compute(h)[i]) {
          all = false;
          break;
        }
      if (all && !goal[i]) return false;
    }
    return true;
  }

 private:
  void check_play(std::size_t play) const {
    if (play >= game_.num_plays())
      throw PlayNotInGame("play index out of range: " + std::to_string(play) + " (game has " +
                          std::to_string(game_.num_plays()) + " plays)");
  }

  void check_agents(const Formula& f) const {
    for (const auto& a : agents_of(f))
      if (!game_.agent_index(a)) throw UnknownAgent(a);
  }

  std::vector<std::size_t> member_indices(const Coalition& c) const {
    std::vector<std::size_t> out;
    for (const auto& a : c) out.push_back(*game_.agent_index(a));
    return out;
  }

  bool related(const std::vector<std::size_t>& members, std::size_t s1, std::size_t s2) const {
    if (members.empty()) {
      switch (opts_.empty_relation) {
        case detail::EmptyCoalitionRelation::Universal: return true;
        case detail::EmptyCoalitionRelation::Identity: return s1 == s2;
        case detail::EmptyCoalitionRelation::Nothing: return false;
      }
    }
    for (std::size_t a : members)
      if (!game_.same_block(a, s1, s2)) return false;
    return true;
  }

  std::size_t strategy_count(std::size_t coalition_size) const {
    std::uint64_t n = 1;
    const std::uint64_t base = game_.num_actions();
    for (std::size_t k = 0; k < coalition_size; ++k) {
      if (n > opts_.strategy_cap / base)
        throw BudgetExceeded("B over a coalition of " + std::to_string(coalition_size) +
                             " agents would enumerate more than " + std::to_string(opts_.strategy_cap) +
                             " strategies");
      n *= base;
    }
    return static_cast<std::size_t>(n);
  }

  // preventing[code] is true when no play C-related to `state` that agrees
  // with strategy `code` on C satisfies `inner`.
  std::vector<char> preventing_strategies(std::size_t state, const std::vector<std::size_t>& members,
                                          const PlaySet& inner) const {
    std::vector<char> preventing(strategy_count(members.size()), 1);
    for (std::size_t other = 0; other < game_.num_states(); ++other) {
      if (!related(members, state, other)) continue;
      for (std::size_t j : game_.plays_at(other)) {
        if (!inner[j]) continue;
        std::size_t code = 0;
        for (std::size_t a : members) code = code * game_.num_actions() + game_.action_of(j, a);
        preventing[code] = 0;
      }
    }
    return preventing;
  }

  const PlaySet& compute(const Formula& f) {
    if (auto it = cache_.find(f); it != cache_.end()) return it->second;
    const std::size_t n = game_.num_plays();
    PlaySet out(n);
    switch (f.kind()) {
      case Connective::Var:
        for (std::size_t i = 0; i < n; ++i) out[i] = game_.holds(f.name(), i);
        break;
      case Connective::Neg: {
        const PlaySet& a = compute(f.operand());
        for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
        break;
      }
      case Connective::Implies: {
        const PlaySet& a = compute(f.lhs());
        const PlaySet& b = compute(f.rhs());
        for (std::size_t i = 0; i < n; ++i) out[i] = !a[i] || b[i];
        break;
      }
      case Connective::Knows: {
        const PlaySet& a = compute(f.operand());
        const auto members = member_indices(f.coalition());
        for (std::size_t s = 0; s < game_.num_states(); ++s) {
          bool known = true;
          for (std::size_t other = 0; other < game_.num_states() && known; ++other) {
            if (!related(members, s, other)) continue;
            for (std::size_t j : game_.plays_at(other))
              if (!a[j]) {
                known = false;
                break;
              }
          }
          for (std::size_t i : game_.plays_at(s)) out[i] = known;
        }
        break;
      }
      case Connective::Blames: {
        const PlaySet& a = compute(f.operand());
        const auto members = member_indices(f.coalition());
        strategy_count(members.size());
        for (std::size_t s = 0; s < game_.num_states(); ++s) {
          bool any_true = false;
          for (std::size_t i : game_.plays_at(s)) any_true = any_true || a[i];
          if (!any_true) continue;
          const auto preventing = preventing_strategies(s, members, a);
          bool can_prevent = false;
          for (char c : preventing) can_prevent = can_prevent || c;
          for (std::size_t i : game_.plays_at(s)) out[i] = a[i] && can_prevent;
        }
        break;
      }
    }
    return cache_.emplace(f, std::move(out)).first->second;
  }

  const Game& game_;
  EvalOptions opts_;
  std::unordered_map<Formula, PlaySet, FormulaHash> cache_;
};

// ---------------------------------------------------------------------------
// One-shot conveniences.

inline bool evaluate(const Game& g, std::size_t play, const Formula& f) { return Evaluator(g).evaluate(play, f); }
inline bool evaluate(const Game& g, const Play& play, const Formula& f) { return Evaluator(g).evaluate(play, f); }
inline std::vector<std::size_t> extension(const Game& g, const Formula& f) { return Evaluator(g).extension(f); }
inline bool is_valid(const Game& g, const Formula& f) { return Evaluator(g).is_valid(f); }
inline std::optional<Strategy> blame_witness(const Game& g, std::size_t play, const Coalition& c,
                                             const Formula& f) {
  return Evaluator(g).blame_witness(play, c, f);
}
inline std::optional<Strategy> blame_witness(const Game& g, const Play& play, const Coalition& c,
                                             const Formula& f) {
  auto ix = g.find_play(play);
  if (!ix) throw PlayNotInGame("play is not in the game");
  return Evaluator(g).blame_witness(*ix, c, f);
}
inline bool semantic_entailment(const Game& g, std::span<const Formula> hypotheses, const Formula& f) {
  return Evaluator(g).entails(hypotheses, f);
}

}  // namespace blamelogic
