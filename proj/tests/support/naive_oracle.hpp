// Direct, uncached reading of the satisfaction relation over raw GameData,
// used as an independent oracle. Plays are compared by their fields, states
// by name, and every quantifier is an explicit loop over the play list.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "blamelogic/game.hpp"
#include "blamelogic/syntax.hpp"

namespace oracle {

using blamelogic::Coalition;
using blamelogic::Connective;
using blamelogic::Formula;
using blamelogic::GameData;

inline bool same_class(const GameData& g, const std::string& agent, const std::string& s1, const std::string& s2) {
  auto it = g.indist.find(agent);
  if (it == g.indist.end()) return s1 == s2;
  for (const auto& block : it->second) {
    bool has1 = false, has2 = false;
    for (const auto& s : block) {
      has1 = has1 || s == s1;
      has2 = has2 || s == s2;
    }
    if (has1 || has2) return has1 && has2;
  }
  return false;
}

inline bool related(const GameData& g, const Coalition& c, const std::string& s1, const std::string& s2) {
  for (const auto& a : c)
    if (!same_class(g, a, s1, s2)) return false;
  return true;
}

inline bool holds(const GameData& g, std::size_t play, const Formula& f);

// Every profile of C, enumerated as a vector of maps.
inline std::vector<std::map<std::string, std::string>> profiles(const GameData& g, const Coalition& c) {
  std::vector<std::map<std::string, std::string>> out{{}};
  for (const auto& a : c) {
    std::vector<std::map<std::string, std::string>> next;
    for (const auto& partial : out)
      for (const auto& d : g.actions) {
        auto m = partial;
        m[a] = d;
        next.push_back(m);
      }
    out = std::move(next);
  }
  return out;
}

inline bool holds(const GameData& g, std::size_t play, const Formula& f) {
  const auto& here = g.plays[play];
  switch (f.kind()) {
    case Connective::Var: {
      auto it = g.valuation.find(f.name());
      return it != g.valuation.end() && it->second.count(play) > 0;
    }
    case Connective::Neg: return !holds(g, play, f.operand());
    case Connective::Implies: return !holds(g, play, f.lhs()) || holds(g, play, f.rhs());
    case Connective::Knows:
      for (std::size_t j = 0; j < g.plays.size(); ++j)
        if (related(g, f.coalition(), here.state, g.plays[j].state) && !holds(g, j, f.operand())) return false;
      return true;
    case Connective::Blames: {
      if (!holds(g, play, f.operand())) return false;
      for (const auto& s : profiles(g, f.coalition())) {
        bool prevents = true;
        for (std::size_t j = 0; j < g.plays.size() && prevents; ++j) {
          if (!related(g, f.coalition(), here.state, g.plays[j].state)) continue;
          bool agrees = true;
          for (const auto& [a, d] : s) agrees = agrees && g.plays[j].profile.at(a) == d;
          if (agrees && holds(g, j, f.operand())) prevents = false;
        }
        if (prevents) return true;
      }
      return false;
    }
  }
  return false;
}

// Whether strategy s of C satisfies the blame condition for f at play.
inline bool strategy_prevents(const GameData& g, std::size_t play, const Coalition& c,
                              const std::map<std::string, std::string>& s, const Formula& f) {
  for (std::size_t j = 0; j < g.plays.size(); ++j) {
    if (!related(g, c, g.plays[play].state, g.plays[j].state)) continue;
    bool agrees = true;
    for (const auto& [a, d] : s) agrees = agrees && g.plays[j].profile.at(a) == d;
    if (agrees && holds(g, j, f)) return false;
  }
  return true;
}

}  // namespace oracle
