// Finite strategic games with imperfect information.
//
// GameData is the plain description as read from a file: it may be invalid.
// Game wraps a GameData that passed validate_game together with index tables
// used by the evaluator; it cannot be constructed from invalid data.

#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "blamelogic/error.hpp"
#include "blamelogic/syntax.hpp"

namespace blamelogic {

using StateId = std::string;
using ActionId = std::string;
using OutcomeId = std::string;

struct Play {
  StateId state;
  std::map<Agent, ActionId> profile;
  OutcomeId outcome;

  friend bool operator==(const Play&, const Play&) = default;
};

// An action profile of a coalition: one action per member.
struct Strategy {
  Coalition coalition;
  std::map<Agent, ActionId> choice;

  friend bool operator==(const Strategy&, const Strategy&) = default;

  std::string to_string() const {
    std::string s;
    for (const auto& [agent, action] : choice) {
      if (!s.empty()) s += ", ";
      s += agent + " ↦ " + action;
    }
    return s;
  }
};

struct GameData {
  std::vector<Agent> agents;
  std::vector<StateId> states;
  // Agents absent from this map have perfect information (singleton blocks).
  std::map<Agent, std::vector<std::vector<StateId>>> indist;
  std::vector<ActionId> actions;
  std::vector<OutcomeId> outcomes;
  std::vector<Play> plays;
  std::map<std::string, std::set<std::size_t>> valuation;

  friend bool operator==(const GameData&, const GameData&) = default;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  NoAgents,
  BadAgent,
  NoStates,
  DuplicateState,
  UnknownIndistAgent,
  NotAPartition,
  NoActions,
  DuplicateAction,
  NoOutcomes,
  DuplicateOutcome,
  BadPlay,
  DuplicatePlay,
  TotalityViolated,
  BadValuation,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind k) const {
    for (const auto& v : violations)
      if (v.kind == k) return true;
    return false;
  }
};

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report)
      : Error(summarize(report)), report_(std::move(report)) {}
  const ValidationReport& report() const noexcept { return report_; }

 private:
  static std::string summarize(const ValidationReport& r) {
    std::string s = "invalid game";
    for (const auto& v : r.violations) s += "\n  " + v.message;
    return s;
  }
  ValidationReport report_;
};

namespace detail {

inline std::string profile_text(const std::vector<Agent>& agents, const std::vector<ActionId>& actions,
                                const std::vector<std::size_t>& code) {
  std::string s = "{";
  for (std::size_t k = 0; k < agents.size(); ++k) {
    if (k) s += ", ";
    s += agents[k] + ": " + actions[code[k]];
  }
  return s + "}";
}

// Advances an odometer over [0, radix)^n, last digit fastest. False on wrap.
inline bool next_code(std::vector<std::size_t>& code, std::size_t radix) {
  for (std::size_t k = code.size(); k-- > 0;) {
    if (++code[k] < radix) return true;
    code[k] = 0;
  }
  return false;
}

template <typename T>
void check_unique(const std::vector<T>& items, const char* what, ViolationKind kind,
                  ValidationReport& r) {
  std::set<T> seen;
  for (const auto& x : items)
    if (!seen.insert(x).second)
      r.violations.push_back({kind, std::string("duplicate ") + what + " '" + x + "'"});
}

}  // namespace detail

inline ValidationReport validate_game(const GameData& g) {
  ValidationReport r;
  auto add = [&r](ViolationKind k, std::string m) { r.violations.push_back({k, std::move(m)}); };

  if (g.agents.empty()) add(ViolationKind::NoAgents, "agents must be nonempty");
  for (const auto& a : g.agents)
    if (!is_identifier(a)) add(ViolationKind::BadAgent, "agent name '" + a + "' is not an identifier");
  detail::check_unique(g.agents, "agent", ViolationKind::BadAgent, r);

  if (g.states.empty()) add(ViolationKind::NoStates, "states must be nonempty");
  detail::check_unique(g.states, "state", ViolationKind::DuplicateState, r);
  const std::set<StateId> states(g.states.begin(), g.states.end());
  const std::set<Agent> agents(g.agents.begin(), g.agents.end());

  for (const auto& [agent, blocks] : g.indist) {
    if (!agents.count(agent)) {
      add(ViolationKind::UnknownIndistAgent, "indist names unknown agent '" + agent + "'");
      continue;
    }
    std::map<StateId, std::size_t> block_of;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].empty())
        add(ViolationKind::NotAPartition,
            "indist for '" + agent + "' is not a partition: block " + std::to_string(b) + " is empty");
      for (const auto& s : blocks[b]) {
        if (!states.count(s)) {
          add(ViolationKind::NotAPartition,
              "indist for '" + agent + "' is not a partition: unknown state '" + s + "'");
          continue;
        }
        auto [it, fresh] = block_of.emplace(s, b);
        if (!fresh)
          add(ViolationKind::NotAPartition, "indist for '" + agent +
                                                "' is not a partition: state '" + s +
                                                "' appears in blocks " + std::to_string(it->second) +
                                                " and " + std::to_string(b));
      }
    }
    for (const auto& s : g.states)
      if (!block_of.count(s))
        add(ViolationKind::NotAPartition,
            "indist for '" + agent + "' is not a partition: state '" + s + "' is in no block");
  }

  if (g.actions.empty()) add(ViolationKind::NoActions, "actions must be nonempty");
  detail::check_unique(g.actions, "action", ViolationKind::DuplicateAction, r);
  if (g.outcomes.empty()) add(ViolationKind::NoOutcomes, "outcomes must be nonempty");
  detail::check_unique(g.outcomes, "outcome", ViolationKind::DuplicateOutcome, r);

  const std::set<ActionId> actions(g.actions.begin(), g.actions.end());
  const std::set<OutcomeId> outcomes(g.outcomes.begin(), g.outcomes.end());
  std::set<std::pair<StateId, std::map<Agent, ActionId>>> covered;
  std::set<OutcomeId> used_outcomes;
  for (std::size_t i = 0; i < g.plays.size(); ++i) {
    const Play& p = g.plays[i];
    const std::string where = "play " + std::to_string(i) + ": ";
    bool ok = true;
    if (!states.count(p.state)) {
      add(ViolationKind::BadPlay, where + "unknown state '" + p.state + "'");
      ok = false;
    }
    if (!outcomes.count(p.outcome)) {
      add(ViolationKind::BadPlay, where + "unknown outcome '" + p.outcome + "'");
      ok = false;
    }
    for (const auto& [agent, action] : p.profile) {
      if (!agents.count(agent)) {
        add(ViolationKind::BadPlay, where + "profile names unknown agent '" + agent + "'");
        ok = false;
      }
      if (!actions.count(action)) {
        add(ViolationKind::BadPlay, where + "unknown action '" + action + "'");
        ok = false;
      }
    }
    for (const auto& a : g.agents)
      if (!p.profile.count(a)) {
        add(ViolationKind::BadPlay, where + "profile has no action for agent '" + a + "'");
        ok = false;
      }
    for (std::size_t j = 0; j < i; ++j)
      if (g.plays[j] == p) {
        add(ViolationKind::DuplicatePlay, where + "duplicates play " + std::to_string(j));
        break;
      }
    if (ok) {
      covered.emplace(p.state, p.profile);
      used_outcomes.insert(p.outcome);
    }
  }

  if (!g.actions.empty() && !g.agents.empty()) {
    for (const auto& s : g.states) {
      std::vector<std::size_t> code(g.agents.size(), 0);
      do {
        std::map<Agent, ActionId> profile;
        for (std::size_t k = 0; k < g.agents.size(); ++k) profile[g.agents[k]] = g.actions[code[k]];
        if (!covered.count({s, profile}))
          add(ViolationKind::TotalityViolated,
              "totality violated at (" + s + ", " + detail::profile_text(g.agents, g.actions, code) + ")");
      } while (detail::next_code(code, g.actions.size()));
    }
  }

  for (const auto& [var, indices] : g.valuation) {
    if (!is_identifier(var))
      add(ViolationKind::BadValuation, "valuation key '" + var + "' is not an identifier");
    for (std::size_t i : indices)
      if (i >= g.plays.size())
        add(ViolationKind::BadValuation, "valuation index out of range: '" + var + "' -> " +
                                             std::to_string(i) + " (" + std::to_string(g.plays.size()) +
                                             " plays)");
  }

  for (const auto& o : g.outcomes)
    if (!used_outcomes.count(o)) r.warnings.push_back("outcome '" + o + "' appears in no play");
  return r;
}

// ---------------------------------------------------------------------------
// Game

class Game {
 public:
  explicit Game(GameData data) : data_(std::move(data)) {
    ValidationReport r = validate_game(data_);
    if (!r.ok()) throw ValidationError(std::move(r));
    build_index();
  }

  const GameData& data() const noexcept { return data_; }
  const std::vector<Agent>& agents() const noexcept { return data_.agents; }
  const std::vector<StateId>& states() const noexcept { return data_.states; }
  const std::vector<ActionId>& actions() const noexcept { return data_.actions; }
  const std::vector<Play>& plays() const noexcept { return data_.plays; }
  std::size_t num_plays() const noexcept { return data_.plays.size(); }
  std::size_t num_states() const noexcept { return data_.states.size(); }
  std::size_t num_actions() const noexcept { return data_.actions.size(); }

  std::optional<std::size_t> agent_index(std::string_view a) const { return lookup(agent_ix_, a); }
  std::optional<std::size_t> state_index(std::string_view s) const { return lookup(state_ix_, s); }
  std::optional<std::size_t> action_index(std::string_view d) const { return lookup(action_ix_, d); }
  std::optional<std::size_t> find_play(const Play& p) const {
    for (std::size_t i = 0; i < data_.plays.size(); ++i)
      if (data_.plays[i] == p) return i;
    return std::nullopt;
  }

  std::size_t state_of(std::size_t play) const { return play_state_[play]; }
  // Action index taken by agent index `agent` in the play.
  std::size_t action_of(std::size_t play, std::size_t agent) const {
    return play_action_[play * data_.agents.size() + agent];
  }
  const std::vector<std::size_t>& plays_at(std::size_t state) const { return plays_at_[state]; }
  bool same_block(std::size_t agent, std::size_t s1, std::size_t s2) const {
    return block_[agent][s1] == block_[agent][s2];
  }
  bool holds(const std::string& var, std::size_t play) const {
    auto it = data_.valuation.find(var);
    return it != data_.valuation.end() && it->second.count(play);
  }

  friend bool operator==(const Game& a, const Game& b) { return a.data_ == b.data_; }

 private:
  using Index = std::map<std::string, std::size_t, std::less<>>;

  static std::optional<std::size_t> lookup(const Index& ix, std::string_view key) {
    auto it = ix.find(key);
    if (it == ix.end()) return std::nullopt;
    return it->second;
  }

  void build_index() {
    for (std::size_t i = 0; i < data_.agents.size(); ++i) agent_ix_[data_.agents[i]] = i;
    for (std::size_t i = 0; i < data_.states.size(); ++i) state_ix_[data_.states[i]] = i;
    for (std::size_t i = 0; i < data_.actions.size(); ++i) action_ix_[data_.actions[i]] = i;

    block_.assign(data_.agents.size(), {});
    for (std::size_t a = 0; a < data_.agents.size(); ++a) {
      auto& blocks = block_[a];
      blocks.resize(data_.states.size());
      auto it = data_.indist.find(data_.agents[a]);
      if (it == data_.indist.end()) {
        for (std::size_t s = 0; s < blocks.size(); ++s) blocks[s] = s;
      } else {
        for (std::size_t b = 0; b < it->second.size(); ++b)
          for (const auto& s : it->second[b]) blocks[state_ix_.at(s)] = b;
      }
    }

    plays_at_.assign(data_.states.size(), {});
    play_state_.reserve(data_.plays.size());
    play_action_.reserve(data_.plays.size() * data_.agents.size());
    for (std::size_t i = 0; i < data_.plays.size(); ++i) {
      const Play& p = data_.plays[i];
      std::size_t s = state_ix_.at(p.state);
      play_state_.push_back(s);
      plays_at_[s].push_back(i);
      for (const auto& a : data_.agents) play_action_.push_back(action_ix_.at(p.profile.at(a)));
    }
  }

  GameData data_;
  Index agent_ix_, state_ix_, action_ix_;
  std::vector<std::vector<std::size_t>> block_;  // [agent][state] -> block id
  std::vector<std::vector<std::size_t>> plays_at_;
  std::vector<std::size_t> play_state_;
  std::vector<std::size_t> play_action_;  // row-major [play][agent]
};

// s1 and s2 agree on every member's indistinguishability block. Always true
// for the empty coalition.
inline bool indistinguishable(const Game& g, const Coalition& c, std::string_view s1, std::string_view s2) {
  auto i1 = g.state_index(s1);
  if (!i1) throw UnknownState(std::string(s1));
  auto i2 = g.state_index(s2);
  if (!i2) throw UnknownState(std::string(s2));
  for (const auto& a : c) {
    auto ai = g.agent_index(a);
    if (!ai) throw UnknownAgent(a);
    if (!g.same_block(*ai, *i1, *i2)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json game_to_json(const GameData& g) {
  nlohmann::ordered_json j;
  j["agents"] = g.agents;
  j["states"] = g.states;
  j["indist"] = nlohmann::ordered_json::object();
  for (const auto& [a, blocks] : g.indist) j["indist"][a] = blocks;
  j["actions"] = g.actions;
  j["outcomes"] = g.outcomes;
  j["plays"] = nlohmann::ordered_json::array();
  for (const auto& p : g.plays) {
    nlohmann::ordered_json pj;
    pj["state"] = p.state;
    pj["profile"] = nlohmann::ordered_json::object();
    for (const auto& [a, d] : p.profile) pj["profile"][a] = d;
    pj["outcome"] = p.outcome;
    j["plays"].push_back(std::move(pj));
  }
  j["valuation"] = nlohmann::ordered_json::object();
  for (const auto& [v, ix] : g.valuation) j["valuation"][v] = ix;
  return j;
}

inline std::string print_game(const GameData& g) { return game_to_json(g).dump(2) + "\n"; }
inline std::string print_game(const Game& g) { return print_game(g.data()); }

namespace detail {

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline const nlohmann::json& field(const nlohmann::json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw FormatError(0, std::string("missing field '") + name + "'");
  return *it;
}

inline std::string as_string(const nlohmann::json& j, const std::string& path) {
  if (!j.is_string()) throw FormatError(0, "field '" + path + "': expected string");
  return j.get<std::string>();
}

inline std::vector<std::string> as_strings(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(0, "field '" + path + "': expected array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

// Parses and validates a game document. Never returns an invalid game.
inline GameData parse_game_data(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(detail::line_of_offset(text, e.byte ? e.byte - 1 : 0), "malformed game document");
  }
  if (!doc.is_object()) throw FormatError(1, "game document must be an object");

  static const std::set<std::string> known = {"agents",   "states", "indist",   "actions",
                                              "outcomes", "plays",  "valuation"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw FormatError(0, "unknown field '" + key + "'");

  GameData g;
  g.agents = detail::as_strings(detail::field(doc, "agents"), "agents");
  g.states = detail::as_strings(detail::field(doc, "states"), "states");
  g.actions = detail::as_strings(detail::field(doc, "actions"), "actions");
  g.outcomes = detail::as_strings(detail::field(doc, "outcomes"), "outcomes");

  if (doc.contains("indist")) {
    const auto& ind = doc["indist"];
    if (!ind.is_object()) throw FormatError(0, "field 'indist': expected object");
    for (const auto& [agent, blocks] : ind.items()) {
      const std::string path = "indist." + agent;
      if (!blocks.is_array()) throw FormatError(0, "field '" + path + "': expected array of arrays");
      auto& out = g.indist[agent];
      for (std::size_t b = 0; b < blocks.size(); ++b)
        out.push_back(detail::as_strings(blocks[b], path + "[" + std::to_string(b) + "]"));
    }
  }

  const auto& plays = detail::field(doc, "plays");
  if (!plays.is_array()) throw FormatError(0, "field 'plays': expected array");
  for (std::size_t i = 0; i < plays.size(); ++i) {
    const std::string path = "plays[" + std::to_string(i) + "]";
    const auto& pj = plays[i];
    if (!pj.is_object()) throw FormatError(0, "field '" + path + "': expected object");
    Play p;
    p.state = detail::as_string(detail::field(pj, "state"), path + ".state");
    p.outcome = detail::as_string(detail::field(pj, "outcome"), path + ".outcome");
    const auto& prof = detail::field(pj, "profile");
    if (!prof.is_object()) throw FormatError(0, "field '" + path + ".profile': expected object");
    for (const auto& [agent, action] : prof.items())
      p.profile[agent] = detail::as_string(action, path + ".profile." + agent);
    g.plays.push_back(std::move(p));
  }

  if (doc.contains("valuation")) {
    const auto& val = doc["valuation"];
    if (!val.is_object()) throw FormatError(0, "field 'valuation': expected object");
    for (const auto& [var, ix] : val.items()) {
      const std::string path = "valuation." + var;
      if (!ix.is_array()) throw FormatError(0, "field '" + path + "': expected array of play indices");
      auto& out = g.valuation[var];
      for (const auto& e : ix) {
        if (!e.is_number_integer() || e.get<std::int64_t>() < 0)
          throw FormatError(0, "field '" + path + "': play index must be a nonnegative integer");
        out.insert(e.get<std::size_t>());
      }
    }
  }
  return g;
}

inline Game load_game(std::string_view text) { return Game(parse_game_data(text)); }

inline Game load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_game(ss.str());
}

}  // namespace blamelogic
