// Seeded generation of games and formulas, the axiom soundness sweep, and a
// bounded countermodel search.
//
// Every output is a pure function of the parameters and the seed: the only
// randomness source is std::mt19937_64, whose output sequence is fixed by the
// standard, and draws are reduced with plain arithmetic rather than the
// implementation-defined std distributions.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "blamelogic/error.hpp"
#include "blamelogic/game.hpp"
#include "blamelogic/hilbert.hpp"
#include "blamelogic/semantics.hpp"
#include "blamelogic/syntax.hpp"

namespace blamelogic {

using Rng = std::mt19937_64;

struct GenParams {
  std::size_t num_agents = 3;     // 1..3
  std::size_t num_states = 4;     // 1..4
  std::size_t num_actions = 3;    // 1..3
  std::size_t num_outcomes = 3;   // 1..3
  std::size_t num_variables = 4;  // 1..4
  double branching = 0.3;         // chance of each extra outcome per (state, profile)
  std::size_t formula_depth = 3;  // 0..5
  std::uint64_t seed = 0;

  // Throws InvalidInput when a field is out of range.
  void check() const {
    auto in = [](std::size_t v, std::size_t lo, std::size_t hi, const char* name) {
      if (v < lo || v > hi)
        throw InvalidInput(std::string(name) + " must be in " + std::to_string(lo) + ".." + std::to_string(hi) +
                           ", got " + std::to_string(v));
    };
    in(num_agents, 1, 3, "num_agents");
    in(num_states, 1, 4, "num_states");
    in(num_actions, 1, 3, "num_actions");
    in(num_outcomes, 1, 3, "num_outcomes");
    in(num_variables, 1, 4, "num_variables");
    in(formula_depth, 0, 5, "formula_depth");
    if (!(branching >= 0.0 && branching <= 1.0)) throw InvalidInput("branching must be in [0, 1]");
  }
};

namespace detail {

inline std::size_t draw(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
inline bool chance(Rng& rng, double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; }

inline std::vector<std::string> names(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline std::vector<Agent> default_agents(std::size_t n) {
  static const char* pool[] = {"a", "b", "c"};
  return {pool, pool + n};
}

inline std::vector<std::string> default_variables(std::size_t n) {
  static const char* pool[] = {"p", "q", "r", "s"};
  return {pool, pool + n};
}

struct GameShape {
  std::vector<Agent> agents;
  std::size_t states = 1;
  std::size_t actions = 1;
  std::size_t outcomes = 1;
  std::vector<std::string> variables;
  double branching = 0.0;
};

inline GameData random_game_data(const GameShape& shape, Rng& rng) {
  GameData g;
  g.agents = shape.agents;
  g.states = names("w", shape.states);
  g.actions = names("d", shape.actions);
  g.outcomes = names("o", shape.outcomes);

  for (const auto& a : g.agents) {
    std::vector<std::size_t> label(shape.states);
    for (auto& l : label) l = draw(rng, shape.states);
    std::map<std::size_t, std::size_t> block_of_label;
    auto& blocks = g.indist[a];
    for (std::size_t s = 0; s < shape.states; ++s) {
      auto [it, fresh] = block_of_label.emplace(label[s], blocks.size());
      if (fresh) blocks.emplace_back();
      blocks[it->second].push_back(g.states[s]);
    }
  }

  for (const auto& s : g.states) {
    std::vector<std::size_t> code(g.agents.size(), 0);
    do {
      std::map<Agent, ActionId> profile;
      for (std::size_t k = 0; k < g.agents.size(); ++k) profile[g.agents[k]] = g.actions[code[k]];
      const std::size_t primary = draw(rng, shape.outcomes);
      g.plays.push_back({s, profile, g.outcomes[primary]});
      for (std::size_t o = 0; o < shape.outcomes; ++o)
        if (o != primary && chance(rng, shape.branching)) g.plays.push_back({s, profile, g.outcomes[o]});
    } while (next_code(code, g.actions.size()));
  }

  for (const auto& v : shape.variables) {
    auto& ext = g.valuation[v];
    for (std::size_t i = 0; i < g.plays.size(); ++i)
      if (chance(rng, 0.5)) ext.insert(i);
  }
  return g;
}

inline Coalition random_coalition(const std::vector<Agent>& agents, Rng& rng) {
  std::vector<Agent> out;
  for (const auto& a : agents)
    if (chance(rng, 0.5)) out.push_back(a);
  return Coalition(std::move(out));
}

inline Formula random_formula(std::size_t depth, const std::vector<Agent>& agents,
                              const std::vector<std::string>& variables, Rng& rng) {
  if (depth == 0 || chance(rng, 0.2)) return Formula::var(variables[draw(rng, variables.size())]);
  switch (draw(rng, 10)) {
    case 0:
    case 1:
      return Formula::neg(random_formula(depth - 1, agents, variables, rng));
    case 2:
    case 3:
    case 4: {
      Formula lhs = random_formula(depth - 1, agents, variables, rng);
      return Formula::implies(std::move(lhs), random_formula(depth - 1, agents, variables, rng));
    }
    case 5:
    case 6: {
      Coalition c = random_coalition(agents, rng);
      return Formula::knows(std::move(c), random_formula(depth - 1, agents, variables, rng));
    }
    default: {
      Coalition c = random_coalition(agents, rng);
      return Formula::blames(std::move(c), random_formula(depth - 1, agents, variables, rng));
    }
  }
}

inline std::size_t draw_size(Rng& rng, std::size_t max) { return 1 + draw(rng, max); }

}  // namespace detail

// A game of exactly the requested size, with agents a, b, c, states w0..,
// actions d0.., outcomes o0.. and variables p, q, r, s.
inline Game gen_game(const GenParams& p, Rng& rng) {
  p.check();
  detail::GameShape shape{detail::default_agents(p.num_agents), p.num_states, p.num_actions, p.num_outcomes,
                          detail::default_variables(p.num_variables), p.branching};
  return Game(detail::random_game_data(shape, rng));
}

inline Game gen_game(const GenParams& p) {
  Rng rng(p.seed);
  return gen_game(p, rng);
}

// A formula of depth at most p.formula_depth over the first p.num_variables
// variables and coalitions drawn from `agents`.
inline Formula gen_formula(const GenParams& p, const std::vector<Agent>& agents, Rng& rng) {
  p.check();
  if (agents.empty()) throw InvalidInput("gen_formula needs at least one agent");
  return detail::random_formula(p.formula_depth, agents, detail::default_variables(p.num_variables), rng);
}

inline Formula gen_formula(const GenParams& p, const std::vector<Agent>& agents) {
  Rng rng(p.seed);
  return gen_formula(p, agents, rng);
}

// ---------------------------------------------------------------------------
// Soundness sweep

inline constexpr std::string_view kNecessitation = "Necessitation";

struct SweepViolation {
  std::string schema;
  GameData game;
  std::size_t play;
  Formula formula;  // the instance that evaluated false at `play`
};

struct SweepReport {
  std::size_t trials = 0;
  std::map<std::string, std::size_t> checks;  // plays checked per schema form
  std::size_t violation_count = 0;
  std::vector<SweepViolation> violations;  // first kMaxWitnesses only
  static constexpr std::size_t kMaxWitnesses = 64;
};

// Per trial: a game with sizes drawn up to the bounds in p, formulas phi and
// psi, coalitions C subset of D and disjoint C', D'. Every axiom form is
// instantiated and evaluated at every play; every valid formula met along the
// way is also checked for K_X validity over all coalitions X.
inline SweepReport soundness_sweep(const GenParams& p, std::size_t trials, EvalOptions opts = {}) {
  p.check();
  SweepReport report;
  report.trials = trials;
  auto record = [&report](std::string schema, const Game& g, std::size_t play, const Formula& f) {
    ++report.violation_count;
    if (report.violations.size() < SweepReport::kMaxWitnesses)
      report.violations.push_back({std::move(schema), g.data(), play, f});
  };

  for (std::size_t t = 0; t < trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    Rng rng(seq);
    detail::GameShape shape{detail::default_agents(detail::draw_size(rng, p.num_agents)),
                            detail::draw_size(rng, p.num_states),
                            detail::draw_size(rng, p.num_actions),
                            detail::draw_size(rng, p.num_outcomes),
                            detail::default_variables(detail::draw_size(rng, p.num_variables)),
                            p.branching};
    const Game game(detail::random_game_data(shape, rng));
    const auto& agents = game.agents();
    const std::size_t depth = detail::draw(rng, p.formula_depth + 1);
    const Formula phi = detail::random_formula(depth, agents, shape.variables, rng);
    const Formula psi = detail::random_formula(detail::draw(rng, p.formula_depth + 1), agents, shape.variables, rng);
    const Coalition c = detail::random_coalition(agents, rng);
    const Coalition d = c.united(detail::random_coalition(agents, rng));
    std::vector<Agent> left, right;
    for (const auto& a : agents) {
      switch (detail::draw(rng, 3)) {
        case 0: left.push_back(a); break;
        case 1: right.push_back(a); break;
        default: break;
      }
    }
    const Coalition c2(left), d2(right);

    auto bindings_for = [&](AxiomName a) -> AxiomBindings {
      switch (a) {
        case AxiomName::MonotonicityK:
        case AxiomName::MonotonicityB: return {phi, std::nullopt, c, d};
        case AxiomName::JointResponsibility: return {phi, psi, c2, d2};
        case AxiomName::BlamelessnessOfTruth: return {std::nullopt, std::nullopt, c, std::nullopt};
        default: return {phi, psi, c, std::nullopt};
      }
    };

    Evaluator ev(game, opts);
    std::vector<Formula> valid_candidates{phi, psi};
    for (AxiomName a : kAllAxioms) {
      const Formula instance = instantiate(a, bindings_for(a));
      const PlaySet& bits = ev.extension_bits(instance);
      auto& count = report.checks[std::string(axiom_label(a))];
      for (std::size_t i = 0; i < bits.size(); ++i) {
        ++count;
        if (!bits[i]) record(std::string(axiom_label(a)), game, i, instance);
      }
      valid_candidates.push_back(instance);
    }

    std::vector<Coalition> all_coalitions;
    for (std::size_t mask = 0; mask < (std::size_t{1} << agents.size()); ++mask) {
      std::vector<Agent> m;
      for (std::size_t k = 0; k < agents.size(); ++k)
        if (mask >> k & 1) m.push_back(agents[k]);
      all_coalitions.emplace_back(std::move(m));
    }
    for (const auto& f : valid_candidates) {
      if (!ev.is_valid(f)) continue;
      for (const auto& x : all_coalitions) {
        const Formula kf = Formula::knows(x, f);
        const PlaySet& bits = ev.extension_bits(kf);
        ++report.checks[std::string(kNecessitation)];
        for (std::size_t i = 0; i < bits.size(); ++i)
          if (!bits[i]) {
            record(std::string(kNecessitation), game, i, kf);
            break;
          }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Countermodel search

struct SearchBudget {
  std::size_t max_candidates = 10000;
  GenParams ceiling;  // size bounds for the randomized phase
};

struct Countermodel {
  Game game;
  std::size_t play;
};

// Looks for a play falsifying f. Tiny games are enumerated exhaustively first
// (1-2 states, 1-2 actions, one outcome per state and profile, every
// indistinguishability choice and valuation); the rest of the budget goes to
// seeded random games. Games always carry exactly the agents and variables of
// f. Returns nothing when the budget runs out.
inline std::optional<Countermodel> find_countermodel(const Formula& f, const SearchBudget& budget) {
  if (budget.max_candidates < 1) throw InvalidInput("max_candidates must be at least 1");
  budget.ceiling.check();
  std::vector<Agent> agents;
  for (const auto& a : agents_of(f)) agents.push_back(a);
  if (agents.empty()) agents.push_back("a");
  std::vector<std::string> variables;
  for (const auto& v : variables_of(f)) variables.push_back(v);

  std::size_t candidates = 0;
  auto try_game = [&](GameData data) -> std::optional<Countermodel> {
    ++candidates;
    Game g(std::move(data));
    Evaluator ev(g);
    const PlaySet& bits = ev.extension_bits(f);
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (!bits[i]) {
        // Independent re-check with a fresh evaluator.
        if (evaluate(g, i, f)) throw Error("countermodel re-verification failed");
        return Countermodel{std::move(g), i};
      }
    return std::nullopt;
  };

  const std::size_t max_states = std::min<std::size_t>(2, budget.ceiling.num_states);
  const std::size_t max_actions = std::min<std::size_t>(2, budget.ceiling.num_actions);
  for (std::size_t ns = 1; ns <= max_states; ++ns) {
    for (std::size_t na = 1; na <= max_actions; ++na) {
      GameData base;
      base.agents = agents;
      base.states = detail::names("w", ns);
      base.actions = detail::names("d", na);
      base.outcomes = {"o0"};
      for (const auto& s : base.states) {
        std::vector<std::size_t> code(agents.size(), 0);
        do {
          std::map<Agent, ActionId> profile;
          for (std::size_t k = 0; k < agents.size(); ++k) profile[agents[k]] = base.actions[code[k]];
          base.plays.push_back({s, profile, "o0"});
        } while (detail::next_code(code, na));
      }
      const std::size_t partition_choices = ns == 1 ? 1 : std::size_t{1} << agents.size();
      const std::size_t bits = base.plays.size() * variables.size();
      for (std::size_t split = 0; split < partition_choices; ++split) {
        for (std::size_t k = 0; k < agents.size(); ++k) {
          if (ns == 1 || !(split >> k & 1)) base.indist[agents[k]] = {base.states};
          else base.indist[agents[k]] = {{base.states[0]}, {base.states[1]}};
        }
        // Valuations in counting order; too many bits means the budget ends first.
        for (std::uint64_t mask = 0; bits >= 64 || mask < (std::uint64_t{1} << bits); ++mask) {
          if (candidates >= budget.max_candidates) return std::nullopt;
          GameData g = base;
          for (std::size_t v = 0; v < variables.size(); ++v) {
            auto& ext = g.valuation[variables[v]];
            for (std::size_t i = 0; i < g.plays.size(); ++i) {
              const std::size_t bit = v * g.plays.size() + i;
              if (bit < 64 && (mask >> bit & 1)) ext.insert(i);
            }
          }
          if (auto cm = try_game(std::move(g))) return cm;
        }
      }
    }
  }

  Rng rng(budget.ceiling.seed);
  if (variables.empty()) variables.push_back("p");
  while (candidates < budget.max_candidates) {
    detail::GameShape shape{agents,
                            detail::draw_size(rng, budget.ceiling.num_states),
                            detail::draw_size(rng, budget.ceiling.num_actions),
                            detail::draw_size(rng, budget.ceiling.num_outcomes),
                            variables,
                            budget.ceiling.branching};
    if (auto cm = try_game(detail::random_game_data(shape, rng))) return cm;
  }
  return std::nullopt;
}

}  // namespace blamelogic
