// Command-line front end. Exit codes: 0 success / true / valid,
// 1 false / invalid / countermodel found / violations, 2 usage or input error.

#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "blamelogic/blamelogic.hpp"

namespace blamelogic::cli {

using Json = nlohmann::ordered_json;

struct Report {
  std::string command;
  std::string verdict;
  int exit_code = 0;
  std::vector<std::string> lines;  // human form, verdict excluded
  std::optional<Json> witness;
  std::optional<Json> violations;
  double timing_ms = 0;
};

inline std::string format_report(const Report& r, bool json) {
  if (json) {
    Json j;
    j["command"] = r.command;
    j["verdict"] = r.verdict;
    if (r.witness) j["witness"] = *r.witness;
    if (r.violations) j["violations"] = *r.violations;
    j["timing_ms"] = r.timing_ms;
    return j.dump() + "\n";
  }
  std::string out;
  if (!r.verdict.empty()) out += r.verdict + "\n";
  for (const auto& l : r.lines) out += l + "\n";
  return out;
}

inline Json strategy_json(const Strategy& s) {
  Json j = Json::object();
  for (const auto& [a, d] : s.choice) j[a] = d;
  return j;
}

namespace detail {

struct Options {
  std::string game_path;
  std::optional<std::size_t> play;
  std::string formula;
  std::vector<std::string> hypotheses;
  std::string script_path;
  std::string phi;
  std::uint64_t seed = 0;
  std::size_t trials = 1000;
  std::size_t budget = SearchBudget{}.max_candidates;
  std::string out_path;
  std::string kind = "game";
  GenParams params;
  bool json = false;
};

inline std::size_t require_play(const Game& g, const Options& o) {
  if (!o.play) throw InvalidInput("--play is required");
  if (*o.play >= g.num_plays())
    throw PlayNotInGame("play index out of range: " + std::to_string(*o.play) + " (game has " +
                        std::to_string(g.num_plays()) + " plays)");
  return *o.play;
}

inline std::string join_indices(const std::vector<std::size_t>& ix) {
  std::string s = "{";
  for (std::size_t i = 0; i < ix.size(); ++i) s += (i ? ", " : "") + std::to_string(ix[i]);
  return s + "}";
}

inline Report run_command(const std::string& cmd, const Options& o) {
  Report r;
  r.command = cmd;
  auto verdict = [&r](bool ok, const char* yes, const char* no) {
    r.verdict = ok ? yes : no;
    r.exit_code = ok ? 0 : 1;
  };

  if (cmd == "eval") {
    Game g = load_game_file(o.game_path);
    bool v = evaluate(g, require_play(g, o), parse_formula(o.formula));
    verdict(v, "true", "false");
  } else if (cmd == "extension") {
    Game g = load_game_file(o.game_path);
    auto ext = extension(g, parse_formula(o.formula));
    r.verdict = join_indices(ext);
    r.witness = ext;
  } else if (cmd == "validity") {
    Game g = load_game_file(o.game_path);
    Formula f = parse_formula(o.formula);
    Evaluator ev(g);
    const PlaySet& bits = ev.extension_bits(f);
    std::vector<std::size_t> falsifying;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (!bits[i]) falsifying.push_back(i);
    verdict(falsifying.empty(), "valid", "invalid");
    if (!falsifying.empty()) {
      r.lines.push_back("falsified at plays " + join_indices(falsifying));
      r.witness = falsifying;
    }
  } else if (cmd == "witness") {
    Game g = load_game_file(o.game_path);
    Formula f = parse_formula(o.formula);
    if (!f.is(Connective::Blames)) throw InvalidInput("witness needs a formula of the form B{...}...");
    auto s = blame_witness(g, require_play(g, o), f.coalition(), f.operand());
    verdict(s.has_value(), "true", "false");
    if (s) {
      r.lines.push_back("witness: " + s->to_string());
      r.witness = strategy_json(*s);
    } else {
      r.lines.push_back("no witness");
    }
  } else if (cmd == "entail") {
    Game g = load_game_file(o.game_path);
    std::vector<Formula> hyps;
    for (const auto& h : o.hypotheses) hyps.push_back(parse_formula(h));
    Formula f = parse_formula(o.formula);
    Evaluator ev(g);
    bool ok = ev.entails(hyps, f);
    verdict(ok, "true", "false");
    if (!ok) {
      for (std::size_t i = 0; i < g.num_plays(); ++i) {
        bool all = true;
        for (const auto& h : hyps) all = all && ev.evaluate(i, h);
        if (all && !ev.evaluate(i, f)) {
          r.lines.push_back("counterexample play: " + std::to_string(i));
          r.witness = Json{{"play", i}};
          break;
        }
      }
    }
  } else if (cmd == "prove") {
    ProofScript s = load_proof_file(o.script_path);
    ProofReport rep = check_proof(s);
    verdict(rep.valid, "valid", "invalid");
    if (!rep.valid) {
      r.lines.push_back("line " + std::to_string(rep.failed_line) + ": " + rep.reason);
      r.violations = Json::array({Json{{"line", rep.failed_line}, {"reason", rep.reason}}});
    }
  } else if (cmd == "deduce") {
    ProofScript s = load_proof_file(o.script_path);
    ProofScript out = deduction_transform(s, parse_formula(o.phi));
    ProofReport rep = check_proof(out);
    verdict(rep.valid, "valid", "invalid");
    std::string text = print_proof(out);
    r.lines.push_back(text.substr(0, text.size() - 1));
    r.witness = text;
  } else if (cmd == "gen") {
    GenParams p = o.params;
    p.seed = o.seed;
    r.verdict = "ok";
    if (o.kind == "formula") {
      Formula f = gen_formula(p, blamelogic::detail::default_agents(p.num_agents));
      r.lines.push_back(print_formula(f));
      r.witness = print_formula(f);
    } else if (o.kind == "game") {
      Game g = gen_game(p);
      std::string doc = print_game(g);
      r.lines.push_back(doc.substr(0, doc.size() - 1));
      r.witness = game_to_json(g.data());
    } else {
      throw InvalidInput("--kind must be 'game' or 'formula'");
    }
  } else if (cmd == "sweep") {
    GenParams p = o.params;
    p.seed = o.seed;
    SweepReport rep = soundness_sweep(p, o.trials);
    verdict(rep.violation_count == 0, "ok", "violations");
    r.lines.push_back(std::to_string(rep.violation_count) + " violations / " + std::to_string(rep.trials) +
                      " trials");
    for (const auto& [schema, n] : rep.checks) r.lines.push_back("  " + schema + ": " + std::to_string(n) + " checks");
    Json vs = Json::array();
    for (const auto& v : rep.violations) {
      r.lines.push_back("violation: " + v.schema + " at play " + std::to_string(v.play) + ": " +
                        print_formula(v.formula));
      vs.push_back(Json{{"schema", v.schema},
                        {"play", v.play},
                        {"formula", print_formula(v.formula)},
                        {"game", game_to_json(v.game)}});
    }
    r.violations = vs;
  } else if (cmd == "search") {
    Formula f = parse_formula(o.formula);
    SearchBudget b;
    b.max_candidates = o.budget;
    b.ceiling = o.params;
    b.ceiling.seed = o.seed;
    auto cm = find_countermodel(f, b);
    verdict(!cm.has_value(), "none", "countermodel");
    if (cm) {
      std::string doc = print_game(cm->game);
      if (!o.out_path.empty()) {
        std::ofstream out(o.out_path);
        if (!out) throw Error("cannot write '" + o.out_path + "'");
        out << doc;
      }
      r.lines.push_back("play: " + std::to_string(cm->play));
      r.lines.push_back(doc.substr(0, doc.size() - 1));
      r.witness = Json{{"play", cm->play}, {"game", game_to_json(cm->game.data())}};
    } else {
      r.lines.push_back("budget of " + std::to_string(b.max_candidates) + " candidates exhausted");
    }
  }
  return r;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model checker and proof checker for knowledge and blameworthiness"};
  app.require_subcommand(1);
  detail::Options o;

  auto add_game = [&](CLI::App* sc) { sc->add_option("--game", o.game_path, "game file")->required(); };
  auto add_play = [&](CLI::App* sc) { sc->add_option("--play", o.play, "play index (0-based)")->required(); };
  auto add_formula = [&](CLI::App* sc) { sc->add_option("--formula", o.formula, "formula text")->required(); };
  auto add_params = [&](CLI::App* sc) {
    sc->add_option("--seed", o.seed, "random seed");
    sc->add_option("--agents", o.params.num_agents, "number of agents (1-3)");
    sc->add_option("--states", o.params.num_states, "number of states (1-4)");
    sc->add_option("--actions", o.params.num_actions, "number of actions (1-3)");
    sc->add_option("--outcomes", o.params.num_outcomes, "number of outcomes (1-3)");
    sc->add_option("--vars", o.params.num_variables, "number of variables (1-4)");
    sc->add_option("--depth", o.params.formula_depth, "formula depth (0-5)");
    sc->add_option("--branching", o.params.branching, "extra-outcome probability");
  };

  auto* eval = app.add_subcommand("eval", "truth of a formula at a play");
  add_game(eval), add_play(eval), add_formula(eval);
  auto* ext = app.add_subcommand("extension", "plays where a formula holds");
  add_game(ext), add_formula(ext);
  auto* val = app.add_subcommand("validity", "whether a formula holds at every play");
  add_game(val), add_formula(val);
  auto* wit = app.add_subcommand("witness", "strategy witnessing a B{C}f formula at a play");
  add_game(wit), add_play(wit), add_formula(wit);
  auto* ent = app.add_subcommand("entail", "playwise entailment from hypotheses");
  add_game(ent), add_formula(ent);
  ent->add_option("--hyp", o.hypotheses, "hypothesis formula (repeatable)");
  auto* prove = app.add_subcommand("prove", "check a proof script");
  prove->add_option("--script", o.script_path, "proof file")->required();
  auto* deduce = app.add_subcommand("deduce", "discharge a premise from a proof script");
  deduce->add_option("--script", o.script_path, "proof file")->required();
  deduce->add_option("--phi", o.phi, "premise to discharge")->required();
  auto* gen = app.add_subcommand("gen", "generate a random game or formula");
  add_params(gen);
  gen->add_option("--kind", o.kind, "game or formula");
  auto* sweep = app.add_subcommand("sweep", "axiom soundness sweep over generated games");
  add_params(sweep);
  sweep->add_option("--trials", o.trials, "number of generated games");
  auto* search = app.add_subcommand("search", "bounded countermodel search");
  add_formula(search);
  add_params(search);
  search->add_option("--budget", o.budget, "maximum number of candidate games");
  search->add_option("--out", o.out_path, "write the countermodel game to this file");
  app.add_flag("--json", o.json, "machine-readable output");
  for (auto* sc : {eval, ext, val, wit, ent, prove, deduce, gen, sweep, search}) sc->add_flag("--json", o.json, "machine-readable output");

  std::vector<const char*> argv{"blamelogic"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    Report r = detail::run_command(cmd, o);
    r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out << format_report(r, o.json);
    return r.exit_code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace blamelogic::cli
