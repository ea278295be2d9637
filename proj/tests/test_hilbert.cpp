#include <algorithm>
#include <functional>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "blamelogic/blamelogic.hpp"
#include "support/script_gen.hpp"

using namespace blamelogic;

namespace {

const std::string kData = BLAMELOGIC_DATA_DIR;

Formula f(const char* s) { return parse_formula(s); }

const char* kCorpus[] = {"lemma3", "lemma4_inst", "lemma5", "lemma6_n2", "lemma8", "lemma9_n2"};

// Brute-force truth table with atoms read off independently of the library.
bool brute_tautology(const Formula& g) {
  std::vector<Formula> atoms;
  std::function<void(const Formula&)> collect = [&](const Formula& h) {
    if (h.is(Connective::Neg)) return collect(h.operand());
    if (h.is(Connective::Implies)) {
      collect(h.lhs());
      return collect(h.rhs());
    }
    if (std::find(atoms.begin(), atoms.end(), h) == atoms.end()) atoms.push_back(h);
  };
  collect(g);
  std::function<bool(const Formula&, unsigned)> val = [&](const Formula& h, unsigned m) -> bool {
    if (h.is(Connective::Neg)) return !val(h.operand(), m);
    if (h.is(Connective::Implies)) return !val(h.lhs(), m) || val(h.rhs(), m);
    auto k = std::find(atoms.begin(), atoms.end(), h) - atoms.begin();
    return (m >> k) & 1u;
  };
  for (unsigned m = 0; m < (1u << atoms.size()); ++m)
    if (!val(g, m)) return false;
  return true;
}

}  // namespace

TEST(MatchAxiom, Examples) {
  auto m = match_axiom(f("K{a,b}(p->q) -> (K{a,b}p -> K{a,b}q)"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->name, AxiomName::Distributivity);
  EXPECT_EQ(*m->bindings.c, (Coalition{"a", "b"}));
  EXPECT_EQ(*m->bindings.phi, f("p"));
  EXPECT_EQ(*m->bindings.psi, f("q"));

  m = match_axiom(f("K{a}p -> K{a,b}p"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->name, AxiomName::MonotonicityK);
  EXPECT_EQ(*m->bindings.c, Coalition{"a"});
  EXPECT_EQ(*m->bindings.d, (Coalition{"a", "b"}));

  EXPECT_FALSE(match_axiom(f("K{a,b}p -> K{a}p")));

  m = match_axiom(f("~B{}(p->q)"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->name, AxiomName::NoneToBlame);
  EXPECT_EQ(*m->bindings.phi, f("p -> q"));
}

TEST(MatchAxiom, EveryForm) {
  EXPECT_EQ(match_axiom(f("K{a}q -> q"))->name, AxiomName::TruthK);
  EXPECT_EQ(match_axiom(f("B{a}q -> q"))->name, AxiomName::TruthB);
  EXPECT_EQ(match_axiom(f("~K{a}q -> K{a}~K{a}q"))->name, AxiomName::NegativeIntrospection);
  EXPECT_EQ(match_axiom(f("B{a}q -> B{a,b}q"))->name, AxiomName::MonotonicityB);
  EXPECT_EQ(match_axiom(f("~B{a}true"))->name, AxiomName::BlamelessnessOfTruth);
  EXPECT_EQ(match_axiom(f("<K>{a}B{a}p & <K>{b}B{b}q -> (p | q -> B{a,b}(p | q))"))->name,
            AxiomName::JointResponsibility);
  EXPECT_EQ(match_axiom(f("K{a}(p -> q) -> B{a}q -> p -> B{a}p"))->name, AxiomName::BlameForKnownCause);
  EXPECT_EQ(match_axiom(f("B{a}p -> K{a}(p -> B{a}p)"))->name, AxiomName::KnowledgeOfFairness);
}

TEST(MatchAxiom, SideConditionsAndRepeatedMetavariables) {
  // Coalitions overlap.
  EXPECT_FALSE(match_axiom(f("<K>{a}B{a}p & <K>{a,b}B{a,b}q -> (p | q -> B{a,b}(p | q))")));
  // Union coalition is wrong.
  EXPECT_FALSE(match_axiom(f("<K>{a}B{a}p & <K>{b}B{b}q -> (p | q -> B{a}(p | q))")));
  EXPECT_FALSE(match_axiom(f("K{a}p -> q")));
  EXPECT_FALSE(match_axiom(f("K{a}p -> K{b}p")));
  EXPECT_FALSE(match_axiom(f("~K{a}q -> K{b}~K{a}q")));
  EXPECT_FALSE(match_axiom(f("~B{a}(q -> q)")));
  EXPECT_FALSE(match_axiom(f("~B{a}p")));
}

TEST(MatchAxiom, InstantiateThenMatchRoundTrip) {
  Rng rng(5);
  const std::vector<Agent> agents{"a", "b", "c"};
  for (int i = 0; i < 300; ++i) {
    for (AxiomName a : kAllAxioms) {
      AxiomBindings b{detail::random_formula(2, agents, {"p", "q"}, rng),
                      detail::random_formula(2, agents, {"p", "q"}, rng), detail::random_coalition(agents, rng),
                      std::nullopt};
      if (a == AxiomName::MonotonicityK || a == AxiomName::MonotonicityB)
        b.d = b.c->united(detail::random_coalition(agents, rng));
      if (a == AxiomName::JointResponsibility) {
        std::vector<Agent> rest;
        for (const auto& x : agents)
          if (!b.c->contains(x) && detail::chance(rng, 0.5)) rest.push_back(x);
        b.d = Coalition(rest);
      }
      Formula inst = instantiate(a, b);
      EXPECT_TRUE(match_schema(a, inst)) << axiom_label(a) << ": " << print_formula(inst);
      EXPECT_TRUE(match_axiom(inst));
    }
  }
}

TEST(MatchAxiom, InstantiateRejectsBadBindings) {
  EXPECT_THROW(instantiate(AxiomName::MonotonicityK, {f("p"), std::nullopt, Coalition{"a", "b"}, Coalition{"a"}}),
               InvalidInput);
  EXPECT_THROW(instantiate(AxiomName::Distributivity, {f("p"), std::nullopt, Coalition{"a"}, std::nullopt}),
               InvalidInput);
}

TEST(AxiomLabels, RoundTrip) {
  for (AxiomName a : kAllAxioms) EXPECT_EQ(axiom_from_label(axiom_label(a)), a);
  EXPECT_FALSE(axiom_from_label("Truth"));
}

TEST(Tautology, Examples) {
  EXPECT_TRUE(is_tautology_instance(f("p -> q -> p")));
  EXPECT_TRUE(is_tautology_instance(f("K{a}p | ~K{a}p")));
  EXPECT_FALSE(is_tautology_instance(f("K{a}p -> p")));
  EXPECT_FALSE(is_tautology_instance(f("K{a}p -> ~K{a}~K{a}p")));
  EXPECT_TRUE(is_tautology_instance(f("(K{a}~K{a}p -> ~K{a}p) -> K{a}p -> ~K{a}~K{a}p")));
}

TEST(Tautology, AtomBudget) {
  std::string big = "p0";
  for (int i = 1; i < 22; ++i) big += " -> p" + std::to_string(i);
  EXPECT_THROW(is_tautology_instance(parse_formula(big)), AtomBudgetExceeded);
  EXPECT_NO_THROW(is_tautology_instance(parse_formula(big), 22));
  EXPECT_FALSE(is_tautology_instance(parse_formula(big), 22));
}

TEST(Tautology, AgreesWithBruteForce) {
  Rng rng(17);
  const std::vector<Agent> agents{"a"};
  int hits = 0;
  for (int i = 0; i < 3000; ++i) {
    Formula g = detail::random_formula(4, agents, {"p", "q"}, rng);
    bool t = is_tautology_instance(g);
    ASSERT_EQ(t, brute_tautology(g)) << print_formula(g);
    hits += t;
  }
  EXPECT_GT(hits, 0);
}

TEST(CheckProof, ModusPonens) {
  ProofScript s = parse_proof("premises: p ; p -> q\ngoal: q\n1. p ; premise\n2. p -> q ; premise\n3. q ; mp 1 2\n");
  auto r = check_proof(s);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(r.depends_on_premise, (std::vector<bool>{true, true, true}));
}

TEST(CheckProof, NecessitationNeedsATheorem) {
  ProofScript s = parse_proof("premises: p\ngoal: K{a}p\n1. p ; premise\n2. K{a}p ; nec 1 {a}\n");
  auto r = check_proof(s);
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.failed_line, 2u);
  EXPECT_NE(r.reason.find("Necessitation applied to premise-dependent line"), std::string::npos);
}

TEST(CheckProof, ContrapositiveIsNotOneTautology) {
  ProofScript s = parse_proof(
      "goal: K{a}p -> ~K{a}~K{a}p\n"
      "1. K{a}~K{a}p -> ~K{a}p ; axiom:Truth-K\n"
      "2. K{a}p -> ~K{a}~K{a}p ; taut\n");
  auto r = check_proof(s);
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.failed_line, 2u);
  EXPECT_EQ(r.reason, "not a tautology instance");
}

TEST(CheckProof, OtherFailures) {
  EXPECT_EQ(check_proof(parse_proof("goal: q\n1. q ; premise\n")).reason, "not among the premises");
  EXPECT_EQ(check_proof(parse_proof("goal: K{a}q -> q\n1. K{a}q -> q ; axiom:Truth-B\n")).reason,
            "not an instance of Truth-B");
  EXPECT_EQ(check_proof(parse_proof("goal: q\n1. p -> p ; taut\n")).reason, "last line is not the goal");
  EXPECT_FALSE(check_proof(parse_proof("goal: p -> p\n2. p -> p ; taut\n")).valid);
  EXPECT_FALSE(check_proof(parse_proof("goal: p\n1. p ; mp 1 1\n")).valid);
  EXPECT_FALSE(check_proof(parse_proof("goal: p\n")).valid);
  auto theorem = check_proof(parse_proof("goal: K{a}(p -> p)\n1. p -> p ; taut\n2. K{a}(p -> p) ; nec 1 {a}\n"));
  EXPECT_TRUE(theorem.valid);
}

TEST(CheckProof, PremiseOrderDoesNotMatter) {
  ProofScript s = parse_proof("premises: p ; p -> q\ngoal: q\n1. p ; premise\n2. p -> q ; premise\n3. q ; mp 1 2\n");
  std::reverse(s.premises.begin(), s.premises.end());
  EXPECT_TRUE(check_proof(s).valid);
}

TEST(ProofFile, ParseAndPrint) {
  ProofScript s = parse_proof(
      "# comment\n"
      "premises: p ; p -> q   # trailing\n"
      "goal: K{}(r -> r)\n"
      "1. r -> r ; taut\n"
      "2. K{}(r -> r) ; nec 1 {}\n");
  EXPECT_EQ(s.premises.size(), 2u);
  EXPECT_EQ(s.lines.size(), 2u);
  EXPECT_EQ(std::get<NecJ>(s.lines[1].why).coalition, Coalition{});
  ProofScript again = parse_proof(print_proof(s));
  EXPECT_EQ(again.premises, s.premises);
  EXPECT_EQ(again.goal, s.goal);
  ASSERT_EQ(again.lines.size(), s.lines.size());
  for (std::size_t i = 0; i < s.lines.size(); ++i) {
    EXPECT_EQ(again.lines[i].formula, s.lines[i].formula);
    EXPECT_EQ(again.lines[i].why, s.lines[i].why);
  }
}

TEST(ProofFile, FormatErrors) {
  EXPECT_THROW(parse_proof("1. p ; taut\n"), FormatError);
  EXPECT_THROW(parse_proof("goal: p\n1. p ; lemma\n"), FormatError);
  EXPECT_THROW(parse_proof("goal: p\n1. p ; axiom:Truth\n"), FormatError);
  EXPECT_THROW(parse_proof("goal: p\nx. p ; taut\n"), FormatError);
  EXPECT_THROW(parse_proof("goal: p\n1. p -> ; taut\n"), FormatError);
  try {
    parse_proof("goal: p\n\n1. p ; mp one 2\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Corpus, AllScriptsCheck) {
  for (const char* name : kCorpus) {
    ProofScript s = load_proof_file(kData + "/proofs/" + name + ".proof");
    auto r = check_proof(s);
    EXPECT_TRUE(r.valid) << name << ": line " << r.failed_line << ": " << r.reason;
  }
}

TEST(Corpus, GoalsHaveTheExpectedShape) {
  auto goal = [](const char* n) { return load_proof_file(kData + "/proofs/" + n + ".proof").goal; };
  EXPECT_EQ(goal("lemma3"), f("<K>{a}B{a}p -> (p -> B{a}p)"));
  EXPECT_EQ(goal("lemma5"), f("<K>{a}p"));
  EXPECT_EQ(goal("lemma8"), f("K{a,b}p -> K{a,b}K{a,b}p"));
  EXPECT_EQ(goal("lemma6_n2"), f("B{a,b}(p | q)"));
}

TEST(Deduction, DischargesModusPonensPremise) {
  ProofScript s = parse_proof("premises: p ; p -> q\ngoal: q\n1. p ; premise\n2. p -> q ; premise\n3. q ; mp 1 2\n");
  ProofScript out = deduction_transform(s, f("p"));
  EXPECT_EQ(out.premises, std::vector<Formula>{f("p -> q")});
  EXPECT_EQ(out.goal, f("p -> q"));
  EXPECT_TRUE(check_proof(out).valid) << print_proof(out);
  EXPECT_LE(out.lines.size(), 3 * s.lines.size() + 1);
}

TEST(Deduction, SinglePremise) {
  ProofScript s = parse_proof("premises: p\ngoal: p\n1. p ; premise\n");
  ProofScript out = deduction_transform(s, f("p"));
  EXPECT_TRUE(out.premises.empty());
  EXPECT_EQ(out.goal, f("p -> p"));
  EXPECT_TRUE(check_proof(out).valid);
}

TEST(Deduction, KeepsTheoremNecessitation) {
  ProofScript s = load_proof_file(kData + "/proofs/lemma5.proof");
  ProofScript out = deduction_transform(s, f("p"));
  EXPECT_TRUE(check_proof(out).valid);
  EXPECT_EQ(out.goal, f("p -> <K>{a}p"));
  ProofScript t = load_proof_file(kData + "/proofs/lemma9_n2.proof");
  ProofScript out2 = deduction_transform(t, t.premises[2]);
  EXPECT_TRUE(check_proof(out2).valid);
  EXPECT_LE(out2.lines.size(), 3 * t.lines.size() + 1);
}

TEST(Deduction, Errors) {
  ProofScript s = parse_proof("premises: p\ngoal: p\n1. p ; premise\n");
  EXPECT_THROW(deduction_transform(s, f("q")), PhiNotPremise);
  ProofScript bad = parse_proof("premises: p\ngoal: q\n1. p ; premise\n");
  EXPECT_THROW(deduction_transform(bad, f("p")), InvalidInput);
}

TEST(Deduction, GeneratedScripts) {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    auto [s, phi] = scriptgen::random_script(rng);
    ASSERT_TRUE(check_proof(s).valid) << print_proof(s);
    ProofScript out = deduction_transform(s, phi);
    auto r = check_proof(out);
    ASSERT_TRUE(r.valid) << "line " << r.failed_line << ": " << r.reason << "\n" << print_proof(out);
    EXPECT_EQ(out.goal, Formula::implies(phi, s.goal));
    EXPECT_EQ(std::count(out.premises.begin(), out.premises.end(), phi), 0);
    EXPECT_LE(out.lines.size(), 3 * s.lines.size() + 1);
  }
}

TEST(Bridges, SchemaInstancesAndTautologiesHoldInGames) {
  Rng rng(31);
  const std::vector<std::string> vars{"p", "q", "r", "s"};
  for (int t = 0; t < 150; ++t) {
    GenParams p;
    p.num_agents = 1 + detail::draw(rng, 3);
    p.num_states = 1 + detail::draw(rng, 4);
    p.num_actions = 1 + detail::draw(rng, 3);
    Game g = gen_game(p, rng);
    Evaluator ev(g);
    for (int k = 0; k < 20; ++k) {
      Formula h = detail::random_formula(4, g.agents(), vars, rng);
      if (match_axiom(h) || is_tautology_instance(h)) {
        EXPECT_TRUE(ev.is_valid(h)) << print_formula(h);
      }
      // Propositional shapes over random atoms.
      Formula x = detail::random_formula(2, g.agents(), vars, rng);
      Formula taut = Formula::implies(Formula::implies(h, x), Formula::implies(Formula::neg(x), Formula::neg(h)));
      ASSERT_TRUE(is_tautology_instance(taut));
      EXPECT_TRUE(ev.is_valid(taut));
    }
  }
}

TEST(Bridges, ModusPonensPreservesValidity) {
  Rng rng(37);
  const std::vector<std::string> vars{"p", "q"};
  int applied = 0;
  for (int t = 0; t < 200; ++t) {
    GenParams p;
    p.num_agents = 2;
    p.num_states = 1 + detail::draw(rng, 3);
    p.num_actions = 1 + detail::draw(rng, 2);
    Game g = gen_game(p, rng);
    Evaluator ev(g);
    for (int k = 0; k < 20; ++k) {
      Formula a = detail::random_formula(2, g.agents(), vars, rng);
      Formula b = detail::random_formula(2, g.agents(), vars, rng);
      if (ev.is_valid(a) && ev.is_valid(Formula::implies(a, b))) {
        ++applied;
        EXPECT_TRUE(ev.is_valid(b));
      }
    }
  }
  EXPECT_GT(applied, 0);
}
