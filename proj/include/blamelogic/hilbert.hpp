// Hilbert-style proof checking for the knowledge/blame calculus.
//
// Theorems are built from propositional tautology instances and the eleven
// axiom forms below with Modus Ponens and Necessitation. A proof from
// premises may use Necessitation only on lines that do not depend on a
// premise; the checker tracks that dependency per line.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blamelogic/error.hpp"
#include "blamelogic/syntax.hpp"

namespace blamelogic {

enum class AxiomName : std::uint8_t {
  TruthK,
  TruthB,
  Distributivity,
  NegativeIntrospection,
  MonotonicityK,
  MonotonicityB,
  NoneToBlame,
  BlamelessnessOfTruth,
  JointResponsibility,
  BlameForKnownCause,
  KnowledgeOfFairness,
};

inline constexpr std::array<AxiomName, 11> kAllAxioms = {
    AxiomName::TruthK,          AxiomName::TruthB,
    AxiomName::Distributivity,  AxiomName::NegativeIntrospection,
    AxiomName::MonotonicityK,   AxiomName::MonotonicityB,
    AxiomName::NoneToBlame,     AxiomName::BlamelessnessOfTruth,
    AxiomName::JointResponsibility, AxiomName::BlameForKnownCause,
    AxiomName::KnowledgeOfFairness,
};

inline std::string_view axiom_label(AxiomName a) {
  switch (a) {
    case AxiomName::TruthK: return "Truth-K";
    case AxiomName::TruthB: return "Truth-B";
    case AxiomName::Distributivity: return "Distributivity";
    case AxiomName::NegativeIntrospection: return "NegativeIntrospection";
    case AxiomName::MonotonicityK: return "Monotonicity-K";
    case AxiomName::MonotonicityB: return "Monotonicity-B";
    case AxiomName::NoneToBlame: return "NoneToBlame";
    case AxiomName::BlamelessnessOfTruth: return "BlamelessnessOfTruth";
    case AxiomName::JointResponsibility: return "JointResponsibility";
    case AxiomName::BlameForKnownCause: return "BlameForKnownCause";
    case AxiomName::KnowledgeOfFairness: return "KnowledgeOfFairness";
  }
  return "?";
}

inline std::optional<AxiomName> axiom_from_label(std::string_view s) {
  for (AxiomName a : kAllAxioms)
    if (axiom_label(a) == s) return a;
  return std::nullopt;
}

// Metavariable bindings of a schema instance. Unused slots stay empty.
struct AxiomBindings {
  std::optional<Formula> phi;
  std::optional<Formula> psi;
  std::optional<Coalition> c;
  std::optional<Coalition> d;
};

struct AxiomMatch {
  AxiomName name;
  AxiomBindings bindings;
};

namespace detail {

// Schemas are written in the surface syntax. Variables PHI/PSI are formula
// metavariables; a coalition {C}, {D} or {CD} is a coalition metavariable,
// CD standing for the union of C and D. Everything else is literal.
inline const Formula& schema_pattern(AxiomName a) {
  static const std::array<Formula, 11> patterns = {
      parse_formula("K{C}PHI -> PHI"),
      parse_formula("B{C}PHI -> PHI"),
      parse_formula("K{C}(PHI -> PSI) -> K{C}PHI -> K{C}PSI"),
      parse_formula("~K{C}PHI -> K{C}~K{C}PHI"),
      parse_formula("K{C}PHI -> K{D}PHI"),
      parse_formula("B{C}PHI -> B{D}PHI"),
      parse_formula("~B{}PHI"),
      parse_formula("~B{C}true"),
      parse_formula("<K>{C}B{C}PHI & <K>{D}B{D}PSI -> (PHI | PSI -> B{CD}(PHI | PSI))"),
      parse_formula("K{C}(PHI -> PSI) -> B{C}PSI -> PHI -> B{C}PHI"),
      parse_formula("B{C}PHI -> K{C}(PHI -> B{C}PHI)"),
  };
  return patterns[static_cast<std::size_t>(a)];
}

inline bool is_meta_formula(const Formula& f) {
  return f.is(Connective::Var) && (f.name() == "PHI" || f.name() == "PSI");
}

inline std::optional<std::string> meta_coalition(const Coalition& c) {
  if (c.size() != 1) return std::nullopt;
  const auto& m = c.members().front();
  if (m == "C" || m == "D" || m == "CD") return m;
  return std::nullopt;
}

struct MatchState {
  AxiomBindings b;
  std::optional<Coalition> cd;
};

inline bool bind_formula(std::optional<Formula>& slot, const Formula& f) {
  if (slot) return *slot == f;
  slot = f;
  return true;
}

inline bool bind_coalition(std::optional<Coalition>& slot, const Coalition& c) {
  if (slot) return *slot == c;
  slot = c;
  return true;
}

inline bool match_pattern(const Formula& pat, const Formula& f, MatchState& st) {
  if (is_meta_formula(pat)) return bind_formula(pat.name() == "PHI" ? st.b.phi : st.b.psi, f);
  if (pat.kind() != f.kind()) return false;
  switch (pat.kind()) {
    case Connective::Var:
      return pat.name() == f.name();
    case Connective::Neg:
      return match_pattern(pat.operand(), f.operand(), st);
    case Connective::Implies:
      return match_pattern(pat.lhs(), f.lhs(), st) && match_pattern(pat.rhs(), f.rhs(), st);
    case Connective::Knows:
    case Connective::Blames: {
      if (auto meta = meta_coalition(pat.coalition())) {
        auto& slot = *meta == "C" ? st.b.c : *meta == "D" ? st.b.d : st.cd;
        if (!bind_coalition(slot, f.coalition())) return false;
      } else if (pat.coalition() != f.coalition()) {
        return false;
      }
      return match_pattern(pat.operand(), f.operand(), st);
    }
  }
  return false;
}

inline Formula substitute(const Formula& pat, const AxiomBindings& b) {
  if (is_meta_formula(pat)) {
    const auto& slot = pat.name() == "PHI" ? b.phi : b.psi;
    if (!slot) throw InvalidInput("schema needs a binding for " + pat.name());
    return *slot;
  }
  switch (pat.kind()) {
    case Connective::Var:
      return pat;
    case Connective::Neg:
      return Formula::neg(substitute(pat.operand(), b));
    case Connective::Implies:
      return Formula::implies(substitute(pat.lhs(), b), substitute(pat.rhs(), b));
    case Connective::Knows:
    case Connective::Blames: {
      Coalition c = pat.coalition();
      if (auto meta = meta_coalition(c)) {
        const auto& cs = b.c;
        const auto& ds = b.d;
        if (*meta == "C" || *meta == "CD") {
          if (!cs) throw InvalidInput("schema needs a binding for C");
        }
        if (*meta == "D" || *meta == "CD") {
          if (!ds) throw InvalidInput("schema needs a binding for D");
        }
        c = *meta == "C" ? *cs : *meta == "D" ? *ds : cs->united(*ds);
      }
      Formula inner = substitute(pat.operand(), b);
      return pat.is(Connective::Knows) ? Formula::knows(std::move(c), std::move(inner))
                                       : Formula::blames(std::move(c), std::move(inner));
    }
  }
  return pat;
}

inline bool side_conditions_hold(AxiomName a, const AxiomBindings& b) {
  switch (a) {
    case AxiomName::MonotonicityK:
    case AxiomName::MonotonicityB:
      return b.c->subset_of(*b.d);
    case AxiomName::JointResponsibility:
      return b.c->disjoint_with(*b.d);
    default:
      return true;
  }
}

}  // namespace detail

// Builds the instance of a schema. Throws InvalidInput when a needed binding
// is missing or a side condition fails.
inline Formula instantiate(AxiomName a, const AxiomBindings& b) {
  Formula f = detail::substitute(detail::schema_pattern(a), b);
  if ((a == AxiomName::MonotonicityK || a == AxiomName::MonotonicityB ||
       a == AxiomName::JointResponsibility) &&
      !detail::side_conditions_hold(a, b))
    throw InvalidInput(std::string("side condition of ") + std::string(axiom_label(a)) + " fails");
  return f;
}

inline std::optional<AxiomBindings> match_schema(AxiomName a, const Formula& f) {
  detail::MatchState st;
  if (!detail::match_pattern(detail::schema_pattern(a), f, st)) return std::nullopt;
  if (st.cd && (!st.b.c || !st.b.d || *st.cd != st.b.c->united(*st.b.d))) return std::nullopt;
  if (!detail::side_conditions_hold(a, st.b)) return std::nullopt;
  return st.b;
}

// First schema (in AxiomName order) that f instantiates.
inline std::optional<AxiomMatch> match_axiom(const Formula& f) {
  for (AxiomName a : kAllAxioms)
    if (auto b = match_schema(a, f)) return AxiomMatch{a, std::move(*b)};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tautology instances

namespace detail {

// Truth tables over n atoms packed 64 assignments per word.
class TruthTable {
 public:
  explicit TruthTable(std::size_t atoms)
      : atoms_(atoms), words_(atoms <= 6 ? 1 : std::size_t{1} << (atoms - 6)) {}

  std::vector<std::uint64_t> atom(std::size_t i) const {
    static constexpr std::array<std::uint64_t, 6> low = {
        0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
        0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    std::vector<std::uint64_t> t(words_);
    for (std::size_t w = 0; w < words_; ++w)
      t[w] = i < 6 ? low[i] : (((w >> (i - 6)) & 1) ? ~0ULL : 0ULL);
    return t;
  }

  bool all_true(const std::vector<std::uint64_t>& t) const {
    const std::uint64_t mask = atoms_ >= 6 ? ~0ULL : ((1ULL << (1u << atoms_)) - 1);
    for (std::uint64_t w : t)
      if ((w & mask) != mask) return false;
    return true;
  }

 private:
  std::size_t atoms_;
  std::size_t words_;
};

inline std::vector<std::uint64_t> table_of(const Formula& f, const std::map<Formula, std::size_t>& index,
                                           const TruthTable& tt) {
  switch (f.kind()) {
    case Connective::Neg: {
      auto t = table_of(f.operand(), index, tt);
      for (auto& w : t) w = ~w;
      return t;
    }
    case Connective::Implies: {
      auto a = table_of(f.lhs(), index, tt);
      auto b = table_of(f.rhs(), index, tt);
      for (std::size_t w = 0; w < a.size(); ++w) a[w] = ~a[w] | b[w];
      return a;
    }
    default:
      return tt.atom(index.at(f));
  }
}

}  // namespace detail

inline constexpr std::size_t kDefaultAtomLimit = 20;

// True iff f is a substitution instance of a propositional tautology, with
// K- and B-headed subformulas treated as opaque atoms.
inline bool is_tautology_instance(const Formula& f, std::size_t max_atoms = kDefaultAtomLimit) {
  const auto atoms = modal_atoms(f);
  if (atoms.size() > max_atoms) throw AtomBudgetExceeded(atoms.size(), max_atoms);
  std::map<Formula, std::size_t> index;
  for (const auto& a : atoms) index.emplace(a, index.size());
  detail::TruthTable tt(atoms.size());
  return tt.all_true(detail::table_of(f, index, tt));
}

// ---------------------------------------------------------------------------
// Proof scripts

struct TautJ {
  friend bool operator==(const TautJ&, const TautJ&) = default;
};
struct AxiomJ {
  AxiomName name;
  friend bool operator==(const AxiomJ&, const AxiomJ&) = default;
};
struct PremiseJ {
  friend bool operator==(const PremiseJ&, const PremiseJ&) = default;
};
// Modus Ponens from line `minor` (the antecedent) and line `major` (the implication).
struct MpJ {
  std::size_t minor;
  std::size_t major;
  friend bool operator==(const MpJ&, const MpJ&) = default;
};
struct NecJ {
  std::size_t line;
  Coalition coalition;
  friend bool operator==(const NecJ&, const NecJ&) = default;
};

using Justification = std::variant<TautJ, AxiomJ, PremiseJ, MpJ, NecJ>;

struct ProofLine {
  std::size_t index;  // 1-based
  Formula formula;
  Justification why;
};

struct ProofScript {
  std::vector<Formula> premises;
  std::vector<ProofLine> lines;
  Formula goal;
};

struct ProofReport {
  bool valid = false;
  std::size_t failed_line = 0;  // 1-based; 0 when the failure is not tied to a line
  std::string reason;
  std::vector<bool> depends_on_premise;  // per checked line
};

inline ProofReport check_proof(const ProofScript& script, std::size_t max_atoms = kDefaultAtomLimit) {
  ProofReport r;
  auto fail = [&r](std::size_t line, std::string why) {
    r.valid = false;
    r.failed_line = line;
    r.reason = std::move(why);
    return r;
  };
  if (script.lines.empty()) return fail(0, "script has no lines");

  const auto& lines = script.lines;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::size_t no = k + 1;
    const ProofLine& line = lines[k];
    if (line.index != no) return fail(no, "line numbers must run 1, 2, 3, ...; found " + std::to_string(line.index));
    auto earlier = [&](std::size_t ref) { return ref >= 1 && ref < no; };
    bool dep = false;

    if (std::holds_alternative<TautJ>(line.why)) {
      try {
        if (!is_tautology_instance(line.formula, max_atoms)) return fail(no, "not a tautology instance");
      } catch (const AtomBudgetExceeded& e) {
        return fail(no, e.what());
      }
    } else if (const auto* ax = std::get_if<AxiomJ>(&line.why)) {
      if (!match_schema(ax->name, line.formula))
        return fail(no, "not an instance of " + std::string(axiom_label(ax->name)));
    } else if (std::holds_alternative<PremiseJ>(line.why)) {
      if (std::find(script.premises.begin(), script.premises.end(), line.formula) == script.premises.end())
        return fail(no, "not among the premises");
      dep = true;
    } else if (const auto* mp = std::get_if<MpJ>(&line.why)) {
      if (!earlier(mp->minor) || !earlier(mp->major))
        return fail(no, "modus ponens must cite earlier lines");
      if (lines[mp->major - 1].formula != Formula::implies(lines[mp->minor - 1].formula, line.formula))
        return fail(no, "line " + std::to_string(mp->major) + " is not line " + std::to_string(mp->minor) +
                            " -> this formula");
      dep = r.depends_on_premise[mp->minor - 1] || r.depends_on_premise[mp->major - 1];
    } else if (const auto* nec = std::get_if<NecJ>(&line.why)) {
      if (!earlier(nec->line)) return fail(no, "necessitation must cite an earlier line");
      if (line.formula != Formula::knows(nec->coalition, lines[nec->line - 1].formula))
        return fail(no, "formula is not K" + nec->coalition.to_string() + " of line " + std::to_string(nec->line));
      if (r.depends_on_premise[nec->line - 1])
        return fail(no, "Necessitation applied to premise-dependent line " + std::to_string(nec->line));
    }
    r.depends_on_premise.push_back(dep);
  }
  if (lines.back().formula != script.goal) return fail(lines.size(), "last line is not the goal");
  r.valid = true;
  return r;
}

// ---------------------------------------------------------------------------
// Proof file format

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline Formula parse_formula_at(std::string_view text, std::size_t line) {
  try {
    return parse_formula(text);
  } catch (const SyntaxError& e) {
    throw FormatError(line, e.what());
  }
}

inline std::size_t parse_index(std::string_view s, std::size_t line) {
  std::string t = trim(s);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw FormatError(line, "expected a line number, found '" + t + "'");
  return static_cast<std::size_t>(std::stoull(t));
}

inline Justification parse_justification(std::string_view text, std::size_t line) {
  std::string t = trim(text);
  if (t == "taut") return TautJ{};
  if (t == "premise") return PremiseJ{};
  if (t.rfind("axiom:", 0) == 0) {
    auto name = axiom_from_label(trim(std::string_view(t).substr(6)));
    if (!name) throw FormatError(line, "unknown axiom '" + t.substr(6) + "'");
    return AxiomJ{*name};
  }
  std::istringstream in(t);
  std::string head;
  in >> head;
  if (head == "mp") {
    std::string i, j, extra;
    in >> i >> j;
    if (in >> extra) throw FormatError(line, "mp takes two line numbers");
    return MpJ{parse_index(i, line), parse_index(j, line)};
  }
  if (head == "nec") {
    std::string i;
    in >> i;
    std::string rest;
    std::getline(in, rest);
    Formula probe = parse_formula_at("K" + trim(rest) + "p", line);
    return NecJ{parse_index(i, line), probe.coalition()};
  }
  throw FormatError(line, "unknown justification '" + t + "'");
}

inline void print_justification(const Justification& j, std::string& out) {
  if (std::holds_alternative<TautJ>(j)) out += "taut";
  else if (std::holds_alternative<PremiseJ>(j)) out += "premise";
  else if (const auto* a = std::get_if<AxiomJ>(&j)) out += "axiom:" + std::string(axiom_label(a->name));
  else if (const auto* m = std::get_if<MpJ>(&j)) out += "mp " + std::to_string(m->minor) + " " + std::to_string(m->major);
  else if (const auto* n = std::get_if<NecJ>(&j)) out += "nec " + std::to_string(n->line) + " " + n->coalition.to_string();
}

}  // namespace detail

inline ProofScript parse_proof(std::string_view text) {
  std::vector<Formula> premises;
  std::vector<ProofLine> lines;
  std::optional<Formula> goal;
  std::istringstream in{std::string(text)};
  std::string raw;
  for (std::size_t no = 1; std::getline(in, raw); ++no) {
    std::string line = detail::trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.rfind("premises:", 0) == 0) {
      std::string rest = line.substr(9);
      std::size_t start = 0;
      while (start <= rest.size()) {
        std::size_t semi = rest.find(';', start);
        std::string item = detail::trim(std::string_view(rest).substr(start, semi == std::string::npos ? std::string::npos : semi - start));
        if (!item.empty()) premises.push_back(detail::parse_formula_at(item, no));
        if (semi == std::string::npos) break;
        start = semi + 1;
      }
    } else if (line.rfind("goal:", 0) == 0) {
      if (goal) throw FormatError(no, "goal given twice");
      goal = detail::parse_formula_at(line.substr(5), no);
    } else {
      std::size_t dot = line.find('.');
      std::size_t semi = line.rfind(';');
      if (dot == std::string::npos || semi == std::string::npos || semi < dot)
        throw FormatError(no, "expected '<n>. <formula> ; <justification>'");
      ProofLine pl{detail::parse_index(line.substr(0, dot), no),
                   detail::parse_formula_at(line.substr(dot + 1, semi - dot - 1), no),
                   detail::parse_justification(line.substr(semi + 1), no)};
      lines.push_back(std::move(pl));
    }
  }
  if (!goal) throw FormatError(0, "missing 'goal:' line");
  return ProofScript{std::move(premises), std::move(lines), std::move(*goal)};
}

inline ProofScript load_proof_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_proof(ss.str());
}

inline std::string print_proof(const ProofScript& s) {
  std::string out;
  if (!s.premises.empty()) {
    out += "premises: ";
    for (std::size_t i = 0; i < s.premises.size(); ++i) {
      if (i) out += " ; ";
      out += print_formula(s.premises[i]);
    }
    out += "\n";
  }
  out += "goal: " + print_formula(s.goal) + "\n";
  for (const auto& l : s.lines) {
    out += std::to_string(l.index) + ". " + print_formula(l.formula) + " ; ";
    detail::print_justification(l.why, out);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deduction

// Turns a proof of goal from premises X + {phi} into a proof of phi -> goal
// from X. Every input line k is replaced by lines ending in phi -> line_k:
//   theorem line      the line itself, taut line_k -> (phi -> line_k), mp
//   other premise     the premise, the same tautology, mp
//   phi itself        taut phi -> phi
//   mp from i, j      taut (phi->i) -> ((phi->(i->k)) -> (phi->k)), mp, mp
// Theorem lines keep their original justification (Necessitation included),
// so at most three output lines are produced per input line.
inline ProofScript deduction_transform(const ProofScript& script, const Formula& phi) {
  if (std::find(script.premises.begin(), script.premises.end(), phi) == script.premises.end())
    throw PhiNotPremise("'" + print_formula(phi) + "' is not a premise of the script");
  const ProofReport report = check_proof(script);
  if (!report.valid)
    throw InvalidInput("input script is invalid at line " + std::to_string(report.failed_line) + ": " +
                       report.reason);

  ProofScript out{{}, {}, Formula::implies(phi, script.goal)};
  for (const auto& p : script.premises)
    if (p != phi) out.premises.push_back(p);

  std::vector<std::size_t> copy_of(script.lines.size(), 0);     // theorem lines re-emitted as-is
  std::vector<std::size_t> implied_at(script.lines.size(), 0);  // where phi -> line_k is proved
  auto emit = [&out](Formula f, Justification j) {
    out.lines.push_back(ProofLine{out.lines.size() + 1, std::move(f), std::move(j)});
    return out.lines.size();
  };
  auto weaken = [&](std::size_t source, const Formula& f) {
    Formula target = Formula::implies(phi, f);
    std::size_t t = emit(Formula::implies(f, target), TautJ{});
    return emit(std::move(target), MpJ{source, t});
  };

  for (std::size_t k = 0; k < script.lines.size(); ++k) {
    const ProofLine& line = script.lines[k];
    const Formula& f = line.formula;
    if (!report.depends_on_premise[k]) {
      Justification j = line.why;
      if (auto* mp = std::get_if<MpJ>(&j)) *mp = MpJ{copy_of[mp->minor - 1], copy_of[mp->major - 1]};
      if (auto* nec = std::get_if<NecJ>(&j)) nec->line = copy_of[nec->line - 1];
      copy_of[k] = emit(f, std::move(j));
      implied_at[k] = weaken(copy_of[k], f);
    } else if (std::holds_alternative<PremiseJ>(line.why)) {
      if (f == phi) {
        implied_at[k] = emit(Formula::implies(phi, phi), TautJ{});
      } else {
        implied_at[k] = weaken(emit(f, PremiseJ{}), f);
      }
    } else if (const auto* mp = std::get_if<MpJ>(&line.why)) {
      const Formula& minor = script.lines[mp->minor - 1].formula;
      Formula a = Formula::implies(phi, minor);
      Formula b = Formula::implies(phi, Formula::implies(minor, f));
      Formula c = Formula::implies(phi, f);
      std::size_t t = emit(Formula::implies(a, Formula::implies(b, c)), TautJ{});
      std::size_t m1 = emit(Formula::implies(b, c), MpJ{implied_at[mp->minor - 1], t});
      implied_at[k] = emit(c, MpJ{implied_at[mp->major - 1], m1});
    } else {
      // check_proof rejects Necessitation on premise-dependent lines.
      throw InvalidInput("line " + std::to_string(k + 1) + " cannot be transformed");
    }
  }
  return out;
}

}  // namespace blamelogic
