// Formulas of the bimodal language of distributed knowledge (K) and
// coalition blameworthiness (B).
//
// The stored tree has exactly five node kinds: variables, negation,
// implication, K_C and B_C. Disjunction, conjunction, equivalence, the
// constants and the dual modality <K> are parser sugar only and are expanded
// on the way in:
//
//   a | b    :=  ~a -> b
//   a & b    :=  ~(a -> ~b)
//   a <-> b  :=  (a -> b) & (b -> a)
//   true     :=  p -> p
//   false    :=  ~(p -> p)
//   <K>{C}a  :=  ~K{C}~a
//
// The printer never re-sugars.

#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blamelogic/error.hpp"

namespace blamelogic {

using Agent = std::string;

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

// A finite set of agents, kept sorted and duplicate free.
class Coalition {
 public:
  Coalition() = default;
  Coalition(std::initializer_list<Agent> members) : members_(members) { canonicalize(); }
  explicit Coalition(std::vector<Agent> members) : members_(std::move(members)) { canonicalize(); }

  const std::vector<Agent>& members() const noexcept { return members_; }
  bool empty() const noexcept { return members_.empty(); }
  std::size_t size() const noexcept { return members_.size(); }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool contains(std::string_view a) const {
    return std::binary_search(members_.begin(), members_.end(), a);
  }
  bool subset_of(const Coalition& o) const {
    return std::includes(o.members_.begin(), o.members_.end(), members_.begin(), members_.end());
  }
  bool disjoint_with(const Coalition& o) const {
    return std::none_of(members_.begin(), members_.end(),
                        [&](const Agent& a) { return o.contains(a); });
  }
  Coalition united(const Coalition& o) const {
    std::vector<Agent> out;
    std::set_union(members_.begin(), members_.end(), o.members_.begin(), o.members_.end(),
                   std::back_inserter(out));
    return Coalition(std::move(out));
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (i) s += ',';
      s += members_[i];
    }
    return s + "}";
  }

  friend bool operator==(const Coalition&, const Coalition&) = default;
  friend auto operator<=>(const Coalition&, const Coalition&) = default;

 private:
  void canonicalize() {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  std::vector<Agent> members_;
};

enum class Connective : std::uint8_t { Var, Neg, Implies, Knows, Blames };

// Immutable formula handle. Copies share structure.
class Formula {
 public:
  static Formula var(std::string name) {
    return Formula(make(Connective::Var, std::move(name), {}, nullptr, nullptr));
  }
  static Formula neg(Formula f) {
    return Formula(make(Connective::Neg, {}, {}, std::move(f.node_), nullptr));
  }
  static Formula implies(Formula lhs, Formula rhs) {
    return Formula(make(Connective::Implies, {}, {}, std::move(lhs.node_), std::move(rhs.node_)));
  }
  static Formula knows(Coalition c, Formula f) {
    return Formula(make(Connective::Knows, {}, std::move(c), std::move(f.node_), nullptr));
  }
  static Formula blames(Coalition c, Formula f) {
    return Formula(make(Connective::Blames, {}, std::move(c), std::move(f.node_), nullptr));
  }

  Connective kind() const noexcept { return node_->kind; }
  bool is(Connective k) const noexcept { return node_->kind == k; }
  // Variable name; empty for other kinds.
  const std::string& name() const noexcept { return node_->name; }
  // Modality index; empty for non-modal kinds.
  const Coalition& coalition() const noexcept { return node_->coalition; }
  // The single child of Neg/Knows/Blames, or the left child of Implies.
  Formula operand() const { return Formula(node_->first); }
  Formula lhs() const { return Formula(node_->first); }
  Formula rhs() const { return Formula(node_->second); }
  std::size_t hash() const noexcept { return node_->hash; }
  std::size_t size() const noexcept { return node_->size; }
  std::size_t depth() const noexcept { return node_->depth; }

  friend bool operator==(const Formula& a, const Formula& b) { return compare(*a.node_, *b.node_) == 0; }
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    return compare(*a.node_, *b.node_) <=> 0;
  }

 private:
  struct Node {
    Connective kind;
    std::string name;
    Coalition coalition;
    std::shared_ptr<const Node> first;
    std::shared_ptr<const Node> second;
    std::size_t hash = 0;
    std::size_t size = 1;
    std::size_t depth = 0;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> make(Connective k, std::string name, Coalition c,
                                          std::shared_ptr<const Node> a,
                                          std::shared_ptr<const Node> b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->name = std::move(name);
    n->coalition = std::move(c);
    n->first = std::move(a);
    n->second = std::move(b);
    std::size_t h = std::hash<int>{}(static_cast<int>(k)) * 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(std::hash<std::string>{}(n->name));
    for (const auto& m : n->coalition) mix(std::hash<std::string>{}(m));
    if (n->first) {
      mix(n->first->hash);
      n->size += n->first->size;
      n->depth = n->first->depth + 1;
    }
    if (n->second) {
      mix(n->second->hash);
      n->size += n->second->size;
      n->depth = std::max(n->depth, n->second->depth + 1);
    }
    n->hash = h;
    return n;
  }

  // Total order: hash first (cheap rejection), then structure.
  static int compare(const Node& a, const Node& b) {
    if (&a == &b) return 0;
    if (a.hash != b.hash) return a.hash < b.hash ? -1 : 1;
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
    if (a.coalition != b.coalition) return a.coalition < b.coalition ? -1 : 1;
    if (a.first) {
      if (int c = compare(*a.first, *b.first)) return c;
    }
    if (a.second) {
      if (int c = compare(*a.second, *b.second)) return c;
    }
    return 0;
  }

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

// ---------------------------------------------------------------------------
// Derived forms

inline Formula disj(Formula a, Formula b) { return Formula::implies(Formula::neg(std::move(a)), std::move(b)); }
inline Formula conj(Formula a, Formula b) {
  return Formula::neg(Formula::implies(std::move(a), Formula::neg(std::move(b))));
}
inline Formula iff(const Formula& a, const Formula& b) {
  return conj(Formula::implies(a, b), Formula::implies(b, a));
}
inline Formula top() { return Formula::implies(Formula::var("p"), Formula::var("p")); }
inline Formula bottom() { return Formula::neg(top()); }
// <K>_C f, the dual of K_C.
inline Formula considers_possible(Coalition c, Formula f) {
  return Formula::neg(Formula::knows(std::move(c), Formula::neg(std::move(f))));
}

// ---------------------------------------------------------------------------
// Printer

namespace detail {

inline void print_into(const Formula& f, std::string& out) {
  auto operand = [&out](const Formula& g) {
    if (g.is(Connective::Implies)) {
      out += '(';
      print_into(g, out);
      out += ')';
    } else {
      print_into(g, out);
    }
  };
  switch (f.kind()) {
    case Connective::Var:
      out += f.name();
      break;
    case Connective::Neg:
      out += '~';
      operand(f.operand());
      break;
    case Connective::Knows:
    case Connective::Blames:
      out += f.is(Connective::Knows) ? 'K' : 'B';
      out += f.coalition().to_string();
      operand(f.operand());
      break;
    case Connective::Implies:
      operand(f.lhs());
      out += " -> ";
      print_into(f.rhs(), out);
      break;
  }
}

}  // namespace detail

inline std::string print_formula(const Formula& f) {
  std::string out;
  detail::print_into(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse() {
    Formula f = parse_iff();
    skip_ws();
    if (pos_ != text_.size()) fail({"end of input", "'->'", "'<->'", "'|'", "'&'"});
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::set<std::string> expected) {
    skip_ws();
    std::string found = "end of input";
    if (pos_ < text_.size()) {
      std::size_t end = pos_ + 1;
      while (end < text_.size() && end - pos_ < 12 && !std::isspace(static_cast<unsigned char>(text_[end])))
        ++end;
      found = "'" + std::string(text_.substr(pos_, end - pos_)) + "'";
    }
    throw SyntaxError(pos_, std::move(expected), found);
  }

  // Reads an identifier at the cursor without consuming leading keywords.
  std::string peek_identifier() {
    skip_ws();
    std::size_t end = pos_;
    if (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) {
      ++end;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
        ++end;
    }
    return std::string(text_.substr(pos_, end - pos_));
  }

  Formula parse_iff() {
    Formula f = parse_imp();
    while (accept("<->")) f = iff(f, parse_imp());
    return f;
  }

  Formula parse_imp() {
    Formula f = parse_or();
    // "->" must not be mistaken for the tail of "<->"; parse_or never leaves
    // the cursor on '<', so a plain prefix test is enough.
    if (accept("->")) return Formula::implies(std::move(f), parse_imp());
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept("|")) f = disj(std::move(f), parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept("&")) f = conj(std::move(f), parse_unary());
    return f;
  }

  Coalition parse_coalition() {
    if (!accept("{")) fail({"'{'"});
    std::vector<Agent> members;
    if (accept("}")) return Coalition{};
    for (;;) {
      std::string id = peek_identifier();
      if (id.empty()) fail({"agent name"});
      pos_ += id.size();
      members.push_back(std::move(id));
      if (accept("}")) break;
      if (!accept(",")) fail({"','", "'}'"});
    }
    return Coalition(std::move(members));
  }

  Formula parse_unary() {
    if (accept("~")) return Formula::neg(parse_unary());
    if (accept("<K>")) {
      Coalition c = parse_coalition();
      return considers_possible(std::move(c), parse_unary());
    }
    if (accept("(")) {
      Formula f = parse_iff();
      if (!accept(")")) fail({"')'", "'->'", "'<->'", "'|'", "'&'"});
      return f;
    }
    std::string id = peek_identifier();
    if (id.empty()) fail({"'~'", "'K'", "'B'", "'<K>'", "'('", "identifier", "'true'", "'false'"});
    pos_ += id.size();
    if (id == "K" || id == "B") {
      Coalition c = parse_coalition();
      Formula inner = parse_unary();
      return id == "K" ? Formula::knows(std::move(c), std::move(inner))
                       : Formula::blames(std::move(c), std::move(inner));
    }
    if (id == "true") return top();
    if (id == "false") return bottom();
    return Formula::var(std::move(id));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

// ---------------------------------------------------------------------------
// Queries

// Maximal subformulas headed by Var, Knows or Blames: the atoms of f read as a
// Boolean combination.
inline std::set<Formula> modal_atoms(const Formula& f) {
  std::set<Formula> atoms;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = std::move(stack.back());
    stack.pop_back();
    switch (g.kind()) {
      case Connective::Neg:
        stack.push_back(g.operand());
        break;
      case Connective::Implies:
        stack.push_back(g.lhs());
        stack.push_back(g.rhs());
        break;
      default:
        atoms.insert(std::move(g));
    }
  }
  return atoms;
}

// Every agent named in a modality index anywhere inside f.
inline std::set<Agent> agents_of(const Formula& f) {
  std::set<Agent> out;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = std::move(stack.back());
    stack.pop_back();
    switch (g.kind()) {
      case Connective::Var:
        break;
      case Connective::Implies:
        stack.push_back(g.lhs());
        stack.push_back(g.rhs());
        break;
      default:
        out.insert(g.coalition().begin(), g.coalition().end());
        stack.push_back(g.operand());
    }
  }
  return out;
}

inline std::set<std::string> variables_of(const Formula& f) {
  std::set<std::string> out;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = std::move(stack.back());
    stack.pop_back();
    switch (g.kind()) {
      case Connective::Var:
        out.insert(g.name());
        break;
      case Connective::Implies:
        stack.push_back(g.lhs());
        stack.push_back(g.rhs());
        break;
      default:
        stack.push_back(g.operand());
    }
  }
  return out;
}

}  // namespace blamelogic
