#pragma once

// Propositional formulas over named atoms, truth tables with caller-chosen
// row order, exhaustive tautology checking, and the substitution ledger.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "smw/errors.hpp"

namespace smw::logic {

enum class Op { Atom, Not, And, Xor, Or, Implies, Iff };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Op op = Op::Atom;
  std::string name;  // atoms only
  FormulaPtr lhs;    // Not uses lhs only
  FormulaPtr rhs;
};

inline FormulaPtr atom(std::string name) {
  return std::make_shared<const Formula>(Formula{Op::Atom, std::move(name), nullptr, nullptr});
}
inline FormulaPtr negate(FormulaPtr f) {
  return std::make_shared<const Formula>(Formula{Op::Not, {}, std::move(f), nullptr});
}
inline FormulaPtr binary(Op op, FormulaPtr a, FormulaPtr b) {
  return std::make_shared<const Formula>(Formula{op, {}, std::move(a), std::move(b)});
}

inline bool same(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return a == b;
  if (a->op != b->op) return false;
  if (a->op == Op::Atom) return a->name == b->name;
  return same(a->lhs, b->lhs) && same(a->rhs, b->rhs);
}

inline std::string_view op_symbol(Op op) {
  switch (op) {
    case Op::And: return "&";
    case Op::Xor: return "^";
    case Op::Or: return "|";
    case Op::Implies: return "->";
    case Op::Iff: return "<->";
    default: return "";
  }
}

// Binary operands are always parenthesised, so output re-parses to the same tree.
inline std::string to_string(const FormulaPtr& f) {
  switch (f->op) {
    case Op::Atom: return f->name;
    case Op::Not: {
      std::string inner = to_string(f->lhs);
      return f->lhs->op == Op::Atom || f->lhs->op == Op::Not ? "!" + inner : "!(" + inner + ")";
    }
    default: {
      auto side = [](const FormulaPtr& g) {
        std::string s = to_string(g);
        return g->op == Op::Atom || g->op == Op::Not ? s : "(" + s + ")";
      };
      return side(f->lhs) + " " + std::string(op_symbol(f->op)) + " " + side(f->rhs);
    }
  }
}

namespace detail {

// Precedence, loosest first: <-> (left), -> (right), |, ^, &, !.
class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  FormulaPtr parse() {
    auto f = iff();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in \"" + std::string(text_) + "\"");
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip();
    if (text_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }

  FormulaPtr iff() {
    auto f = implies();
    while (accept("<->")) f = binary(Op::Iff, f, implies());
    return f;
  }

  FormulaPtr implies() {
    auto f = disjunction();
    if (accept("->")) return binary(Op::Implies, f, implies());
    return f;
  }

  FormulaPtr disjunction() {
    auto f = exclusive();
    while (accept("|")) f = binary(Op::Or, f, exclusive());
    return f;
  }

  FormulaPtr exclusive() {
    auto f = conjunction();
    while (accept("^")) f = binary(Op::Xor, f, conjunction());
    return f;
  }

  FormulaPtr conjunction() {
    auto f = unary();
    while (accept("&")) f = binary(Op::And, f, unary());
    return f;
  }

  FormulaPtr unary() {
    if (accept("!")) return negate(unary());
    if (accept("(")) return group(')');
    if (accept("{")) return group('}');
    return identifier();
  }

  FormulaPtr group(char close) {
    auto f = iff();
    if (!accept(std::string_view(&close, 1))) fail(std::string("expected '") + close + "'");
    return f;
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail(pos_ == text_.size() ? "unexpected end of formula" : "expected an atom");
    if (std::isdigit(static_cast<unsigned char>(text_[start]))) fail("atoms cannot start with a digit");
    return std::string(text_.substr(start, pos_ - start));
  }

  // Atoms are identifiers or predicate applications such as P(x).
  FormulaPtr identifier() {
    std::string name = word();
    std::size_t save = pos_;
    if (accept("(")) {
      skip();
      if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        std::string arg = word();
        if (accept(")")) return atom(name + "(" + arg + ")");
      }
      pos_ = save;
      fail("malformed predicate application");
    }
    return atom(name);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void collect_atoms(const FormulaPtr& f, std::vector<std::string>& out) {
  if (f->op == Op::Atom) {
    if (std::find(out.begin(), out.end(), f->name) == out.end()) out.push_back(f->name);
    return;
  }
  collect_atoms(f->lhs, out);
  if (f->rhs) collect_atoms(f->rhs, out);
}

}  // namespace detail

inline FormulaPtr parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

// Atoms in order of first appearance.
inline std::vector<std::string> atoms_of(const FormulaPtr& f) {
  std::vector<std::string> out;
  detail::collect_atoms(f, out);
  return out;
}

// Every atom is either independent or defined by a formula over other atoms.
class AtomEnv {
 public:
  void declare(const std::string& name) {
    if (!defs_.count(name)) defs_[name] = nullptr;
  }

  void define(const std::string& name, FormulaPtr definition) {
    for (const auto& a : atoms_of(definition)) {
      if (!defs_.count(a)) throw UnknownAtom("'" + a + "' in the definition of '" + name + "'");
    }
    auto previous = defs_.count(name) ? defs_[name] : nullptr;
    defs_[name] = definition;
    if (reaches(name, name)) {
      defs_[name] = previous;
      throw DefinitionCycle("'" + name + "' would depend on itself");
    }
  }

  bool contains(const std::string& name) const { return defs_.count(name) > 0; }
  bool is_defined(const std::string& name) const {
    auto it = defs_.find(name);
    return it != defs_.end() && it->second;
  }
  const FormulaPtr& definition(const std::string& name) const {
    auto it = defs_.find(name);
    if (it == defs_.end()) throw UnknownAtom("'" + name + "'");
    return it->second;
  }

  // Independent atoms the formula depends on, in order of first appearance
  // after unfolding definitions.
  std::vector<std::string> independent_atoms(const FormulaPtr& f) const {
    std::vector<std::string> out;
    unfold(f, out);
    return out;
  }

  // Declares every atom of `f` that is not yet known as independent.
  void declare_free(const FormulaPtr& f) {
    for (const auto& a : atoms_of(f)) declare(a);
  }

 private:
  bool reaches(const std::string& from, const std::string& target) const {
    std::set<std::string> seen;
    std::vector<std::string> todo{from};
    while (!todo.empty()) {
      auto cur = todo.back();
      todo.pop_back();
      auto it = defs_.find(cur);
      if (it == defs_.end() || !it->second) continue;
      for (const auto& a : atoms_of(it->second)) {
        if (a == target) return true;
        if (seen.insert(a).second) todo.push_back(a);
      }
    }
    return false;
  }

  void unfold(const FormulaPtr& f, std::vector<std::string>& out) const {
    for (const auto& a : atoms_of(f)) {
      const auto& def = definition(a);
      if (def) {
        unfold(def, out);
      } else if (std::find(out.begin(), out.end(), a) == out.end()) {
        out.push_back(a);
      }
    }
  }

  std::map<std::string, FormulaPtr> defs_;
};

// Material: p -> q is !p | q. Biconditional: arrows are read as <->, which
// is the reading under which the published table's arrow columns come out.
enum class ArrowReading { Material, Biconditional };

using Assignment = std::vector<std::pair<std::string, bool>>;

inline bool evaluate(const FormulaPtr& f, const AtomEnv& env, const std::map<std::string, bool>& values,
                     ArrowReading reading = ArrowReading::Material) {
  switch (f->op) {
    case Op::Atom: {
      const auto& def = env.definition(f->name);
      if (def) return evaluate(def, env, values, reading);
      auto it = values.find(f->name);
      if (it == values.end()) throw UnknownAtom("no value for '" + f->name + "'");
      return it->second;
    }
    case Op::Not: return !evaluate(f->lhs, env, values, reading);
    default: break;
  }
  bool a = evaluate(f->lhs, env, values, reading);
  bool b = evaluate(f->rhs, env, values, reading);
  switch (f->op) {
    case Op::And: return a && b;
    case Op::Or: return a || b;
    case Op::Xor: return a != b;
    case Op::Implies: return reading == ArrowReading::Material ? (!a || b) : a == b;
    case Op::Iff: return a == b;
    default: return false;
  }
}

struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<bool>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};

// "TTF,FTT" -> rows; each row must have `width` letters.
inline std::vector<std::vector<bool>> parse_rows(std::string_view spec, std::size_t width) {
  std::vector<std::vector<bool>> rows;
  std::stringstream in{std::string(spec)};
  std::string item;
  while (std::getline(in, item, ',')) {
    std::vector<bool> row;
    for (char ch : item) {
      if (ch == 'T') row.push_back(true);
      else if (ch == 'F') row.push_back(false);
      else if (!std::isspace(static_cast<unsigned char>(ch))) throw ParseError("row '" + item + "' must use T/F");
    }
    if (row.size() != width)
      throw ParseError("row '" + item + "' has " + std::to_string(row.size()) + " values, expected " +
                       std::to_string(width));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no rows given");
  return rows;
}

// All assignments, all-true first, first atom varying slowest.
inline std::vector<std::vector<bool>> standard_rows(std::size_t width) {
  std::vector<std::vector<bool>> rows;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << width); ++m) {
    std::vector<bool> row(width);
    for (std::size_t i = 0; i < width; ++i) row[i] = !((m >> (width - 1 - i)) & 1U);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Columns: the atoms, then each requested formula. Rows empty means
// standard_rows over the atoms.
inline Table truth_table(const std::vector<FormulaPtr>& columns, const AtomEnv& env,
                         const std::vector<std::string>& atoms, std::vector<std::vector<bool>> rows = {},
                         ArrowReading reading = ArrowReading::Material) {
  for (const auto& a : atoms) {
    if (!env.contains(a)) throw UnknownAtom("'" + a + "'");
    if (env.is_defined(a)) throw UnknownAtom("'" + a + "' is defined, not independent");
  }
  for (const auto& col : columns) {
    for (const auto& a : env.independent_atoms(col)) {
      if (std::find(atoms.begin(), atoms.end(), a) == atoms.end())
        throw UnknownAtom("'" + a + "' is not among the table's atoms");
    }
  }
  if (rows.empty()) rows = standard_rows(atoms.size());
  Table t;
  t.headers = atoms;
  for (const auto& col : columns) t.headers.push_back(to_string(col));
  for (const auto& assignment : rows) {
    if (assignment.size() != atoms.size()) throw ParseError("row width does not match the atom count");
    std::map<std::string, bool> values;
    for (std::size_t i = 0; i < atoms.size(); ++i) values[atoms[i]] = assignment[i];
    std::vector<bool> row = assignment;
    for (const auto& col : columns) row.push_back(evaluate(col, env, values, reading));
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct TautologyResult {
  bool tautology = true;
  std::optional<Assignment> counterexample;
};

inline constexpr std::size_t kMaxTautologyAtoms = 24;

// Enumerates assignments all-true first; the counterexample is the first
// falsifying assignment over the independent atoms.
inline TautologyResult is_tautology(const FormulaPtr& f, const AtomEnv& env,
                                    ArrowReading reading = ArrowReading::Material) {
  auto atoms = env.independent_atoms(f);
  if (atoms.size() > kMaxTautologyAtoms)
    throw TooManyAtoms(std::to_string(atoms.size()) + " independent atoms (limit " +
                       std::to_string(kMaxTautologyAtoms) + ")");
  const std::size_t n = atoms.size();
  std::map<std::string, bool> values;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    for (std::size_t i = 0; i < n; ++i) values[atoms[i]] = !((m >> (n - 1 - i)) & 1U);
    if (!evaluate(f, env, values, reading)) {
      Assignment cex;
      for (const auto& a : atoms) cex.emplace_back(a, values[a]);
      return {false, cex};
    }
  }
  return {true, std::nullopt};
}

inline constexpr std::string_view kPaperRows = "TTT,TTF,TFT,TFF,FTT,FFT,FFF,FTF";

struct PaperTableOptions {
  ArrowReading reading = ArrowReading::Biconditional;
  bool define_ps = true;  // P(S) := (x -> P(x)) -> S
  std::string rows = std::string(kPaperRows);
};

inline AtomEnv paper_env(bool define_ps) {
  AtomEnv env;
  for (const char* a : {"S", "x", "P(x)"}) env.declare(a);
  if (define_ps) {
    env.define("P(S)", parse_formula("(x -> P(x)) -> S"));
  } else {
    env.declare("P(S)");
  }
  return env;
}

inline Table paper_table(const PaperTableOptions& opts = {}) {
  auto env = paper_env(opts.define_ps);
  std::vector<FormulaPtr> columns{parse_formula("x -> P(x)"), parse_formula("(x -> P(x)) -> S"),
                                  parse_formula("P(S)"), parse_formula("P(S) <-> ((x -> P(x)) -> S)")};
  std::vector<std::string> atoms{"S", "x", "P(x)"};
  if (!opts.define_ps) atoms.push_back("P(S)");
  return truth_table(columns, env, atoms, parse_rows(opts.rows, atoms.size()), opts.reading);
}

inline std::string render_text(const Table& t) {
  std::vector<std::size_t> width;
  for (const auto& h : t.headers) width.push_back(std::max<std::size_t>(h.size(), 1));
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += " | ";
      out += cells[i];
      if (i + 1 < cells.size()) out.append(width[i] - cells[i].size(), ' ');
    }
    return out + "\n";
  };
  std::string out = line(t.headers);
  std::string rule;
  for (std::size_t i = 0; i < width.size(); ++i) {
    if (i) rule += "-+-";
    rule.append(width[i], '-');
  }
  out += rule + "\n";
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    for (bool v : row) cells.emplace_back(v ? "T" : "F");
    out += line(cells);
  }
  return out;
}

inline std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.headers.size(); ++i) out += (i ? "," : "") + t.headers[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += std::string(i ? "," : "") + (row[i] ? "T" : "F");
    out += "\n";
  }
  return out;
}

// One JSON object per row, keys in column order.
inline std::string render_jsonl(const Table& t) {
  std::string out;
  for (const auto& row : t.rows) {
    nlohmann::ordered_json j;
    for (std::size_t i = 0; i < row.size(); ++i) j[t.headers[i]] = static_cast<bool>(row[i]);
    out += j.dump() + "\n";
  }
  return out;
}

// Directed record of performed substitutions (from -> to).
enum class LedgerMode { Default, Strict };

struct Violation {
  enum class Kind { Triple, Cycle };
  Kind kind = Kind::Triple;
  std::vector<std::string> chain;

  std::string describe() const {
    std::string out = kind == Kind::Triple ? "forbidden triple " : "cycle ";
    for (std::size_t i = 0; i < chain.size(); ++i) out += (i ? " -> " : "") + chain[i];
    return out;
  }
  friend bool operator==(const Violation&, const Violation&) = default;
};

class SubstLedger {
 public:
  explicit SubstLedger(LedgerMode mode = LedgerMode::Default) : mode_(mode) {}

  LedgerMode mode() const { return mode_; }
  const std::set<std::pair<std::string, std::string>>& edges() const { return edges_; }
  bool has_edge(const std::string& a, const std::string& b) const { return edges_.count({a, b}) > 0; }

  // Default mode rejects an edge that closes x -> y -> z -> x (names need not
  // be distinct). Strict mode rejects any edge that closes a directed cycle.
  std::optional<Violation> check(const std::string& from, const std::string& to) const {
    auto with = [&](const std::string& a, const std::string& b) {
      return (a == from && b == to) || has_edge(a, b);
    };
    std::set<std::string> nodes{from, to};
    for (const auto& [a, b] : edges_) {
      nodes.insert(a);
      nodes.insert(b);
    }
    for (const auto& z : nodes) {
      if (with(to, z) && with(z, from)) return Violation{Violation::Kind::Triple, {to, z, from}};
    }
    if (mode_ == LedgerMode::Strict) {
      if (auto path = path_between(to, from)) {
        std::vector<std::string> chain{from};
        chain.insert(chain.end(), path->begin(), path->end());
        return Violation{Violation::Kind::Cycle, chain};
      }
    }
    return std::nullopt;
  }

  void add_unchecked(const std::string& from, const std::string& to) { edges_.insert({from, to}); }

 private:
  // Shortest path a ... b over recorded edges (a itself when a == b).
  std::optional<std::vector<std::string>> path_between(const std::string& a, const std::string& b) const {
    std::map<std::string, std::string> parent{{a, a}};
    std::vector<std::string> frontier{a};
    while (!frontier.empty()) {
      std::vector<std::string> next;
      for (const auto& cur : frontier) {
        if (cur == b) {
          std::vector<std::string> path{b};
          for (std::string n = b; n != a; n = parent[n]) path.push_back(parent[n]);
          std::reverse(path.begin(), path.end());
          return path;
        }
        for (auto it = edges_.lower_bound({cur, ""}); it != edges_.end() && it->first == cur; ++it) {
          if (parent.emplace(it->second, cur).second) next.push_back(it->second);
        }
      }
      frontier = std::move(next);
    }
    return std::nullopt;
  }

  LedgerMode mode_;
  std::set<std::pair<std::string, std::string>> edges_;
};

using LedgerResult = std::variant<SubstLedger, Violation>;

inline LedgerResult record_subst(const SubstLedger& ledger, const std::string& from, const std::string& to) {
  if (auto v = ledger.check(from, to)) return *v;
  SubstLedger next = ledger;
  next.add_unchecked(from, to);
  return next;
}

}  // namespace smw::logic
