#pragma once

// Standard Descriptions (S.D.) and Description Numbers (D.N.).
//
// Text grammar, one instruction per ';'-terminated group:
//
//   quintuple := state symbol symbol move state ';'
//   meta      := state symbol 'E' '(' digits? ')' state state ';'
//   state     := 'D' 'A'+        (q_i is D followed by i A's)
//   symbol    := 'D' 'C'*        (S_j is D followed by j C's)
//   move      := 'L' | 'R' | 'N'
//
// A meta instruction asks the evaluator for the verdict on another D.N. and
// continues in the first state on 's', the second on 'u'. Empty digits mean
// "my own D.N.".
//
// Digit map: A->1 C->2 D->3 L->4 R->5 N->6 ;->7 E->8 (->9 )->0. Digits of a
// literal target are copied verbatim, so a target must be balanced when 9 is
// read as an opening and 0 as a closing delimiter; every D.N. produced here
// has that property.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "smw/description_number.hpp"
#include "smw/errors.hpp"

namespace smw {

using StateIndex = std::uint32_t;
using SymbolIndex = std::uint32_t;

enum class Move : char { L = 'L', R = 'R', N = 'N' };

struct Quintuple {
  StateIndex state = 1;
  SymbolIndex scanned = 0;
  SymbolIndex printed = 0;
  Move move = Move::N;
  StateIndex next_state = 1;

  friend bool operator==(const Quintuple&, const Quintuple&) = default;
};

// nullopt targets the description's own number.
using MetaTarget = std::optional<DescriptionNumber>;

struct MetaInstruction {
  StateIndex state = 1;
  SymbolIndex scanned = 0;
  MetaTarget target;
  StateIndex on_s = 1;
  StateIndex on_u = 1;

  bool calls_self() const { return !target.has_value(); }
  friend bool operator==(const MetaInstruction&, const MetaInstruction&) = default;
};

using Instruction = std::variant<Quintuple, MetaInstruction>;

inline StateIndex source_state(const Instruction& ins) {
  return std::visit([](const auto& i) { return i.state; }, ins);
}
inline SymbolIndex scanned_symbol(const Instruction& ins) {
  return std::visit([](const auto& i) { return i.scanned; }, ins);
}

namespace detail {

inline bool balanced_digits(std::string_view digits) {
  long depth = 0;
  for (char ch : digits) {
    if (ch == '9') ++depth;
    if (ch == '0' && --depth < 0) return false;
  }
  return depth == 0;
}

}  // namespace detail

// Validated, deterministic transition table.
class StandardDescription {
 public:
  explicit StandardDescription(std::vector<Instruction> instructions)
      : instructions_(std::move(instructions)) {
    if (instructions_.empty()) throw MalformedSD("a description needs at least one instruction");
    for (std::size_t i = 0; i < instructions_.size(); ++i) {
      const auto& ins = instructions_[i];
      auto key = std::make_pair(source_state(ins), scanned_symbol(ins));
      if (key.first == 0) throw MalformedSD("state indices start at 1");
      if (!index_.emplace(key, i).second) {
        throw NondeterministicSD("two instructions for (q" + std::to_string(key.first) + ", S" +
                                 std::to_string(key.second) + ")");
      }
      if (const auto* q = std::get_if<Quintuple>(&ins)) {
        if (q->next_state == 0) throw MalformedSD("state indices start at 1");
      } else {
        const auto& m = std::get<MetaInstruction>(ins);
        if (m.on_s == 0 || m.on_u == 0) throw MalformedSD("state indices start at 1");
        if (m.target && m.target->value() == 0) throw MalformedSD("meta-call target must be positive");
        if (m.target && !detail::balanced_digits(m.target->str()))
          throw MalformedSD("meta-call target " + m.target->str() + " is not delimiter-balanced");
        has_meta_ = true;
      }
    }
    compute_padding();
  }

  const std::vector<Instruction>& instructions() const { return instructions_; }

  // Number of trailing instructions whose source state is unreachable from q1.
  std::size_t padding() const { return padding_; }

  bool has_meta() const { return has_meta_; }

  const Instruction* find(StateIndex state, SymbolIndex scanned) const {
    auto it = index_.find({state, scanned});
    return it == index_.end() ? nullptr : &instructions_[it->second];
  }

  // Largest state index mentioned anywhere, including branch targets.
  StateIndex max_state() const {
    StateIndex top = 0;
    for (const auto& ins : instructions_) {
      top = std::max(top, source_state(ins));
      if (const auto* q = std::get_if<Quintuple>(&ins)) {
        top = std::max(top, q->next_state);
      } else {
        const auto& m = std::get<MetaInstruction>(ins);
        top = std::max({top, m.on_s, m.on_u});
      }
    }
    return top;
  }

  SymbolIndex max_symbol() const {
    SymbolIndex top = 0;
    for (const auto& ins : instructions_) {
      top = std::max(top, scanned_symbol(ins));
      if (const auto* q = std::get_if<Quintuple>(&ins)) top = std::max(top, q->printed);
    }
    return top;
  }

  std::set<StateIndex> reachable_states() const {
    std::set<StateIndex> seen{1};
    std::vector<StateIndex> work{1};
    while (!work.empty()) {
      StateIndex s = work.back();
      work.pop_back();
      for (auto it = index_.lower_bound({s, 0}); it != index_.end() && it->first.first == s; ++it) {
        const auto& ins = instructions_[it->second];
        auto visit = [&](StateIndex t) {
          if (seen.insert(t).second) work.push_back(t);
        };
        if (const auto* q = std::get_if<Quintuple>(&ins)) {
          visit(q->next_state);
        } else {
          const auto& m = std::get<MetaInstruction>(ins);
          visit(m.on_s);
          visit(m.on_u);
        }
      }
    }
    return seen;
  }

  friend bool operator==(const StandardDescription& a, const StandardDescription& b) {
    return a.instructions_ == b.instructions_;
  }

 private:
  void compute_padding() {
    auto live = reachable_states();
    padding_ = 0;
    for (auto it = instructions_.rbegin(); it != instructions_.rend(); ++it) {
      if (live.count(source_state(*it))) break;
      ++padding_;
    }
  }

  std::vector<Instruction> instructions_;
  std::map<std::pair<StateIndex, SymbolIndex>, std::size_t> index_;
  std::size_t padding_ = 0;
  bool has_meta_ = false;
};

namespace detail {

class SdParser {
 public:
  explicit SdParser(std::string_view text) : text_(text) {}

  std::vector<Instruction> parse() {
    if (text_.empty()) fail("empty input");
    std::vector<Instruction> out;
    while (pos_ < text_.size()) out.push_back(instruction());
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw MalformedSD(why + " at offset " + std::to_string(pos_));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char ch) {
    if (peek() != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }

  std::uint32_t run_of(char ch) {
    std::uint64_t n = 0;
    while (peek() == ch) {
      ++pos_;
      if (++n > std::numeric_limits<std::uint32_t>::max() / 2) fail("index too large");
    }
    return static_cast<std::uint32_t>(n);
  }

  StateIndex state() {
    expect('D');
    auto n = run_of('A');
    if (n == 0) fail("state needs at least one 'A'");
    return n;
  }

  SymbolIndex symbol() {
    expect('D');
    return run_of('C');
  }

  Instruction instruction() {
    StateIndex from = state();
    SymbolIndex scanned = symbol();
    if (peek() == 'E') {
      ++pos_;
      expect('(');
      std::size_t start = pos_;
      while (peek() >= '0' && peek() <= '9') ++pos_;
      std::string_view digits = text_.substr(start, pos_ - start);
      expect(')');
      MetaInstruction m;
      m.state = from;
      m.scanned = scanned;
      if (!digits.empty()) {
        if (digits.front() == '0') fail("meta-call target has a leading zero");
        if (!balanced_digits(digits)) fail("meta-call target digits are not delimiter-balanced");
        m.target = DescriptionNumber::from_string(digits);
      }
      m.on_s = state();
      m.on_u = state();
      expect(';');
      return m;
    }
    Quintuple q;
    q.state = from;
    q.scanned = scanned;
    q.printed = symbol();
    switch (peek()) {
      case 'L': q.move = Move::L; break;
      case 'R': q.move = Move::R; break;
      case 'N': q.move = Move::N; break;
      default: fail("expected move L, R or N");
    }
    ++pos_;
    q.next_state = state();
    expect(';');
    return q;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void append_state(std::string& out, StateIndex s) {
  out += 'D';
  out.append(s, 'A');
}

inline void append_symbol(std::string& out, SymbolIndex s) {
  out += 'D';
  out.append(s, 'C');
}

inline char digit_for(char ch) {
  switch (ch) {
    case 'A': return '1';
    case 'C': return '2';
    case 'D': return '3';
    case 'L': return '4';
    case 'R': return '5';
    case 'N': return '6';
    case ';': return '7';
    case 'E': return '8';
    case '(': return '9';
    case ')': return '0';
    default: return '\0';
  }
}

inline char letter_for(char digit) {
  static constexpr char kLetters[] = ")ACDLRN;E(";
  return kLetters[digit - '0'];
}

}  // namespace detail

inline StandardDescription parse_sd(std::string_view text) {
  return StandardDescription(detail::SdParser(text).parse());
}

inline std::string emit_sd(const StandardDescription& sd) {
  std::string out;
  for (const auto& ins : sd.instructions()) {
    if (const auto* q = std::get_if<Quintuple>(&ins)) {
      detail::append_state(out, q->state);
      detail::append_symbol(out, q->scanned);
      detail::append_symbol(out, q->printed);
      out += static_cast<char>(q->move);
      detail::append_state(out, q->next_state);
    } else {
      const auto& m = std::get<MetaInstruction>(ins);
      detail::append_state(out, m.state);
      detail::append_symbol(out, m.scanned);
      out += "E(";
      if (m.target) out += m.target->str();
      out += ')';
      detail::append_state(out, m.on_s);
      detail::append_state(out, m.on_u);
    }
    out += ';';
  }
  return out;
}

// Digit-maps raw text without validating the grammar. Literal digits pass
// through unchanged. Throws MalformedSD on characters outside the alphabet or
// on text that would start with a zero digit.
inline DescriptionNumber text_to_dn(std::string_view text) {
  std::string digits;
  digits.reserve(text.size());
  for (char ch : text) {
    if (ch >= '0' && ch <= '9') {
      digits += ch;
      continue;
    }
    char d = detail::digit_for(ch);
    if (d == '\0') throw MalformedSD(std::string("character '") + ch + "' is outside the alphabet");
    digits += d;
  }
  if (digits.empty()) throw MalformedSD("empty input");
  if (digits.front() == '0') throw MalformedSD("text maps to a number with a leading zero");
  return DescriptionNumber::from_string(digits);
}

inline DescriptionNumber sd_to_dn(const StandardDescription& sd) { return text_to_dn(emit_sd(sd)); }

// Inverse of the digit map; the text inside E(...) is recovered by matching
// 9/0 delimiters.
inline std::optional<std::string> dn_to_text(const DescriptionNumber& dn) {
  const std::string digits = dn.str();
  std::string text;
  text.reserve(digits.size());
  for (std::size_t i = 0; i < digits.size(); ++i) {
    char d = digits[i];
    if (d == '0') return std::nullopt;
    if (d != '9') {
      text += detail::letter_for(d);
      continue;
    }
    long depth = 1;
    std::size_t j = i + 1;
    for (; j < digits.size() && depth > 0; ++j) {
      if (digits[j] == '9') ++depth;
      if (digits[j] == '0') --depth;
    }
    if (depth != 0) return std::nullopt;
    text += '(';
    text.append(digits, i + 1, j - 1 - (i + 1));
    text += ')';
    i = j - 1;
  }
  return text;
}

inline StandardDescription dn_to_sd(const DescriptionNumber& dn) {
  auto text = dn_to_text(dn);
  if (!text) throw NotWellFormed(dn.str() + " has unbalanced delimiter digits");
  try {
    auto sd = parse_sd(*text);
    if (sd_to_dn(sd) != dn) throw NotWellFormed(dn.str() + " is not canonical");
    return sd;
  } catch (const MalformedSD& e) {
    throw NotWellFormed(dn.str() + " does not describe a machine (" + e.what() + ")");
  } catch (const NondeterministicSD& e) {
    throw NotWellFormed(dn.str() + " does not describe a machine (" + e.what() + ")");
  }
}

struct ReassignOptions {
  std::size_t max_padding = 4;          // padding quintuples tried
  SymbolIndex max_printed_symbol = 256;  // variants of the last padding quintuple
};

// Appends unreachable padding quintuples until the D.N. satisfies `accept`.
// Candidates are ordered by padding count, then by the printed symbol of the
// last padding quintuple; the first accepted candidate is returned.
inline StandardDescription reassign_dn(const StandardDescription& sd,
                                       const std::function<bool(const DescriptionNumber&)>& accept,
                                       const ReassignOptions& opts = {}) {
  if (accept(sd_to_dn(sd))) return sd;
  const StateIndex fresh = sd.max_state() + 1;
  for (std::size_t count = 1; count <= opts.max_padding; ++count) {
    std::vector<Instruction> base = sd.instructions();
    for (std::size_t j = 0; j + 1 < count; ++j) {
      base.push_back(Quintuple{fresh, static_cast<SymbolIndex>(j), 0, Move::N, fresh});
    }
    for (SymbolIndex printed = 0; printed <= opts.max_printed_symbol; ++printed) {
      auto instrs = base;
      instrs.push_back(Quintuple{fresh, static_cast<SymbolIndex>(count - 1), printed, Move::N, fresh});
      StandardDescription candidate(std::move(instrs));
      if (accept(sd_to_dn(candidate))) return candidate;
    }
  }
  throw Unsatisfiable("no padding of up to " + std::to_string(opts.max_padding) +
                      " quintuples satisfies the constraint");
}

}  // namespace smw
