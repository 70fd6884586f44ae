#pragma once

// Independent reference implementations used only by tests. None of these
// share code with the library beyond its public data types.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "smw/smw.hpp"

namespace oracle {

// Character-by-character digit map, written out separately from the codec.
inline std::string digit_map(const std::string& text) {
  static const std::map<char, char> table{{'A', '1'}, {'C', '2'}, {'D', '3'}, {'L', '4'}, {'R', '5'},
                                          {'N', '6'}, {';', '7'}, {'E', '8'}, {'(', '9'}, {')', '0'}};
  std::string out;
  for (char ch : text) out += table.at(ch);
  return out;
}

// A flat rule table for machines with at most a few states and symbols.
struct Rule {
  int print = 0;
  char move = 'N';
  int next = 0;
  bool present = false;
};

struct Rules {
  static constexpr int kStates = 16, kSymbols = 8;
  std::array<Rule, kStates * kSymbols> cells{};
  const Rule* find(int state, int symbol) const {
    if (state >= kStates || symbol >= kSymbols) return nullptr;
    const Rule& r = cells[state * kSymbols + symbol];
    return r.present ? &r : nullptr;
  }
};

inline Rules rules_of(const smw::StandardDescription& sd) {
  Rules r;
  for (const auto& ins : sd.instructions()) {
    const auto& q = std::get<smw::Quintuple>(ins);
    if (q.state >= Rules::kStates || q.scanned >= Rules::kSymbols)
      throw std::out_of_range("oracle rule table too small");
    r.cells[q.state * Rules::kSymbols + q.scanned] =
        Rule{static_cast<int>(q.printed), static_cast<char>(q.move), static_cast<int>(q.next_state), true};
  }
  return r;
}

// Tape split at the origin: right[i] is cell i, left[i] is cell -1-i.
// Unwritten cells and explicit zeros are both blank.
struct Config {
  int state = 1;
  long head = 0;
  long marks = 0;  // non-blank cells
  std::vector<int> right, left;

  int& cell(long pos) {
    auto& side = pos >= 0 ? right : left;
    std::size_t i = pos >= 0 ? pos : -1 - pos;
    if (i >= side.size()) side.resize(i + 1, 0);
    return side[i];
  }
  int read(long pos) const {
    const auto& side = pos >= 0 ? right : left;
    std::size_t i = pos >= 0 ? pos : -1 - pos;
    return i < side.size() ? side[i] : 0;
  }
  friend bool operator==(const Config& a, const Config& b) {
    if (a.state != b.state || a.head != b.head || a.marks != b.marks) return false;
    auto same = [](const std::vector<int>& x, const std::vector<int>& y) {
      std::size_t n = std::max(x.size(), y.size());
      for (std::size_t i = 0; i < n; ++i)
        if ((i < x.size() ? x[i] : 0) != (i < y.size() ? y[i] : 0)) return false;
      return true;
    };
    return same(a.right, b.right) && same(a.left, b.left);
  }
};

// Advances one step; false when no rule applies.
inline bool tick(const Rules& rules, Config& c) {
  const Rule* r = rules.find(c.state, c.read(c.head));
  if (!r) return false;
  int& slot = c.cell(c.head);
  c.marks += (r->print != 0) - (slot != 0);
  slot = r->print;
  if (r->move == 'L') --c.head;
  if (r->move == 'R') ++c.head;
  c.state = r->next;
  return true;
}

struct BruteVerdict {
  std::optional<std::uint64_t> halt_steps;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> cycle;  // (mu, lambda)
};

// Halting by plain simulation; cycles by Brent's algorithm over the
// configuration sequence followed by the usual mu search.
inline BruteVerdict brute_force(const Rules& rules, std::uint64_t limit) {
  BruteVerdict v;
  {
    Config c;
    std::uint64_t n = 0;
    while (n <= limit && tick(rules, c)) ++n;
    if (n <= limit) {
      v.halt_steps = n;
      return v;
    }
  }
  Config tortoise, hare;
  if (!tick(rules, hare)) return v;
  std::uint64_t power = 1, lambda = 1, spent = 0;
  while (!(tortoise == hare)) {
    if (power == lambda) {
      tortoise = hare;
      power *= 2;
      lambda = 0;
    }
    if (!tick(rules, hare) || ++spent > limit) return v;
    ++lambda;
  }
  Config a, b;
  for (std::uint64_t i = 0; i < lambda; ++i) tick(rules, b);
  std::uint64_t mu = 0;
  while (!(a == b)) {
    tick(rules, a);
    tick(rules, b);
    ++mu;
  }
  v.cycle = {{mu, lambda}};
  return v;
}

// Every 2-state / 2-symbol table: each of the four (state, symbol) cells is
// absent or one of 2 prints x 3 moves x 2 next states. The all-absent table
// is skipped since an S.D. needs at least one instruction.
inline std::vector<smw::StandardDescription> all_two_state_machines() {
  std::vector<std::optional<smw::Quintuple>> choices{std::nullopt};
  for (smw::SymbolIndex p = 0; p < 2; ++p)
    for (auto m : {smw::Move::L, smw::Move::R, smw::Move::N})
      for (smw::StateIndex n = 1; n <= 2; ++n) choices.push_back(smw::Quintuple{0, 0, p, m, n});
  std::vector<smw::StandardDescription> out;
  const std::size_t k = choices.size();
  for (std::size_t code = 1; code < k * k * k * k; ++code) {
    std::vector<smw::Instruction> ins;
    std::size_t rest = code;
    for (int cell = 0; cell < 4; ++cell) {
      const auto& ch = choices[rest % k];
      rest /= k;
      if (!ch) continue;
      smw::Quintuple q = *ch;
      q.state = static_cast<smw::StateIndex>(cell / 2 + 1);
      q.scanned = static_cast<smw::SymbolIndex>(cell % 2);
      ins.push_back(q);
    }
    out.emplace_back(std::move(ins));
  }
  return out;
}

inline std::string balanced_digits(std::mt19937_64& rng, int depth = 0) {
  std::uniform_int_distribution<int> len(1, 4), digit(1, 8), coin(0, 5);
  std::string out;
  int n = len(rng);
  for (int i = 0; i < n; ++i) {
    if (depth < 2 && coin(rng) == 0) out += "9" + balanced_digits(rng, depth + 1) + "0";
    else out += static_cast<char>('0' + digit(rng));
  }
  return out;
}

// Random well-formed S.D.: deterministic keys, optional meta-instructions.
inline smw::StandardDescription random_sd(std::mt19937_64& rng, bool allow_meta = true) {
  std::uniform_int_distribution<smw::StateIndex> state(1, 5);
  std::uniform_int_distribution<smw::SymbolIndex> symbol(0, 3);
  std::uniform_int_distribution<int> count(1, 8), kind(0, 3), mv(0, 2);
  std::set<std::pair<smw::StateIndex, smw::SymbolIndex>> used;
  std::vector<smw::Instruction> ins;
  int n = count(rng);
  for (int i = 0; i < n; ++i) {
    auto key = std::make_pair(state(rng), symbol(rng));
    if (!used.insert(key).second) continue;
    if (allow_meta && kind(rng) == 0) {
      smw::MetaTarget target;
      if (kind(rng) != 0) target = smw::DescriptionNumber::from_string(balanced_digits(rng));
      ins.push_back(smw::MetaInstruction{key.first, key.second, target, state(rng), state(rng)});
    } else {
      static const smw::Move moves[] = {smw::Move::L, smw::Move::R, smw::Move::N};
      ins.push_back(smw::Quintuple{key.first, key.second, symbol(rng), moves[mv(rng)], state(rng)});
    }
  }
  return smw::StandardDescription(std::move(ins));
}

using Edge = std::pair<std::string, std::string>;

inline bool has_forbidden_triple(const std::set<Edge>& edges) {
  std::set<std::string> nodes;
  for (const auto& [a, b] : edges) {
    nodes.insert(a);
    nodes.insert(b);
  }
  for (const auto& x : nodes)
    for (const auto& y : nodes)
      for (const auto& z : nodes)
        if (edges.count({x, y}) && edges.count({y, z}) && edges.count({z, x})) return true;
  return false;
}

// Floyd-Warshall transitive closure; a cycle exists iff some node reaches itself.
inline bool has_cycle(const std::set<Edge>& edges) {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  for (const auto& [a, b] : edges) {
    for (const auto& s : {a, b}) {
      if (index.emplace(s, names.size()).second) names.push_back(s);
    }
  }
  const std::size_t n = names.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : edges) reach[index[a]][index[b]] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i][i]) return true;
  return false;
}

// Truth value by recursive descent over the AST with material implication,
// unfolding definitions from the environment.
inline bool truth(const smw::logic::FormulaPtr& f, const smw::logic::AtomEnv& env,
                  const std::map<std::string, bool>& values) {
  using smw::logic::Op;
  if (f->op == Op::Atom) {
    if (env.is_defined(f->name)) return truth(env.definition(f->name), env, values);
    return values.at(f->name);
  }
  if (f->op == Op::Not) return !truth(f->lhs, env, values);
  bool a = truth(f->lhs, env, values), b = truth(f->rhs, env, values);
  switch (f->op) {
    case Op::And: return a && b;
    case Op::Or: return a || b;
    case Op::Xor: return a != b;
    case Op::Implies: return !a || b;
    default: return a == b;
  }
}

inline bool brute_tautology(const smw::logic::FormulaPtr& f, const smw::logic::AtomEnv& env,
                            const std::vector<std::string>& atoms) {
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << atoms.size()); ++m) {
    std::map<std::string, bool> values;
    for (std::size_t i = 0; i < atoms.size(); ++i) values[atoms[i]] = (m >> i) & 1U;
    if (!truth(f, env, values)) return false;
  }
  return true;
}

inline smw::logic::FormulaPtr random_formula(std::mt19937_64& rng, const std::vector<std::string>& atoms,
                                             int depth) {
  using namespace smw::logic;
  std::uniform_int_distribution<int> pick(0, 6);
  std::uniform_int_distribution<std::size_t> which(0, atoms.size() - 1);
  int k = depth <= 0 ? 0 : pick(rng);
  switch (k) {
    case 0: return atom(atoms[which(rng)]);
    case 1: return negate(random_formula(rng, atoms, depth - 1));
    default: {
      static const Op ops[] = {Op::And, Op::Or, Op::Xor, Op::Implies, Op::Iff};
      return binary(ops[k - 2], random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1));
    }
  }
}

// A toy supermachine configuration under an assigned numbering with random
// extra machines, some of which meta-call other catalog members.
inline smw::SupermachineConfig random_toy_config(std::mt19937_64& rng, smw::StepCount budget = 200) {
  using smw::BigNat;
  using smw::DescriptionNumber;
  auto balanced = [](const DescriptionNumber& dn) { return smw::detail::balanced_digits(dn.str()); };
  for (;;) {
    std::uniform_int_distribution<int> bits(5, 8);
    const int n = bits(rng);
    const std::uint64_t c = (std::uint64_t{1} << n) - 1;
    const std::uint64_t half = (c + 1) / 2;
    std::uniform_int_distribution<std::uint64_t> k0d(half + 1, c), anyd(1, c);
    std::uint64_t k0 = k0d(rng);
    std::uint64_t lo = c - k0 + 1;
    if (lo >= half) continue;
    std::uniform_int_distribution<std::uint64_t> k1d(lo, half - 1);
    std::uint64_t k1 = k1d(rng);
    std::uint64_t kp = anyd(rng);
    std::uint64_t ks = c + 1 + anyd(rng);
    if (std::set<std::uint64_t>{k0, k1, kp, ks}.size() != 4) continue;
    if (!balanced(k0) || !balanced(k1) || !balanced(kp)) continue;

    smw::AssignedLayout layout;
    layout.k_prime = kp;
    layout.k0 = k0;
    layout.k1 = k1;
    layout.ks = ks;
    std::uniform_int_distribution<int> coin(0, 2);
    std::vector<std::uint64_t> members;
    for (std::uint64_t i = 1; i <= c + 8; ++i) {
      if (coin(rng) != 0) members.push_back(i);
    }
    std::set<std::uint64_t> reserved{k0, k1, kp, ks};
    std::vector<std::uint64_t> pure;
    for (auto i : members) {
      layout.catalog.emplace_back(i);
      if (reserved.count(i)) continue;
      int role = coin(rng);
      if (role == 0) continue;  // unassigned: no machine
      if (role == 1 || pure.empty()) {
        layout.machines.emplace(DescriptionNumber(i), random_sd(rng, false));
        pure.push_back(i);
        continue;
      }
      std::uniform_int_distribution<std::size_t> which(0, members.size() - 1);
      std::uint64_t target = members[which(rng)];
      // Halts on s and loops on u, or the reverse.
      std::string call = "DADE(" + (balanced(target) ? std::to_string(target) : std::string()) + ")";
      std::string text = coin(rng) == 0 ? call + "DAADAAA;DAADDNDAA;" : call + "DAADAAA;DAAADDNDAAA;";
      layout.machines.emplace(DescriptionNumber(i), smw::parse_sd(text));
    }
    try {
      return smw::build_assigned(layout, budget);
    } catch (const smw::ConstraintUnsatisfiable&) {
      continue;
    }
  }
}

}  // namespace oracle
