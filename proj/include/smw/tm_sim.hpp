#pragma once

// Direct interpretation of a Standard Description on a blank two-way tape.
//
// Circularity is witnessed by exact configuration repetition. Configurations
// are fingerprinted incrementally; a fingerprint match is confirmed by
// replaying the run to the earlier step and comparing full configurations.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "smw/sd_codec.hpp"

namespace smw {

using StepCount = std::uint64_t;

struct Configuration {
  StateIndex state = 1;
  std::map<std::int64_t, SymbolIndex> tape;  // no blank (0) cells stored
  std::int64_t head = 0;

  SymbolIndex scanned() const {
    auto it = tape.find(head);
    return it == tape.end() ? 0 : it->second;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

inline Configuration initial_config(const StandardDescription&) { return Configuration{}; }

struct ResumeToken {
  Configuration config;
  MetaTarget target;
  StateIndex on_s = 1;
  StateIndex on_u = 1;

  friend bool operator==(const ResumeToken&, const ResumeToken&) = default;
};

struct Halt {};
struct MetaCall {
  MetaTarget target;
  ResumeToken token;
};
using StepResult = std::variant<Configuration, Halt, MetaCall>;

inline StepResult step(const StandardDescription& sd, const Configuration& cfg) {
  const Instruction* ins = sd.find(cfg.state, cfg.scanned());
  if (!ins) return Halt{};
  if (const auto* m = std::get_if<MetaInstruction>(ins)) {
    return MetaCall{m->target, ResumeToken{cfg, m->target, m->on_s, m->on_u}};
  }
  const auto& q = std::get<Quintuple>(*ins);
  Configuration next = cfg;
  if (q.printed == 0) {
    next.tape.erase(cfg.head);
  } else {
    next.tape[cfg.head] = q.printed;
  }
  if (q.move == Move::L) --next.head;
  if (q.move == Move::R) ++next.head;
  next.state = q.next_state;
  return next;
}

inline Configuration resume(const ResumeToken& token, bool satisfactory) {
  Configuration next = token.config;
  next.state = satisfactory ? token.on_s : token.on_u;
  return next;
}

struct Halted {
  StepCount steps = 0;
  friend bool operator==(const Halted&, const Halted&) = default;
};
struct Cycled {
  StepCount first_visit = 0;
  StepCount period = 0;
  friend bool operator==(const Cycled&, const Cycled&) = default;
};
struct Exhausted {
  StepCount budget = 0;
  friend bool operator==(const Exhausted&, const Exhausted&) = default;
};
struct MetaCallOutcome {
  MetaTarget target;
  ResumeToken token;
  StepCount steps = 0;
  friend bool operator==(const MetaCallOutcome&, const MetaCallOutcome&) = default;
};

namespace detail {

// Open-addressing multimap from configuration fingerprint to step number.
// Key 0 marks an empty slot, so a zero fingerprint is stored as 1; every
// match is re-checked by the caller anyway.
class FingerprintIndex {
 public:
  FingerprintIndex() { rehash(1024); }

  template <class F>
  bool any_of(std::uint64_t fp, F&& pred) const {
    fp = fp ? fp : 1;
    for (std::size_t i = fp & mask_; keys_[i] != 0; i = (i + 1) & mask_)
      if (keys_[i] == fp && pred(steps_[i])) return true;
    return false;
  }

  void insert(std::uint64_t fp, StepCount step) {
    if (2 * (size_ + 1) > keys_.size()) rehash(2 * keys_.size());
    place(fp ? fp : 1, step);
    ++size_;
  }

 private:
  void place(std::uint64_t fp, StepCount step) {
    std::size_t i = fp & mask_;
    while (keys_[i] != 0) i = (i + 1) & mask_;
    keys_[i] = fp;
    steps_[i] = step;
  }
  void rehash(std::size_t slots) {
    auto old_keys = std::move(keys_);
    auto old_steps = std::move(steps_);
    keys_.assign(slots, 0);
    steps_.assign(slots, 0);
    mask_ = slots - 1;
    for (std::size_t i = 0; i < old_keys.size(); ++i)
      if (old_keys[i] != 0) place(old_keys[i], old_steps[i]);
  }

  std::vector<std::uint64_t> keys_;
  std::vector<StepCount> steps_;
  std::size_t mask_ = 0, size_ = 0;
};

}  // namespace detail

using RunOutcome = std::variant<Halted, Cycled, Exhausted, MetaCallOutcome>;

struct TraceRecord {
  StepCount step = 0;
  StateIndex state = 0;
  std::int64_t head = 0;
  SymbolIndex scanned = 0;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// One "step state head scanned" line per executed transition.
inline std::string format_trace(const std::vector<TraceRecord>& trace) {
  std::ostringstream out;
  for (const auto& r : trace) out << r.step << ' ' << r.state << ' ' << r.head << ' ' << r.scanned << '\n';
  return out.str();
}

struct SimOptions {
  bool detect_cycles = true;
  bool record_trace = false;
};

// Resumable simulator. advance() stops at a halt, a configuration repeat, the
// step budget, or a meta-call; after a meta-call, answer() supplies the
// verdict and the run can be advanced again. Resolving a meta-call counts as
// one step.
class Simulator {
 public:
  explicit Simulator(const StandardDescription& sd, SimOptions opts = {}) : sd_(&sd), opts_(opts) {
    width_ = sd.max_symbol() + 1;
    states_ = sd.max_state() + 1;
    table_.assign(static_cast<std::size_t>(states_) * width_, -1);
    for (std::size_t i = 0; i < sd.instructions().size(); ++i) {
      const auto& ins = sd.instructions()[i];
      table_[static_cast<std::size_t>(source_state(ins)) * width_ + scanned_symbol(ins)] =
          static_cast<std::int32_t>(i);
    }
    cells_.assign(64, 0);
    offset_ = 32;
  }

  RunOutcome advance(StepCount budget) {
    if (awaiting_) throw std::logic_error("advance() called while a meta-call is unanswered");
    for (;;) {
      if (opts_.detect_cycles) {
        if (auto hit = check_repeat()) return *hit;
      }
      const Instruction* ins = lookup();
      if (!ins) return Halted{steps_};
      if (steps_ >= budget) return Exhausted{budget};
      if (opts_.record_trace) trace_.push_back({steps_, state_, head_, scanned()});
      if (const auto* m = std::get_if<MetaInstruction>(ins)) {
        awaiting_ = true;
        pending_ = *m;
        return MetaCallOutcome{m->target, ResumeToken{configuration(), m->target, m->on_s, m->on_u},
                               steps_};
      }
      apply(std::get<Quintuple>(*ins));
      ++steps_;
    }
  }

  void answer(bool satisfactory) {
    if (!awaiting_) throw std::logic_error("answer() without a pending meta-call");
    awaiting_ = false;
    answers_.push_back(satisfactory);
    set_state(satisfactory ? pending_.on_s : pending_.on_u);
    ++steps_;
  }

  Configuration configuration() const {
    Configuration cfg;
    cfg.state = state_;
    cfg.head = head_;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (cells_[i] != 0) cfg.tape.emplace_hint(cfg.tape.end(), static_cast<std::int64_t>(i) - offset_, cells_[i]);
    }
    return cfg;
  }

  StepCount steps() const { return steps_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  static std::uint64_t cell_key(std::int64_t pos, SymbolIndex sym) {
    return mix(static_cast<std::uint64_t>(pos) * 0x100000001b3ULL ^ mix(sym));
  }

  std::uint64_t fingerprint() const {
    return tape_hash_ ^ mix(mix(state_) ^ static_cast<std::uint64_t>(head_) * 0xff51afd7ed558ccdULL);
  }

  SymbolIndex scanned() const { return symbol_at(head_); }

  const Instruction* lookup() const {
    SymbolIndex sym = scanned();
    if (state_ >= states_ || sym >= width_) return nullptr;
    std::int32_t i = table_[static_cast<std::size_t>(state_) * width_ + sym];
    return i < 0 ? nullptr : &sd_->instructions()[static_cast<std::size_t>(i)];
  }

  void ensure_cell(std::int64_t pos) {
    for (;;) {
      std::int64_t idx = pos + offset_;
      if (idx >= 0 && idx < static_cast<std::int64_t>(cells_.size())) return;
      std::size_t grow = cells_.size();
      std::vector<SymbolIndex> bigger(cells_.size() + 2 * grow, 0);
      std::copy(cells_.begin(), cells_.end(), bigger.begin() + static_cast<std::ptrdiff_t>(grow));
      cells_.swap(bigger);
      offset_ += static_cast<std::int64_t>(grow);
    }
  }

  void apply(const Quintuple& q) {
    ensure_cell(head_);
    auto& cell = cells_[static_cast<std::size_t>(head_ + offset_)];
    if (cell != 0) tape_hash_ ^= cell_key(head_, cell);
    cell = q.printed;
    if (cell != 0) tape_hash_ ^= cell_key(head_, cell);
    if (q.move == Move::L) --head_;
    if (q.move == Move::R) ++head_;
    set_state(q.next_state);
  }

  void set_state(StateIndex s) { state_ = s; }

  std::optional<RunOutcome> check_repeat() {
    if (registered_ && last_registered_ == steps_) return std::nullopt;
    auto fp = fingerprint();
    StepCount earlier = 0;
    bool hit = visited_.any_of(fp, [&](StepCount at) {
      earlier = at;
      return same_configuration(replay_to(at));
    });
    if (hit) return Cycled{earlier, steps_ - earlier};
    visited_.insert(fp, steps_);
    registered_ = true;
    last_registered_ = steps_;
    return std::nullopt;
  }

  bool same_configuration(const Simulator& other) const {
    if (state_ != other.state_ || head_ != other.head_) return false;
    std::int64_t lo = std::min(-offset_, -other.offset_);
    std::int64_t hi = std::max(static_cast<std::int64_t>(cells_.size()) - offset_,
                               static_cast<std::int64_t>(other.cells_.size()) - other.offset_);
    for (std::int64_t pos = lo; pos < hi; ++pos)
      if (symbol_at(pos) != other.symbol_at(pos)) return false;
    return true;
  }

  SymbolIndex symbol_at(std::int64_t pos) const {
    std::int64_t idx = pos + offset_;
    if (idx < 0 || idx >= static_cast<std::int64_t>(cells_.size())) return 0;
    return cells_[static_cast<std::size_t>(idx)];
  }

  // Re-runs from the start without cycle detection, feeding recorded answers.
  Simulator replay_to(StepCount target) const {
    Simulator again(*sd_, SimOptions{false, false});
    std::size_t next_answer = 0;
    while (again.steps_ < target) {
      auto out = again.advance(target);
      if (std::holds_alternative<MetaCallOutcome>(out)) {
        again.answer(answers_.at(next_answer++));
      } else {
        break;
      }
    }
    return again;
  }

  const StandardDescription* sd_;
  SimOptions opts_;
  SymbolIndex width_ = 1;
  StateIndex states_ = 1;
  std::vector<std::int32_t> table_;
  std::vector<SymbolIndex> cells_;
  std::int64_t offset_ = 0;
  std::int64_t head_ = 0;
  StateIndex state_ = 1;
  StepCount steps_ = 0;
  std::uint64_t tape_hash_ = 0;
  detail::FingerprintIndex visited_;
  bool registered_ = false;
  StepCount last_registered_ = 0;
  std::vector<bool> answers_;
  MetaInstruction pending_;
  bool awaiting_ = false;
  std::vector<TraceRecord> trace_;
};

struct RunResult {
  RunOutcome outcome;
  Configuration final_config;
  std::vector<TraceRecord> trace;
};

// Runs from the blank tape. A meta-call ends the run immediately.
inline RunResult run(const StandardDescription& sd, StepCount budget, bool record_trace = false) {
  if (budget == 0) throw std::invalid_argument("run budget must be at least 1");
  Simulator sim(sd, SimOptions{true, record_trace});
  auto outcome = sim.advance(budget);
  return RunResult{std::move(outcome), sim.configuration(), sim.trace()};
}

inline std::string describe(const RunOutcome& outcome) {
  struct V {
    std::string operator()(const Halted& h) const { return "Halted(" + std::to_string(h.steps) + ")"; }
    std::string operator()(const Cycled& c) const {
      return "Cycled(" + std::to_string(c.first_visit) + ", " + std::to_string(c.period) + ")";
    }
    std::string operator()(const Exhausted& e) const { return "Exhausted(" + std::to_string(e.budget) + ")"; }
    std::string operator()(const MetaCallOutcome& m) const {
      return "MetaCall(" + (m.target ? m.target->str() : std::string("self")) + ")";
    }
  };
  return std::visit(V{}, outcome);
}

}  // namespace smw
