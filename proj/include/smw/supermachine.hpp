#pragma once

// Controller H' driving an ascending scanner H0 and a descending scanner H1
// over D.N. space, with a value-pair store (dn -> z|s|u), z-check detection,
// redundancy detection and self-recognition.
//
// Scanning is sparse: only the configured catalog is materialised. Scan
// order follows virtual rounds; H0 reaches dn i at round i and H1 reaches it
// at round c - i + 1, H0 first within a round. The dual phase covers [1, c]
// and ends at the first scan of an already-decided dn. The single phase then
// walks the catalog above c with H0 alone, continuing at K_s + 1 after K_s.

#include <algorithm>
#include <cstdint>
#include <future>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "smw/description_number.hpp"
#include "smw/halt_oracle.hpp"
#include "smw/sd_codec.hpp"
#include "smw/tm_sim.hpp"

namespace smw {

enum class Side { H0, H1, Controller };

inline std::string to_string(Side side) {
  switch (side) {
    case Side::H0: return "H0";
    case Side::H1: return "H1";
    case Side::Controller: return "controller";
  }
  return "?";
}

inline Side side_from_string(const std::string& text) {
  if (text == "H0") return Side::H0;
  if (text == "H1") return Side::H1;
  if (text == "controller") return Side::Controller;
  throw StoreError("unknown side '" + text + "'");
}

enum class EventKind { Scanned, ZCheckHit, RedundancyDecided, SelfRecognition, PhaseSwitch, VerdictSet };

inline std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Scanned: return "Scanned";
    case EventKind::ZCheckHit: return "ZCheckHit";
    case EventKind::RedundancyDecided: return "RedundancyDecided";
    case EventKind::SelfRecognition: return "SelfRecognition";
    case EventKind::PhaseSwitch: return "PhaseSwitch";
    case EventKind::VerdictSet: return "VerdictSet";
  }
  return "?";
}

inline EventKind event_kind_from_string(const std::string& text) {
  for (auto k : {EventKind::Scanned, EventKind::ZCheckHit, EventKind::RedundancyDecided,
                 EventKind::SelfRecognition, EventKind::PhaseSwitch, EventKind::VerdictSet}) {
    if (to_string(k) == text) return k;
  }
  throw StoreError("unknown event kind '" + text + "'");
}

// PhaseSwitch carries the resume point (c + 1) in `dn`.
struct ProtocolEvent {
  EventKind kind = EventKind::Scanned;
  BigNat round = 0;
  DescriptionNumber dn;
  Side side = Side::Controller;
  std::optional<Tag> tag;

  friend bool operator==(const ProtocolEvent&, const ProtocolEvent&) = default;
};

inline nlohmann::ordered_json to_json(const ProtocolEvent& e) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(e.kind);
  j["round"] = e.round.str();
  j["dn"] = e.dn.str();
  j["side"] = to_string(e.side);
  j["tag"] = e.tag ? nlohmann::ordered_json(to_string(*e.tag)) : nlohmann::ordered_json(nullptr);
  return j;
}

inline ProtocolEvent event_from_json(const nlohmann::json& j) {
  ProtocolEvent e;
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.round = BigNat(j.at("round").get<std::string>());
  e.dn = DescriptionNumber::from_string(j.at("dn").get<std::string>());
  e.side = side_from_string(j.at("side").get<std::string>());
  if (!j.at("tag").is_null()) e.tag = tag_from_string(j.at("tag").get<std::string>());
  return e;
}

inline void write_events_jsonl(std::ostream& out, const std::vector<ProtocolEvent>& events) {
  for (const auto& e : events) out << to_json(e).dump() << '\n';
}

inline std::vector<ProtocolEvent> read_events_jsonl(std::istream& in) {
  std::vector<ProtocolEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(event_from_json(nlohmann::json::parse(line)));
  }
  return events;
}

// Orders events by (round, side) keeping the original order within a group.
inline std::vector<ProtocolEvent> normalize_events(std::vector<ProtocolEvent> events) {
  std::stable_sort(events.begin(), events.end(), [](const ProtocolEvent& a, const ProtocolEvent& b) {
    if (a.round != b.round) return a.round < b.round;
    return static_cast<int>(a.side) < static_cast<int>(b.side);
  });
  return events;
}

// Insertion-ordered value-pair memory plus the append-only event log. Tags
// move z -> {s, u, unknown} once; entries are never removed.
class VerdictStore {
 public:
  std::optional<Tag> tag_of(const DescriptionNumber& dn) const {
    auto it = tags_.find(dn);
    if (it == tags_.end()) return std::nullopt;
    return it->second;
  }

  bool decided(const DescriptionNumber& dn) const {
    auto t = tag_of(dn);
    return t && *t != Tag::z;
  }

  void insert_pending(const DescriptionNumber& dn) {
    if (!tags_.emplace(dn, Tag::z).second) throw StoreError("(" + dn.str() + ", z) inserted twice");
    order_.push_back(dn);
  }

  void set_verdict(const DescriptionNumber& dn, Tag tag) {
    auto it = tags_.find(dn);
    if (it == tags_.end()) throw StoreError(dn.str() + " has no pending entry");
    if (it->second != Tag::z) throw StoreError(dn.str() + " is already decided");
    if (tag == Tag::z) throw StoreError("a verdict cannot be z");
    it->second = tag;
  }

  void log(ProtocolEvent e) { events_.push_back(std::move(e)); }

  const std::vector<DescriptionNumber>& order() const { return order_; }
  const std::vector<ProtocolEvent>& events() const { return events_; }
  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty() && events_.empty(); }

  std::vector<std::pair<DescriptionNumber, Tag>> entries() const {
    std::vector<std::pair<DescriptionNumber, Tag>> out;
    out.reserve(order_.size());
    for (const auto& dn : order_) out.emplace_back(dn, tags_.at(dn));
    return out;
  }

  bool phase_switched() const {
    return std::any_of(events_.begin(), events_.end(),
                       [](const ProtocolEvent& e) { return e.kind == EventKind::PhaseSwitch; });
  }

 private:
  std::map<DescriptionNumber, Tag> tags_;
  std::vector<DescriptionNumber> order_;
  std::vector<ProtocolEvent> events_;
};

// Serialises every store mutation; evaluations read under a shared lock.
class StoreGate {
 public:
  explicit StoreGate(VerdictStore& store) : store_(store) {}

  template <class F>
  auto read(F&& f) const {
    std::shared_lock lock(mutex_);
    return f(static_cast<const VerdictStore&>(store_));
  }

  template <class F>
  auto write(F&& f) {
    std::unique_lock lock(mutex_);
    return f(store_);
  }

 private:
  VerdictStore& store_;
  mutable std::shared_mutex mutex_;
};

// Resumable store file: one {"dn", "tag"} object per line, insertion order.
inline void save_store_jsonl(std::ostream& out, const VerdictStore& store) {
  for (const auto& [dn, tag] : store.entries()) {
    nlohmann::ordered_json j;
    j["dn"] = dn.str();
    j["tag"] = to_string(tag);
    out << j.dump() << '\n';
  }
}

// Later lines win; only decided tags are returned.
inline std::map<DescriptionNumber, Tag> load_store_snapshot(std::istream& in) {
  std::map<DescriptionNumber, Tag> snapshot;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    snapshot[DescriptionNumber::from_string(j.at("dn").get<std::string>())] =
        tag_from_string(j.at("tag").get<std::string>());
  }
  std::erase_if(snapshot, [](const auto& kv) { return kv.second == Tag::z; });
  return snapshot;
}

// How numbers map to machines: the digit map, or an explicit assignment
// (numbers are arbitrary labels; unassigned numbers describe no machine).
class Numbering {
 public:
  static Numbering digit_map() { return Numbering(); }
  static Numbering assigned(std::map<DescriptionNumber, StandardDescription> table) {
    Numbering n;
    n.table_ = std::move(table);
    return n;
  }

  std::optional<StandardDescription> resolve(const DescriptionNumber& dn) const {
    if (!table_) return try_decode(dn);
    auto it = table_->find(dn);
    if (it == table_->end()) return std::nullopt;
    return it->second;
  }

  bool is_assigned() const { return table_.has_value(); }

 private:
  std::optional<std::map<DescriptionNumber, StandardDescription>> table_;
};

struct SupermachineConfig {
  DescriptionNumber k_prime;  // controller H'
  DescriptionNumber k0;       // ascending scanner H0
  DescriptionNumber k1;       // descending scanner H1
  DescriptionNumber ks;       // the composite H_s
  BigNat c = 0;
  StepCount budget = 10000;
  std::vector<DescriptionNumber> catalog;  // sorted, unique
  Numbering numbering = Numbering::digit_map();
};

// Open interval (c - K0, K0) for K1 given K0.
inline std::pair<BigNat, BigNat> k1_window(const DescriptionNumber& k0) {
  BigNat c = complement_bound(bit_length(k0));
  return {c - k0.value(), k0.value()};
}

// Null when every invariant holds, otherwise the first violated one.
inline std::optional<std::string> check_config(const SupermachineConfig& cfg) {
  const BigNat& k0 = cfg.k0.value();
  const BigNat& k1 = cfg.k1.value();
  if (k1 <= 0 || k0 <= 0 || cfg.k_prime.value() <= 0 || cfg.ks.value() <= 0)
    return "description numbers must be positive";
  if (!(k1 < k0)) return "K1 < K0 fails";
  if (cfg.c != complement_bound(bit_length(k0))) return "c != 2^bits(K0) - 1";
  if (!(cfg.c - k0 < k1)) return "c - K0 < K1 fails";
  if (!(cfg.ks.value() > cfg.c)) return "K_s > c fails";
  // Scan-order guarantees: H0 reaches K1 strictly before H1 would, and H1
  // reaches K0 strictly before H0 would.
  if (!(2 * k1 < cfg.c + 1)) return "K1 must lie below (c + 1) / 2 for H0 to read it first";
  if (!(2 * k0 > cfg.c + 1)) return "K0 must lie above (c + 1) / 2 for H1 to read it first";
  if (!(cfg.k_prime.value() <= cfg.c)) return "K' must lie in [1, c]";
  std::set<DescriptionNumber> distinct{cfg.k_prime, cfg.k0, cfg.k1, cfg.ks};
  if (distinct.size() != 4) return "K', K0, K1, K_s must be distinct";
  if (cfg.budget == 0) return "budget must be at least 1";
  return std::nullopt;
}

inline void validate(const SupermachineConfig& cfg) {
  if (auto why = check_config(cfg)) throw ConstraintUnsatisfiable(*why);
}

namespace detail {

inline std::string meta(StateIndex from, const std::string& target, StateIndex on_s, StateIndex on_u) {
  std::string out;
  append_state(out, from);
  append_symbol(out, 0);
  out += "E(" + target + ")";
  append_state(out, on_s);
  append_state(out, on_u);
  return out + ";";
}

inline std::string quint(StateIndex from, SymbolIndex printed, Move move, StateIndex to) {
  std::string out;
  append_state(out, from);
  append_symbol(out, 0);
  append_symbol(out, printed);
  out += static_cast<char>(move);
  append_state(out, to);
  return out + ";";
}

// Each body marks the tape once its calls return and then halts.
inline std::string controller_text(const std::vector<std::string>& subroutines) {
  std::string text;
  StateIndex s = 1;
  for (const auto& sub : subroutines) {
    text += meta(s, sub, s + 1, s + 1);
    ++s;
  }
  return text + quint(s, 1, Move::N, s + 1);
}

inline std::string scanner_text(const std::string& target, Move mark_move) {
  return meta(1, target, 2, 2) + quint(2, 1, mark_move, 3);
}

inline std::string supermachine_text(const std::string& kp, const std::string& k0, const std::string& k1) {
  return meta(1, kp, 2, 2) + meta(2, k0, 3, 3) + meta(3, k1, 4, 4) + meta(4, "", 5, 5) +
         meta(5, "", 6, 6) + quint(6, 1, Move::N, 7);
}

}  // namespace detail

inline constexpr std::string_view kHaltNowText = "DADCDCRDA;";
inline constexpr std::string_view kSelfLoopText = "DADDNDA;";

struct Construction {
  StandardDescription controller;
  StandardDescription up_scanner;
  StandardDescription down_scanner;
  StandardDescription supermachine;
};

// Builds the four meta-machines under the digit map and pads them until the
// ordering constraints hold. Under the digit map a machine cannot embed the
// number of a machine that embeds its own, so the scanners reach each other
// only through self-calls; H_s embeds K', K0 and K1 literally.
inline std::pair<SupermachineConfig, Construction> build_with_construction(
    const std::vector<DescriptionNumber>& catalog, StepCount budget) {
  if (catalog.empty()) throw ConstraintUnsatisfiable("catalog is empty");
  std::set<DescriptionNumber> taken(catalog.begin(), catalog.end());
  ReassignOptions opts{4, 512};

  auto halt_now = parse_sd(kHaltNowText);
  auto self_loop = parse_sd(kSelfLoopText);
  auto controller = parse_sd(detail::controller_text({sd_to_dn(halt_now).str(), sd_to_dn(self_loop).str()}));
  controller = reassign_dn(controller, [&](const DescriptionNumber& dn) { return !taken.count(dn); }, opts);
  const DescriptionNumber kp = sd_to_dn(controller);

  try {
    auto up = reassign_dn(
        parse_sd(detail::scanner_text("", Move::R)),
        [&](const DescriptionNumber& dn) {
          BigNat c = complement_bound(bit_length(dn));
          BigNat margin = (c + 1) >> 6;
          return dn > kp && c - dn.value() < margin && !taken.count(dn);
        },
        opts);
    const DescriptionNumber k0 = sd_to_dn(up);
    const BigNat c = complement_bound(bit_length(k0));

    auto down = reassign_dn(
        parse_sd(detail::scanner_text("", Move::L)),
        [&](const DescriptionNumber& dn) {
          return dn.value() > c - k0.value() && 2 * dn.value() < c + 1 && dn != kp && !taken.count(dn);
        },
        opts);
    const DescriptionNumber k1 = sd_to_dn(down);

    auto super = reassign_dn(parse_sd(detail::supermachine_text(kp.str(), k0.str(), k1.str())),
                             [&](const DescriptionNumber& dn) {
                               return dn.value() > c && !taken.count(dn) && !taken.count(dn.next());
                             },
                             opts);
    const DescriptionNumber ks = sd_to_dn(super);

    SupermachineConfig cfg;
    cfg.k_prime = kp;
    cfg.k0 = k0;
    cfg.k1 = k1;
    cfg.ks = ks;
    cfg.c = c;
    cfg.budget = budget;
    taken.insert({kp, k0, k1, ks});
    cfg.catalog.assign(taken.begin(), taken.end());
    validate(cfg);
    return {cfg, Construction{controller, up, down, super}};
  } catch (const Unsatisfiable& e) {
    throw ConstraintUnsatisfiable(std::string("padding cap reached: ") + e.what());
  }
}

inline SupermachineConfig build(const std::vector<DescriptionNumber>& catalog, StepCount budget) {
  return build_with_construction(catalog, budget).first;
}

// Explicit numbering: the caller chooses every number. Here the scanners call
// each other literally (K0 calls K1, K1 calls K0).
struct AssignedLayout {
  DescriptionNumber k_prime;
  DescriptionNumber k0;
  DescriptionNumber k1;
  DescriptionNumber ks;
  std::optional<DescriptionNumber> controller_subroutine;
  std::map<DescriptionNumber, StandardDescription> machines;
  std::vector<DescriptionNumber> catalog;  // empty: every number in [1, c] plus K_s
};

inline SupermachineConfig build_assigned(const AssignedLayout& layout, StepCount budget) {
  SupermachineConfig cfg;
  cfg.k_prime = layout.k_prime;
  cfg.k0 = layout.k0;
  cfg.k1 = layout.k1;
  cfg.ks = layout.ks;
  cfg.budget = budget;
  cfg.c = complement_bound(bit_length(layout.k0));
  validate(cfg);

  std::map<DescriptionNumber, StandardDescription> table = layout.machines;
  std::vector<std::string> subs;
  if (layout.controller_subroutine) subs.push_back(layout.controller_subroutine->str());
  auto put = [&](const DescriptionNumber& dn, const std::string& text) {
    if (table.count(dn)) throw ConstraintUnsatisfiable(dn.str() + " is assigned twice");
    try {
      table.emplace(dn, parse_sd(text));
    } catch (const MalformedSD& e) {
      throw ConstraintUnsatisfiable(std::string("cannot reference this number literally: ") + e.what());
    }
  };
  put(layout.k_prime, detail::controller_text(subs));
  put(layout.k0, detail::scanner_text(layout.k1.str(), Move::R));
  put(layout.k1, detail::scanner_text(layout.k0.str(), Move::L));
  put(layout.ks, detail::supermachine_text(layout.k_prime.str(), layout.k0.str(), layout.k1.str()));

  std::set<DescriptionNumber> universe(layout.catalog.begin(), layout.catalog.end());
  if (layout.catalog.empty()) {
    for (BigNat i = 1; i <= cfg.c; ++i) universe.insert(DescriptionNumber(i));
  }
  universe.insert({layout.k_prime, layout.k0, layout.k1, layout.ks});
  cfg.catalog.assign(universe.begin(), universe.end());
  cfg.numbering = Numbering::assigned(std::move(table));
  return cfg;
}

// Evaluates one D.N. on behalf of a scanner. Meta-calls are answered from the
// store when decided, by a z-check when the target is pending (in the store
// as z, or on the current call chain), and otherwise by evaluating the target
// in a nested frame that is not stored.
//
// z-check rule: a pending target answers s. The second hit on the same
// pending target above c is a self-recognition: the target's frame returns s.
class Evaluator {
 public:
  static constexpr std::size_t kMaxDepth = 64;

  Evaluator(const SupermachineConfig& cfg, const VerdictStore& store, Side side, BigNat round)
      : cfg_(cfg), store_(store), side_(side), round_(std::move(round)) {}

  Tag evaluate(const DescriptionNumber& dn) {
    chain_.clear();
    hits_.clear();
    return frame(dn, 0).tag;
  }

  std::vector<ProtocolEvent>& events() { return events_; }
  const std::set<DescriptionNumber>& reads() const { return reads_; }

 private:
  struct FrameResult {
    Tag tag = Tag::unknown;
    std::optional<DescriptionNumber> unwind_to;
  };

  void emit(EventKind kind, const DescriptionNumber& dn, std::optional<Tag> tag = std::nullopt) {
    events_.push_back(ProtocolEvent{kind, round_, dn, side_, tag});
  }

  FrameResult frame(const DescriptionNumber& dn, std::size_t depth) {
    auto sd = cfg_.numbering.resolve(dn);
    if (!sd) return {Tag::u, {}};
    if (!sd->has_meta()) return {classify_sd(*sd, cfg_.budget).tag, {}};
    chain_.push_back(dn);
    FrameResult r = simulate(*sd, dn, depth);
    chain_.pop_back();
    return r;
  }

  FrameResult simulate(const StandardDescription& sd, const DescriptionNumber& self, std::size_t depth) {
    Simulator sim(sd);
    for (;;) {
      auto out = sim.advance(cfg_.budget);
      if (std::holds_alternative<Halted>(out)) return {Tag::s, {}};
      if (std::holds_alternative<Cycled>(out)) return {Tag::u, {}};
      if (std::holds_alternative<Exhausted>(out)) return {Tag::unknown, {}};
      const auto& call = std::get<MetaCallOutcome>(out);
      DescriptionNumber target = call.target.value_or(self);
      FrameResult answer = resolve_call(target, depth);
      if (answer.unwind_to) {
        if (*answer.unwind_to == self) return {Tag::s, {}};
        return answer;
      }
      if (answer.tag == Tag::unknown) return answer;
      sim.answer(answer.tag == Tag::s);
    }
  }

  FrameResult resolve_call(const DescriptionNumber& target, std::size_t depth) {
    bool pending = std::find(chain_.begin(), chain_.end(), target) != chain_.end();
    if (!pending) {
      reads_.insert(target);
      if (auto t = store_.tag_of(target)) {
        if (*t != Tag::z) return {*t, {}};
        pending = true;
      }
    }
    if (pending) {
      int n = ++hits_[target];
      emit(EventKind::ZCheckHit, target);
      if (n >= 2 && target.value() > cfg_.c) {
        emit(EventKind::SelfRecognition, target);
        return {Tag::s, target};
      }
      return {Tag::s, {}};
    }
    if (depth + 1 >= kMaxDepth) return {Tag::unknown, {}};
    return frame(target, depth + 1);
  }

  const SupermachineConfig& cfg_;
  const VerdictStore& store_;
  Side side_;
  BigNat round_;
  std::vector<DescriptionNumber> chain_;
  std::map<DescriptionNumber, int> hits_;
  std::set<DescriptionNumber> reads_;
  std::vector<ProtocolEvent> events_;
};

// Evaluates dn against the store and appends the evaluation's events to its
// log. Does not touch the value pairs.
inline Tag eval_dn(const SupermachineConfig& cfg, VerdictStore& store, const DescriptionNumber& dn, Side side,
                   const BigNat& round = 0) {
  if (dn.value() < 1) throw StoreError("eval_dn requires dn >= 1");
  Evaluator ev(cfg, store, side, round);
  Tag tag = ev.evaluate(dn);
  for (auto& e : ev.events()) store.log(std::move(e));
  return tag;
}

enum class ScanMode { Lockstep, Concurrent };

struct ScanOptions {
  ScanMode mode = ScanMode::Lockstep;
  // Verdicts from an earlier run; a scan reaching one of these reuses the tag.
  const std::map<DescriptionNumber, Tag>* resume = nullptr;
};

struct ScanTask {
  Side side = Side::H0;
  DescriptionNumber dn;
  BigNat round = 0;
};

namespace detail {

inline std::vector<ScanTask> dual_phase_tasks(const SupermachineConfig& cfg) {
  std::vector<DescriptionNumber> low;
  for (const auto& dn : cfg.catalog) {
    if (dn.value() >= 1 && dn.value() <= cfg.c) low.push_back(dn);
  }
  std::vector<ScanTask> tasks;
  std::size_t up = 0;
  std::size_t down = low.size();
  std::size_t h0_done = 0;
  std::size_t h1_done = 0;
  while (h0_done < low.size() || h1_done < low.size()) {
    bool h0_ok = h0_done < low.size();
    bool h1_ok = h1_done < low.size();
    BigNat r0 = h0_ok ? low[up].value() : BigNat(0);
    BigNat r1 = h1_ok ? cfg.c - low[down - 1].value() + 1 : BigNat(0);
    if (h0_ok && (!h1_ok || r0 <= r1)) {
      tasks.push_back({Side::H0, low[up], r0});
      ++up;
      ++h0_done;
    } else {
      tasks.push_back({Side::H1, low[down - 1], r1});
      --down;
      ++h1_done;
    }
  }
  return tasks;
}

inline std::vector<ScanTask> single_phase_tasks(const SupermachineConfig& cfg) {
  std::set<DescriptionNumber> high;
  bool has_ks = false;
  for (const auto& dn : cfg.catalog) {
    if (dn.value() > cfg.c) high.insert(dn);
    if (dn == cfg.ks) has_ks = true;
  }
  if (has_ks) high.insert(cfg.ks.next());
  std::vector<ScanTask> tasks;
  for (const auto& dn : high) tasks.push_back({Side::H0, dn, dn.value()});
  return tasks;
}

struct ScanResult {
  Tag tag = Tag::unknown;
  std::vector<ProtocolEvent> events;  // inner events only
  std::set<DescriptionNumber> reads;
};

inline ScanResult evaluate_task(const SupermachineConfig& cfg, const VerdictStore& store, const ScanTask& task,
                                const ScanOptions& opts) {
  if (opts.resume) {
    auto it = opts.resume->find(task.dn);
    if (it != opts.resume->end()) return {it->second, {}, {}};
  }
  Evaluator ev(cfg, store, task.side, task.round);
  ScanResult r;
  r.tag = ev.evaluate(task.dn);
  r.events = std::move(ev.events());
  r.reads = ev.reads();
  return r;
}

inline void commit_scan(VerdictStore& store, const ScanTask& task, ScanResult& r) {
  store.insert_pending(task.dn);
  store.log({EventKind::Scanned, task.round, task.dn, task.side, std::nullopt});
  for (auto& e : r.events) store.log(std::move(e));
  store.set_verdict(task.dn, r.tag);
  store.log({EventKind::VerdictSet, task.round, task.dn, task.side, r.tag});
}

inline void end_dual_phase(VerdictStore& store, const SupermachineConfig& cfg, const ScanTask* redundant) {
  BigNat round = redundant ? redundant->round : (cfg.c + 1) / 2;
  if (redundant) store.log({EventKind::RedundancyDecided, round, redundant->dn, redundant->side, std::nullopt});
  store.log({EventKind::PhaseSwitch, round, DescriptionNumber(cfg.c + 1), Side::Controller, std::nullopt});
}

}  // namespace detail

// Lockstep: each scan inserts (dn, z), evaluates, then sets the verdict.
// Concurrent: consecutive H0/H1 scans are evaluated in parallel against the
// committed store and committed in lockstep order; an H1 evaluation that
// consulted the dn H0 was scanning is re-run after H0 commits.
inline VerdictStore run_dual_phase(const SupermachineConfig& cfg, VerdictStore store, const ScanOptions& opts = {}) {
  if (!store.empty()) throw StoreError("the dual phase starts from an empty store");
  validate(cfg);
  StoreGate gate(store);
  const auto tasks = detail::dual_phase_tasks(cfg);

  auto run_one = [&](const ScanTask& task) -> bool {
    if (gate.read([&](const VerdictStore& s) { return s.decided(task.dn); })) {
      gate.write([&](VerdictStore& s) { detail::end_dual_phase(s, cfg, &task); });
      return false;
    }
    gate.write([&](VerdictStore& s) {
      s.insert_pending(task.dn);
      s.log({EventKind::Scanned, task.round, task.dn, task.side, std::nullopt});
    });
    auto r = gate.read([&](const VerdictStore& s) { return detail::evaluate_task(cfg, s, task, opts); });
    gate.write([&](VerdictStore& s) {
      for (auto& e : r.events) s.log(std::move(e));
      s.set_verdict(task.dn, r.tag);
      s.log({EventKind::VerdictSet, task.round, task.dn, task.side, r.tag});
    });
    return true;
  };

  std::size_t i = 0;
  bool switched = false;
  while (i < tasks.size()) {
    const ScanTask& a = tasks[i];
    bool pair = opts.mode == ScanMode::Concurrent && i + 1 < tasks.size() && tasks[i + 1].side != a.side &&
                tasks[i + 1].dn != a.dn;
    if (!pair) {
      if (!run_one(a)) {
        switched = true;
        break;
      }
      ++i;
      continue;
    }
    const ScanTask& b = tasks[i + 1];
    bool a_redundant = gate.read([&](const VerdictStore& s) { return s.decided(a.dn); });
    if (a_redundant) {
      gate.write([&](VerdictStore& s) { detail::end_dual_phase(s, cfg, &a); });
      switched = true;
      break;
    }
    bool b_redundant = gate.read([&](const VerdictStore& s) { return s.decided(b.dn); });
    std::future<detail::ScanResult> b_future;
    if (!b_redundant) {
      b_future = std::async(std::launch::async, [&] {
        return gate.read([&](const VerdictStore& s) { return detail::evaluate_task(cfg, s, b, opts); });
      });
    }
    auto ra = gate.read([&](const VerdictStore& s) { return detail::evaluate_task(cfg, s, a, opts); });
    std::optional<detail::ScanResult> rb;
    if (b_future.valid()) rb = b_future.get();
    gate.write([&](VerdictStore& s) { detail::commit_scan(s, a, ra); });
    if (b_redundant) {
      gate.write([&](VerdictStore& s) { detail::end_dual_phase(s, cfg, &b); });
      switched = true;
      break;
    }
    if (rb->reads.count(a.dn)) {
      rb = gate.read([&](const VerdictStore& s) { return detail::evaluate_task(cfg, s, b, opts); });
    }
    gate.write([&](VerdictStore& s) { detail::commit_scan(s, b, *rb); });
    i += 2;
  }
  if (!switched) detail::end_dual_phase(store, cfg, nullptr);
  return store;
}

inline VerdictStore run_single_phase(const SupermachineConfig& cfg, VerdictStore store,
                                     const ScanOptions& opts = {}) {
  if (!store.phase_switched()) throw StoreError("the single phase requires a completed dual phase");
  for (const auto& task : detail::single_phase_tasks(cfg)) {
    if (store.tag_of(task.dn)) continue;
    store.insert_pending(task.dn);
    store.log({EventKind::Scanned, task.round, task.dn, task.side, std::nullopt});
    auto r = detail::evaluate_task(cfg, store, task, opts);
    for (auto& e : r.events) store.log(std::move(e));
    store.set_verdict(task.dn, r.tag);
    store.log({EventKind::VerdictSet, task.round, task.dn, task.side, r.tag});
  }
  return store;
}

inline VerdictStore run_supermachine(const SupermachineConfig& cfg, const ScanOptions& opts = {}) {
  return run_single_phase(cfg, run_dual_phase(cfg, VerdictStore{}, opts), opts);
}

// '1' for s, '0' for u, '?' for unknown, over the first `length` entries in
// scan order.
inline std::string beta_prefix(const VerdictStore& store, std::size_t length) {
  if (length > store.size())
    throw PrefixIncomplete("only " + std::to_string(store.size()) + " entries scanned");
  std::string bits;
  bits.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    switch (*store.tag_of(store.order()[i])) {
      case Tag::s: bits += '1'; break;
      case Tag::u: bits += '0'; break;
      case Tag::unknown: bits += '?'; break;
      case Tag::z: throw PrefixIncomplete(store.order()[i].str() + " is still pending");
    }
  }
  return bits;
}

}  // namespace smw
