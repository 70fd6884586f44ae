#pragma once

// Bounded, three-valued halting classification of a single D.N.

#include <optional>
#include <string>
#include <variant>

#include "smw/sd_codec.hpp"
#include "smw/tm_sim.hpp"

namespace smw {

// z is the provisional tag held by the verdict store; the oracle never
// produces it.
enum class Tag { z, s, u, unknown };

inline std::string to_string(Tag tag) {
  switch (tag) {
    case Tag::z: return "z";
    case Tag::s: return "s";
    case Tag::u: return "u";
    case Tag::unknown: return "unknown";
  }
  return "?";
}

inline Tag tag_from_string(const std::string& text) {
  if (text == "z") return Tag::z;
  if (text == "s") return Tag::s;
  if (text == "u") return Tag::u;
  if (text == "unknown") return Tag::unknown;
  throw StoreError("unknown tag '" + text + "'");
}

struct NotWellFormedEvidence {
  friend bool operator==(const NotWellFormedEvidence&, const NotWellFormedEvidence&) = default;
};

using Evidence = std::variant<Halted, Cycled, NotWellFormedEvidence, Exhausted>;

struct Verdict {
  Tag tag = Tag::unknown;
  Evidence evidence = Exhausted{};

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline std::string evidence_name(const Evidence& e) {
  switch (e.index()) {
    case 0: return "halted";
    case 1: return "cycled";
    case 2: return "not-well-formed";
    default: return "exhausted";
  }
}

// Step count attached to the evidence: halting step, step at which the repeat
// was observed, the exhausted budget, or 0 for undecodable numbers.
inline StepCount evidence_steps(const Evidence& e) {
  if (const auto* h = std::get_if<Halted>(&e)) return h->steps;
  if (const auto* c = std::get_if<Cycled>(&e)) return c->first_visit + c->period;
  if (const auto* x = std::get_if<Exhausted>(&e)) return x->budget;
  return 0;
}

inline Verdict classify_sd(const StandardDescription& sd, StepCount budget) {
  if (sd.has_meta()) throw MetaMachineRejected("meta-machines are evaluated only by the supermachine");
  auto result = run(sd, budget);
  if (const auto* h = std::get_if<Halted>(&result.outcome)) return {Tag::s, *h};
  if (const auto* c = std::get_if<Cycled>(&result.outcome)) return {Tag::u, *c};
  return {Tag::unknown, std::get<Exhausted>(result.outcome)};
}

inline std::optional<StandardDescription> try_decode(const DescriptionNumber& dn) {
  try {
    return dn_to_sd(dn);
  } catch (const NotWellFormed&) {
    return std::nullopt;
  }
}

// Numbers that describe no machine are classified u.
inline Verdict classify(const DescriptionNumber& dn, StepCount budget) {
  if (budget == 0) throw std::invalid_argument("classify budget must be at least 1");
  auto sd = try_decode(dn);
  if (!sd) return {Tag::u, NotWellFormedEvidence{}};
  return classify_sd(*sd, budget);
}

// "dn,tag,evidence,steps"
inline std::string csv_row(const DescriptionNumber& dn, const Verdict& v) {
  return dn.str() + "," + to_string(v.tag) + "," + evidence_name(v.evidence) + "," +
         std::to_string(evidence_steps(v.evidence));
}

}  // namespace smw
