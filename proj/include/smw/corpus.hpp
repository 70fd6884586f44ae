#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "smw/halt_oracle.hpp"
#include "smw/sd_codec.hpp"

namespace smw {

enum class TruthSource { ExhaustiveSimulation, ByConstruction };

inline std::string to_string(TruthSource s) {
  return s == TruthSource::ExhaustiveSimulation ? "exhaustive-simulation" : "by-construction";
}

inline TruthSource truth_source_from_string(const std::string& text) {
  if (text == "exhaustive-simulation") return TruthSource::ExhaustiveSimulation;
  if (text == "by-construction") return TruthSource::ByConstruction;
  throw CatalogError("unknown truth source '" + text + "'");
}

// sd_text is kept verbatim so that entries whose digits describe no machine
// (the malformed placeholder) can live in the same catalog.
struct CorpusEntry {
  std::string name;
  std::string sd_text;
  Tag ground_truth = Tag::unknown;
  TruthSource truth_source = TruthSource::ExhaustiveSimulation;
  StepCount budget = 1000;

  DescriptionNumber dn() const { return text_to_dn(sd_text); }

  std::optional<StandardDescription> sd() const {
    try {
      return parse_sd(sd_text);
    } catch (const MalformedSD&) {
      return std::nullopt;
    } catch (const NondeterministicSD&) {
      return std::nullopt;
    }
  }

  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

// Pure s/u entries must reproduce their ground truth within their budget.
// Meta entries and unknown ground truths are taken as given.
inline void validate_entry(const CorpusEntry& e) {
  if (e.name.empty()) throw CatalogError("entry without a name");
  if (e.budget == 0) throw CatalogError(e.name + ": budget must be at least 1");
  if (e.ground_truth == Tag::z) throw CatalogError(e.name + ": z is not a ground truth");
  DescriptionNumber dn;
  try {
    dn = e.dn();
  } catch (const Error& err) {
    throw CatalogError(e.name + ": " + err.what());
  }
  auto sd = e.sd();
  if (sd && sd->has_meta()) return;
  if (e.ground_truth == Tag::unknown) return;
  Verdict v = classify(dn, e.budget);
  if (v.tag != e.ground_truth)
    throw CatalogError(e.name + ": ground truth " + to_string(e.ground_truth) + " but classify gives " +
                       to_string(v.tag) + " (" + evidence_name(v.evidence) + ") within budget " +
                       std::to_string(e.budget));
}

inline std::vector<CorpusEntry> builtin_catalog() {
  using TS = TruthSource;
  std::vector<CorpusEntry> c{
      {"halt-now", "DADCDCRDA;", Tag::s, TS::ExhaustiveSimulation, 100},
      {"self-loop", "DADDNDA;", Tag::u, TS::ExhaustiveSimulation, 100},
      // Writes and clears a two-cell pattern, back on the blank tape every six steps.
      {"counter", "DADDCNDA;DADCDRDAA;DAADDCLDA;DAADCDLDA;", Tag::u, TS::ExhaustiveSimulation, 100},
      {"bb2", "DADDCRDAA;DADCDCLDAA;DAADDCLDA;DAADCDCRDAAA;", Tag::s, TS::ExhaustiveSimulation, 100},
      {"bb3", "DADDCRDAA;DADCDCRDAAAA;DAADDCLDAA;DAADCDRDAAA;DAAADDCLDAAA;DAAADCDCLDA;", Tag::s,
       TS::ExhaustiveSimulation, 100},
      {"malformed", ";;;;", Tag::u, TS::ByConstruction, 100},
      // Asks for its own verdict, loops on s and halts on u.
      {"contrarian", "DADE()DAADAAA;DAADDNDAA;", Tag::unknown, TS::ByConstruction, 100},
  };
  return c;
}

inline nlohmann::ordered_json to_json(const CorpusEntry& e) {
  nlohmann::ordered_json j;
  j["name"] = e.name;
  j["sd_text"] = e.sd_text;
  j["ground_truth"] = to_string(e.ground_truth);
  j["truth_source"] = to_string(e.truth_source);
  j["budget"] = e.budget;
  return j;
}

inline CorpusEntry entry_from_json(const nlohmann::json& j) {
  try {
    CorpusEntry e;
    e.name = j.at("name").get<std::string>();
    e.sd_text = j.at("sd_text").get<std::string>();
    e.ground_truth = tag_from_string(j.at("ground_truth").get<std::string>());
    e.truth_source = truth_source_from_string(j.at("truth_source").get<std::string>());
    e.budget = j.at("budget").get<StepCount>();
    return e;
  } catch (const nlohmann::json::exception& err) {
    throw CatalogError(err.what());
  } catch (const StoreError& err) {
    throw CatalogError(err.what());
  }
}

inline std::vector<CorpusEntry> read_catalog(std::istream& in) {
  std::vector<CorpusEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& err) {
      throw CatalogError("line " + std::to_string(lineno) + ": " + err.what());
    }
    out.push_back(entry_from_json(j));
    validate_entry(out.back());
  }
  return out;
}

inline std::vector<CorpusEntry> load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot open catalog '" + path + "'");
  return read_catalog(in);
}

inline void write_catalog(std::ostream& out, const std::vector<CorpusEntry>& entries) {
  for (const auto& e : entries) out << to_json(e).dump() << '\n';
}

inline void save_catalog(const std::string& path, const std::vector<CorpusEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw CatalogError("cannot write catalog '" + path + "'");
  write_catalog(out, entries);
}

inline std::vector<DescriptionNumber> catalog_numbers(const std::vector<CorpusEntry>& entries) {
  std::vector<DescriptionNumber> out;
  for (const auto& e : entries) out.push_back(e.dn());
  return out;
}

}  // namespace smw
