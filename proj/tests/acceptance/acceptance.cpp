// One line per acceptance criterion; exit status is the number of failures.

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "smw/smw.hpp"

using namespace smw;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string capture(const std::string& args) {
  std::string cmd = std::string(SMW_CLI_PATH) + " " + args;
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  pclose(pipe);
  return out;
}

Check truth_table() {
  Check c;
  auto out = capture("logic paper-table --format text");
  c.require(out == slurp(std::string(SMW_GOLDEN_DIR) + "/paper_table.txt"), "table differs from transcription");
  auto t = logic::paper_table();
  c.require(t.rows.size() == 8, "row count");
  for (const auto& row : t.rows) c.require(row.back(), "final column has an F");
  c.detail = c.ok ? "8 rows, final column all T" : c.detail;
  return c;
}

Check tautology_discrepancy() {
  Check c;
  auto f = logic::parse_formula("P(S) <-> ((x -> P(x)) -> S)");
  auto indep = logic::paper_env(false);
  auto r = logic::is_tautology(f, indep);
  c.require(!r.tautology && r.counterexample, "independent P(S) reported as tautology");
  if (!c.ok) return c;
  std::map<std::string, bool> values(r.counterexample->begin(), r.counterexample->end());
  c.require(!oracle::truth(f, indep, values), "counterexample does not falsify");
  c.require(!oracle::brute_tautology(f, indep, {"S", "x", "P(x)", "P(S)"}), "brute force disagrees");
  auto defined = logic::paper_env(true);
  c.require(logic::is_tautology(f, defined).tautology, "defined P(S) not a tautology");
  c.require(oracle::brute_tautology(f, defined, {"S", "x", "P(x)"}), "brute force disagrees on defined P(S)");
  if (c.ok) {
    c.detail = "counterexample";
    for (const auto& [a, v] : *r.counterexample) c.detail += " " + a + "=" + (v ? "T" : "F");
  }
  return c;
}

std::ptrdiff_t find_event(const std::vector<ProtocolEvent>& ev, EventKind k, std::optional<Side> side,
                          const DescriptionNumber& dn, std::size_t from = 0) {
  for (std::size_t i = from; i < ev.size(); ++i)
    if (ev[i].kind == k && (!side || ev[i].side == *side) && ev[i].dn == dn) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

Check supermachine_events() {
  Check c;
  auto cfg = build(catalog_numbers(builtin_catalog()), 10000);
  auto store = run_supermachine(cfg);
  const auto& ev = store.events();

  auto h0_k1 = find_event(ev, EventKind::Scanned, Side::H0, cfg.k1);
  auto h1_k1 = find_event(ev, EventKind::Scanned, Side::H1, cfg.k1);
  auto h1_k0 = find_event(ev, EventKind::Scanned, Side::H1, cfg.k0);
  auto h0_k0 = find_event(ev, EventKind::Scanned, Side::H0, cfg.k0);
  c.require(h0_k1 >= 0 && (h1_k1 < 0 || h0_k1 < h1_k1), "(a) H0 does not read K1 first");
  c.require(h1_k0 >= 0 && (h0_k0 < 0 || h1_k0 < h0_k0), "(a) H1 does not read K0 first");

  auto k0_set = find_event(ev, EventKind::VerdictSet, Side::H1, cfg.k0);
  auto k1_set = find_event(ev, EventKind::VerdictSet, Side::H0, cfg.k1);
  c.require(k0_set >= 0 && ev[k0_set].tag == Tag::s, "(b) VerdictSet(K0, s) by H1 missing");
  c.require(k1_set >= 0 && ev[k1_set].tag == Tag::s, "(b) VerdictSet(K1, s) by H0 missing");

  std::ptrdiff_t red = -1, sw = -1;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].kind == EventKind::RedundancyDecided && red < 0) red = static_cast<std::ptrdiff_t>(i);
    if (ev[i].kind == EventKind::PhaseSwitch && sw < 0) sw = static_cast<std::ptrdiff_t>(i);
  }
  c.require(red >= 0 && sw == red + 1, "(c) RedundancyDecided not followed by PhaseSwitch");
  c.require(sw >= 0 && ev[sw].dn.value() == cfg.c + 1, "(c) PhaseSwitch not at c + 1");

  int recognitions = 0;
  std::ptrdiff_t rec = -1;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].kind == EventKind::SelfRecognition) {
      ++recognitions;
      rec = static_cast<std::ptrdiff_t>(i);
    }
  }
  c.require(recognitions == 1 && ev[rec].dn == cfg.ks, "(d) not exactly one SelfRecognition(K_s)");
  auto next = rec >= 0 ? find_event(ev, EventKind::Scanned, std::nullopt, cfg.ks.next(), rec) : -1;
  bool scanned_between = false;
  for (auto i = rec + 1; rec >= 0 && i < next; ++i) scanned_between |= ev[i].kind == EventKind::Scanned;
  c.require(next > rec && ev[next].side == Side::H0 && !scanned_between, "(d) Scanned(H0, K_s + 1) does not follow");

  auto golden = slurp(std::string(SMW_GOLDEN_DIR) + "/super_builtin.jsonl");
  c.require(capture("super --catalog builtin --budget 10000") == golden, "event log differs from golden");
  if (c.ok) c.detail = std::to_string(ev.size()) + " events, beta " + beta_prefix(store, store.size());
  return c;
}

Check oracle_soundness() {
  Check c;
  const StepCount budget = 10000;
  std::size_t total = 0, unknown = 0, halted = 0, cycled = 0;
  for (const auto& sd : oracle::all_two_state_machines()) {
    ++total;
    auto v = classify(sd_to_dn(sd), budget);
    auto truth = oracle::brute_force(oracle::rules_of(sd), 4 * budget);
    if (v.tag == Tag::unknown) {
      ++unknown;
      c.require(!(truth.halt_steps && *truth.halt_steps <= budget), "missed a halt within budget: " + emit_sd(sd));
      continue;
    }
    if (const auto* h = std::get_if<Halted>(&v.evidence)) {
      ++halted;
      c.require(truth.halt_steps && *truth.halt_steps == h->steps, "halt disagreement: " + emit_sd(sd));
    } else if (const auto* cy = std::get_if<Cycled>(&v.evidence)) {
      ++cycled;
      c.require(truth.cycle && truth.cycle->first == cy->first_visit && truth.cycle->second == cy->period,
                "cycle disagreement: " + emit_sd(sd));
    } else {
      c.require(false, "unexpected evidence for " + emit_sd(sd));
    }
  }
  c.require(total == 28560, "machine count " + std::to_string(total));
  if (c.ok) {
    char frac[32];
    std::snprintf(frac, sizeof frac, "%.4f", static_cast<double>(unknown) / static_cast<double>(total));
    c.detail = std::to_string(total) + " machines, " + std::to_string(halted) + " halted, " +
               std::to_string(cycled) + " cycled, " + std::to_string(unknown) + " unknown (fraction " + frac +
               "), 0 disagreements";
  }
  return c;
}

Check busy_beavers() {
  Check c;
  auto bb2 = run(parse_sd("DADDCRDAA;DADCDCLDAA;DAADDCLDA;DAADCDCRDAAA;"), 100).outcome;
  auto bb3 = run(parse_sd("DADDCRDAA;DADCDCRDAAAA;DAADDCLDAA;DAADCDRDAAA;DAAADDCLDAAA;DAAADCDCLDA;"), 100).outcome;
  c.require(bb2 == RunOutcome{Halted{6}}, "bb2 gave " + describe(bb2));
  c.require(bb3 == RunOutcome{Halted{21}}, "bb3 gave " + describe(bb3));
  if (c.ok) c.detail = "bb2 " + describe(bb2) + ", bb3 " + describe(bb3);
  return c;
}

Check codec_round_trip() {
  Check c;
  std::mt19937_64 rng(20240601);
  int failures = 0, meta = 0;
  for (int i = 0; i < 10000; ++i) {
    auto sd = oracle::random_sd(rng);
    meta += sd.has_meta();
    try {
      if (!(dn_to_sd(sd_to_dn(sd)) == sd)) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }
  c.require(failures == 0, std::to_string(failures) + " failures");
  if (c.ok) c.detail = "10000 machines (" + std::to_string(meta) + " with meta-calls), 0 failures";
  return c;
}

Check ledger() {
  Check c;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> node(0, 5), len(1, 12);
  int disagreements = 0, violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<oracle::Edge> seq;
    for (int k = len(rng); k > 0; --k)
      seq.emplace_back("n" + std::to_string(node(rng)), "n" + std::to_string(node(rng)));
    for (auto mode : {logic::LedgerMode::Default, logic::LedgerMode::Strict}) {
      logic::SubstLedger l(mode);
      std::set<oracle::Edge> accepted;
      for (const auto& e : seq) {
        auto with = accepted;
        with.insert(e);
        bool forbidden = mode == logic::LedgerMode::Default ? oracle::has_forbidden_triple(with)
                                                             : oracle::has_cycle(with);
        auto r = logic::record_subst(l, e.first, e.second);
        bool rejected = std::holds_alternative<logic::Violation>(r);
        if (rejected != forbidden) ++disagreements;
        if (rejected) {
          ++violations;
        } else {
          l = std::get<logic::SubstLedger>(r);
          accepted = with;
        }
      }
    }
  }
  c.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
  if (c.ok) c.detail = "1000 sequences x 2 modes, " + std::to_string(violations) + " rejections, 0 disagreements";
  return c;
}

Check concurrency() {
  Check c;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    auto cfg = oracle::random_toy_config(rng);
    auto lock = run_supermachine(cfg, {ScanMode::Lockstep, nullptr});
    auto conc = run_supermachine(cfg, {ScanMode::Concurrent, nullptr});
    c.require(lock.entries() == conc.entries(), "store differs on catalog " + std::to_string(i));
    c.require(normalize_events(lock.events()) == normalize_events(conc.events()),
              "event log differs on catalog " + std::to_string(i));
  }
  if (c.ok) c.detail = "20 catalogs, stores and normalized logs equal";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "truth-table reproduction", 1.0, truth_table},
      {2, "tautology discrepancy", 1.0, tautology_discrepancy},
      {3, "supermachine lemma events", 10.0, supermachine_events},
      {4, "oracle soundness over 2-state/2-symbol space", 60.0, oracle_soundness},
      {5, "busy-beaver step counts", 1.0, busy_beavers},
      {6, "codec round-trip", 30.0, codec_round_trip},
      {7, "substitution ledger vs brute force", 30.0, ledger},
      {8, "determinism under concurrency", 30.0, concurrency},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = cr.run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (result.ok && secs > cr.limit_s) {
      result.ok = false;
      result.detail += " (over the " + std::to_string(cr.limit_s) + " s limit)";
    }
    failures += !result.ok;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
    std::cout << "criterion " << cr.id << " [" << cr.name << "]: " << (result.ok ? "PASS" : "FAIL") << " (" << timing
              << ") " << result.detail << std::endl;
  }
  return failures;
}
