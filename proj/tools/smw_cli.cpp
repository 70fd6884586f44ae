#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smw/smw.hpp"

using namespace smw;
using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

StandardDescription machine_from(const std::string& text, const std::string& dn) {
  if (!text.empty() && !dn.empty()) throw UsageError("give either an S.D. or --dn, not both");
  if (!dn.empty()) return dn_to_sd(DescriptionNumber::from_string(dn));
  if (text.empty()) throw UsageError("an S.D. or --dn is required");
  return parse_sd(text);
}

void cmd_encode(const std::string& text) { std::cout << sd_to_dn(parse_sd(text)).str() << "\n"; }

void cmd_decode(const std::string& dn) { std::cout << emit_sd(dn_to_sd(DescriptionNumber::from_string(dn))) << "\n"; }

void cmd_run(const std::string& text, const std::string& dn, StepCount budget, bool trace, const std::string& format) {
  auto sd = machine_from(text, dn);
  auto result = run(sd, budget, trace);
  if (format == "text") {
    std::cout << format_trace(result.trace) << describe(result.outcome) << "\n";
    return;
  }
  for (const auto& r : result.trace) {
    ordered_json j;
    j["step"] = r.step;
    j["state"] = r.state;
    j["head"] = r.head;
    j["scanned"] = r.scanned;
    std::cout << j.dump() << "\n";
  }
  ordered_json j;
  j["outcome"] = describe(result.outcome);
  if (const auto* h = std::get_if<Halted>(&result.outcome)) j["steps"] = h->steps;
  if (const auto* c = std::get_if<Cycled>(&result.outcome)) {
    j["first_visit"] = c->first_visit;
    j["period"] = c->period;
  }
  std::cout << j.dump() << "\n";
}

void cmd_classify(std::vector<std::string> numbers, const std::string& file, StepCount budget,
                  const std::string& format) {
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot open '" + file + "'");
    std::string word;
    while (in >> word) numbers.push_back(word);
  }
  if (numbers.empty()) throw UsageError("no description numbers given");
  if (format == "csv") std::cout << "dn,tag,evidence,steps\n";
  for (const auto& text : numbers) {
    auto dn = DescriptionNumber::from_string(text);
    auto v = classify(dn, budget);
    if (format == "csv") {
      std::cout << csv_row(dn, v) << "\n";
    } else if (format == "text") {
      std::cout << dn.str() << " " << to_string(v.tag) << " " << evidence_name(v.evidence) << " "
                << evidence_steps(v.evidence) << "\n";
    } else {
      ordered_json j;
      j["dn"] = dn.str();
      j["tag"] = to_string(v.tag);
      j["evidence"] = evidence_name(v.evidence);
      j["steps"] = evidence_steps(v.evidence);
      std::cout << j.dump() << "\n";
    }
  }
}

void cmd_super(const std::string& catalog_path, StepCount budget, const std::string& store_path, bool concurrent,
               const std::string& format) {
  auto entries = catalog_path == "builtin" ? builtin_catalog() : load_catalog(catalog_path);
  auto cfg = build(catalog_numbers(entries), budget);

  std::map<DescriptionNumber, Tag> snapshot;
  if (!store_path.empty()) {
    std::ifstream in(store_path);
    if (in) snapshot = load_store_snapshot(in);
  }
  ScanOptions opts;
  opts.mode = concurrent ? ScanMode::Concurrent : ScanMode::Lockstep;
  if (!snapshot.empty()) opts.resume = &snapshot;
  auto store = run_supermachine(cfg, opts);

  if (!store_path.empty()) {
    std::ofstream out(store_path);
    if (!out) throw StoreError("cannot write '" + store_path + "'");
    save_store_jsonl(out, store);
  }

  const std::string beta = beta_prefix(store, store.size());
  if (format == "text") {
    for (const auto& e : store.events()) {
      std::cout << to_string(e.kind) << " " << to_string(e.side) << " " << e.dn.str();
      if (e.tag) std::cout << " " << to_string(*e.tag);
      std::cout << "\n";
    }
    std::cout << "c " << cfg.c.str() << "\nK' " << cfg.k_prime.str() << "\nK0 " << cfg.k0.str() << "\nK1 "
              << cfg.k1.str() << "\nK_s " << cfg.ks.str() << "\nbeta " << beta << "\n";
    return;
  }
  write_events_jsonl(std::cout, store.events());
  ordered_json summary;
  summary["kind"] = "Summary";
  summary["c"] = cfg.c.str();
  summary["k_prime"] = cfg.k_prime.str();
  summary["k0"] = cfg.k0.str();
  summary["k1"] = cfg.k1.str();
  summary["ks"] = cfg.ks.str();
  summary["beta"] = beta;
  std::cout << summary.dump() << "\n";
}

logic::ArrowReading reading_from(const std::string& name) {
  if (name == "material") return logic::ArrowReading::Material;
  if (name == "biconditional") return logic::ArrowReading::Biconditional;
  throw UsageError("unknown reading '" + name + "'");
}

void print_table(const logic::Table& t, const std::string& format) {
  if (format == "text") std::cout << logic::render_text(t);
  else if (format == "csv") std::cout << logic::render_csv(t);
  else std::cout << logic::render_jsonl(t);
}

// NAME=FORMULA definitions are applied in order after declaring every free atom.
logic::AtomEnv env_for(const std::vector<logic::FormulaPtr>& formulas, const std::vector<std::string>& defines) {
  logic::AtomEnv env;
  std::vector<std::pair<std::string, logic::FormulaPtr>> defs;
  for (const auto& d : defines) {
    auto eq = d.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--define expects NAME=FORMULA, got '" + d + "'");
    defs.emplace_back(d.substr(0, eq), logic::parse_formula(d.substr(eq + 1)));
  }
  for (const auto& [name, f] : defs) env.declare_free(f);
  for (const auto& f : formulas) env.declare_free(f);
  for (const auto& [name, f] : defs) env.define(name, f);
  return env;
}

void cmd_logic_table(const std::vector<std::string>& texts, const std::vector<std::string>& defines,
                     const std::string& atoms_csv, const std::string& rows, const std::string& reading,
                     const std::string& format) {
  std::vector<logic::FormulaPtr> columns;
  for (const auto& t : texts) columns.push_back(logic::parse_formula(t));
  auto env = env_for(columns, defines);
  std::vector<std::string> atoms;
  if (!atoms_csv.empty()) {
    std::stringstream in(atoms_csv);
    std::string a;
    while (std::getline(in, a, ',')) atoms.push_back(a);
  } else {
    for (const auto& col : columns) {
      for (const auto& a : env.independent_atoms(col)) {
        if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(a);
      }
    }
  }
  auto order = rows.empty() ? std::vector<std::vector<bool>>{} : logic::parse_rows(rows, atoms.size());
  print_table(logic::truth_table(columns, env, atoms, order, reading_from(reading)), format);
}

int cmd_logic_taut(const std::string& text, const std::vector<std::string>& defines, const std::string& reading,
                   const std::string& format) {
  auto f = logic::parse_formula(text);
  auto env = env_for({f}, defines);
  auto r = logic::is_tautology(f, env, reading_from(reading));
  if (format == "text") {
    std::cout << (r.tautology ? "tautology" : "not a tautology");
    if (r.counterexample) {
      std::cout << ":";
      for (const auto& [a, v] : *r.counterexample) std::cout << " " << a << "=" << (v ? "T" : "F");
    }
    std::cout << "\n";
  } else {
    ordered_json j;
    j["formula"] = logic::to_string(f);
    j["tautology"] = r.tautology;
    if (r.counterexample) {
      ordered_json cex = ordered_json::object();
      for (const auto& [a, v] : *r.counterexample) cex[a] = v;
      j["counterexample"] = cex;
    } else {
      j["counterexample"] = nullptr;
    }
    std::cout << j.dump() << "\n";
  }
  return 0;
}

void cmd_paper_table(bool material, bool independent, const std::string& rows, const std::string& format) {
  logic::PaperTableOptions opts;
  opts.reading = material ? logic::ArrowReading::Material : logic::ArrowReading::Biconditional;
  opts.define_ps = !independent;
  if (!rows.empty()) opts.rows = rows;
  print_table(logic::paper_table(opts), format);
}

int cmd_subst(bool strict, std::vector<std::string> edges, const std::string& format) {
  if (edges.empty()) {
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) edges.push_back(line);
    }
  }
  logic::SubstLedger ledger(strict ? logic::LedgerMode::Strict : logic::LedgerMode::Default);
  bool violated = false;
  for (const auto& raw : edges) {
    auto gt = raw.find('>');
    if (gt == std::string::npos || gt == 0 || gt + 1 == raw.size())
      throw UsageError("edges are written FROM>TO, got '" + raw + "'");
    std::string from = raw.substr(0, gt);
    std::string to = raw.substr(gt + 1);
    auto result = logic::record_subst(ledger, from, to);
    ordered_json j;
    j["edge"] = from + ">" + to;
    if (auto* next = std::get_if<logic::SubstLedger>(&result)) {
      ledger = *next;
      j["accepted"] = true;
      if (format == "text") std::cout << from << " -> " << to << ": accepted\n";
    } else {
      violated = true;
      const auto& v = std::get<logic::Violation>(result);
      j["accepted"] = false;
      j["violation"] = v.kind == logic::Violation::Kind::Triple ? "triple" : "cycle";
      j["chain"] = v.chain;
      if (format == "text") std::cout << from << " -> " << to << ": rejected, " << v.describe() << "\n";
    }
    if (format != "text") std::cout << j.dump() << "\n";
  }
  return violated ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Computability workbench: S.D. codec, simulator, halting oracle, supermachine, logic"};
  app.require_subcommand(1);
  int status = 0;

  auto* encode = app.add_subcommand("encode", "S.D. text to description number");
  std::string encode_text;
  encode->add_option("sd", encode_text, "S.D. text")->required();
  encode->callback([&] { cmd_encode(encode_text); });

  auto* decode = app.add_subcommand("decode", "description number to S.D. text");
  std::string decode_dn;
  decode->add_option("dn", decode_dn, "description number")->required();
  decode->callback([&] { cmd_decode(decode_dn); });

  auto* runc = app.add_subcommand("run", "simulate a machine from the blank tape");
  std::string run_text, run_dn, run_format = "json";
  StepCount run_budget = 10000;
  bool run_trace = false;
  runc->add_option("sd", run_text, "S.D. text");
  runc->add_option("--dn", run_dn, "description number instead of S.D. text");
  runc->add_option("--budget", run_budget, "step budget")->check(CLI::PositiveNumber);
  runc->add_flag("--trace", run_trace, "print one line per executed step");
  runc->add_option("--format", run_format)->check(CLI::IsMember({"json", "text"}));
  runc->callback([&] { cmd_run(run_text, run_dn, run_budget, run_trace, run_format); });

  auto* cls = app.add_subcommand("classify", "bounded halting verdicts");
  std::vector<std::string> cls_dns;
  std::string cls_file, cls_format = "json";
  StepCount cls_budget = 10000;
  cls->add_option("dn", cls_dns, "description numbers");
  cls->add_option("--file", cls_file, "read whitespace-separated numbers from a file");
  cls->add_option("--budget", cls_budget)->check(CLI::PositiveNumber);
  cls->add_option("--format", cls_format)->check(CLI::IsMember({"json", "csv", "text"}));
  cls->callback([&] { cmd_classify(cls_dns, cls_file, cls_budget, cls_format); });

  auto* sup = app.add_subcommand("super", "run the supermachine over a catalog");
  std::string sup_catalog = "builtin", sup_store, sup_format = "json";
  StepCount sup_budget = 10000;
  bool sup_concurrent = false;
  sup->add_option("--catalog", sup_catalog, "builtin or a JSON-lines catalog path");
  sup->add_option("--budget", sup_budget)->check(CLI::PositiveNumber);
  sup->add_option("--store", sup_store, "store file; resumed from when present, rewritten at the end");
  sup->add_flag("--concurrent", sup_concurrent, "evaluate H0 and H1 scans in parallel");
  sup->add_option("--format", sup_format)->check(CLI::IsMember({"json", "text"}));
  sup->callback([&] { cmd_super(sup_catalog, sup_budget, sup_store, sup_concurrent, sup_format); });

  auto* logic_cmd = app.add_subcommand("logic", "propositional tables and tautologies");
  logic_cmd->require_subcommand(1);

  auto* table = logic_cmd->add_subcommand("table", "truth table for one or more formulas");
  std::vector<std::string> table_formulas, table_defines;
  std::string table_atoms, table_rows, table_reading = "material", table_format = "json";
  table->add_option("formula", table_formulas)->required();
  table->add_option("--define", table_defines, "NAME=FORMULA");
  table->add_option("--atoms", table_atoms, "comma-separated independent atoms, in column order");
  table->add_option("--rows", table_rows, "row order such as TT,TF,FT,FF");
  table->add_option("--reading", table_reading)->check(CLI::IsMember({"material", "biconditional"}));
  table->add_option("--format", table_format)->check(CLI::IsMember({"json", "csv", "text"}));
  table->callback(
      [&] { cmd_logic_table(table_formulas, table_defines, table_atoms, table_rows, table_reading, table_format); });

  auto* taut = logic_cmd->add_subcommand("taut", "exhaustive tautology check");
  std::string taut_formula, taut_reading = "material", taut_format = "json";
  std::vector<std::string> taut_defines;
  taut->add_option("formula", taut_formula)->required();
  taut->add_option("--define", taut_defines, "NAME=FORMULA");
  taut->add_option("--reading", taut_reading)->check(CLI::IsMember({"material", "biconditional"}));
  taut->add_option("--format", taut_format)->check(CLI::IsMember({"json", "text"}));
  taut->callback([&] { status = cmd_logic_taut(taut_formula, taut_defines, taut_reading, taut_format); });

  auto* paper = logic_cmd->add_subcommand("paper-table", "the eight-row P(S) table");
  bool paper_material = false, paper_independent = false;
  std::string paper_rows, paper_format = "json";
  paper->add_flag("--material", paper_material, "read arrows as material implication");
  paper->add_flag("--independent", paper_independent, "treat P(S) as an independent atom");
  paper->add_option("--rows", paper_rows, "row order over S,x,P(x)[,P(S)]");
  paper->add_option("--format", paper_format)->check(CLI::IsMember({"json", "csv", "text"}));
  paper->callback([&] { cmd_paper_table(paper_material, paper_independent, paper_rows, paper_format); });

  auto* subst = app.add_subcommand("subst", "substitution ledger");
  subst->require_subcommand(1);
  auto* check = subst->add_subcommand("check", "record edges FROM>TO in order; exit 1 on a violation");
  bool subst_strict = false;
  std::vector<std::string> subst_edges;
  std::string subst_format = "json";
  check->add_flag("--strict", subst_strict, "reject every directed cycle");
  check->add_option("edges", subst_edges, "edges; read from stdin when absent");
  check->add_option("--format", subst_format)->check(CLI::IsMember({"json", "text"}));
  check->callback([&] { status = cmd_subst(subst_strict, subst_edges, subst_format); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const smw::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
