#include "moledit/cli.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "moledit/editor.hpp"
#include "moledit/errors.hpp"
#include "moledit/evalx.hpp"
#include "moledit/fprint.hpp"
#include "moledit/lineio.hpp"
#include "moledit/mmp.hpp"
#include "moledit/prepfilter.hpp"
#include "moledit/synthgen.hpp"

namespace moledit {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

SmiReadResult read_smi_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_smi(in);
}

std::string format_double(double v, int precision = 9) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

// Canonical atom order makes the kekulized spelling input-independent.
std::string canonical_kekulized(const Molecule& mol) {
  Molecule ordered = parse_smiles(canonical_smiles(mol));
  SmilesDialect dialect;
  dialect.kekulized_output = true;
  return write_smiles(ordered, dialect);
}

struct CanonOpts {
  std::vector<std::string> inline_smiles;
  std::string in_path;
  bool kekulized = false;
  bool numbered = false;
  std::string format = "tsv";
};

int run_canon(const CanonOpts& opts) {
  std::vector<SmiRecord> records;
  size_t skipped = 0;
  if (!opts.in_path.empty()) {
    SmiReadResult read = read_smi_file(opts.in_path);
    records = std::move(read.records);
    skipped = read.skipped;
    for (const auto& [line, err] : read.errors)
      std::cerr << "line " << line << ": " << err << "\n";
  }
  for (const std::string& s : opts.inline_smiles) {
    SmiRecord rec;
    rec.smiles = s;
    rec.mol = parse_smiles(s);
    records.push_back(std::move(rec));
  }
  if (records.empty() && skipped == 0) throw EmptyInput("no molecules given");

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const SmiRecord& rec : records) {
    std::string out = opts.numbered ? numbered_smiles(rec.mol)
                      : opts.kekulized ? canonical_kekulized(rec.mol)
                                       : canonical_smiles(rec.mol);
    if (opts.format == "json") {
      nlohmann::ordered_json row;
      row["input"] = rec.smiles;
      if (!rec.id.empty()) row["id"] = rec.id;
      row["output"] = out;
      rows.push_back(std::move(row));
    } else {
      std::cout << out;
      if (!rec.id.empty()) std::cout << "\t" << rec.id;
      std::cout << "\n";
    }
  }
  if (opts.format == "json") std::cout << rows.dump(2) << "\n";
  if (skipped > 0) {
    std::cerr << skipped << " line(s) skipped\n";
    return 1;
  }
  return 0;
}

struct EditOpts {
  std::string source;
  std::vector<std::string> actions;
  std::string wrapper_path;
  std::string script_path;
  uint64_t seed = 0;
  std::string format = "json";
};

int run_edit(const EditOpts& opts, bool from_json) {
  Molecule source = parse_smiles(opts.source);
  EditScript script;
  std::string wrapper_target;

  if (from_json) {
    script = script_from_json(read_file(opts.script_path));
  } else if (!opts.wrapper_path.empty()) {
    WrapperPayload payload = parse_wrapper_json(read_file(opts.wrapper_path));
    for (const std::string& text : payload.action_texts)
      script.actions.push_back(parse_action(normalize_action(text)));
    wrapper_target = payload.final_target;
  } else {
    for (const std::string& text : opts.actions)
      script.actions.push_back(parse_action(normalize_action(text)));
  }
  if (script.actions.empty()) throw EmptyInput("no actions given");

  EditOutcome outcome = apply_script(source, script, opts.seed);

  if (opts.format == "json") {
    nlohmann::ordered_json j;
    j["source"] = canonical_smiles(source);
    j["products"] = outcome.product_smiles;
    j["primary"] = outcome.product_smiles.front();
    if (!wrapper_target.empty()) {
      std::string want;
      try {
        want = canonical_smiles(parse_smiles(wrapper_target));
      } catch (const Error&) {
      }
      bool hit = false;
      for (const std::string& p : outcome.product_smiles)
        if (p == want) hit = true;
      j["final_target"] = wrapper_target;
      j["final_target_match"] = hit;
    }
    j["warnings"] = outcome.warnings;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const std::string& p : outcome.product_smiles) std::cout << p << "\n";
  }
  return 0;
}

struct GenOpts {
  std::string in_path;
  uint64_t seed = 0;
  int iterations = 0;
  int jobs = 1;
};

int run_gen(const GenOpts& opts) {
  SmiReadResult read = read_smi_file(opts.in_path);
  for (const auto& [line, err] : read.errors)
    std::cerr << "line " << line << ": " << err << "\n";
  if (read.records.empty()) throw EmptyInput("no parseable molecules in input");

  const size_t n = read.records.size();
  std::vector<std::string> lines(n);
  std::vector<uint8_t> produced(n, 0);

  builtin_pools();  // parse the vocabulary once before going parallel
  int jobs = std::max(1, opts.jobs);
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (size_t i = cursor.fetch_add(1); i < n; i = cursor.fetch_add(1)) {
      auto sample = generate_sample(read.records[i].mol, opts.seed + i,
                                    opts.iterations);
      if (sample) {
        lines[i] = sample_to_json(*sample);
        produced[i] = 1;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  size_t emitted = 0;
  for (size_t i = 0; i < n; ++i) {
    if (produced[i]) {
      std::cout << lines[i] << "\n";
      ++emitted;
    } else {
      std::cerr << "no sample for input " << (i + 1) << " ("
                << read.records[i].smiles << ")\n";
    }
  }
  return emitted > 0 ? 0 : 1;
}

struct MmpExtractOpts {
  std::string in_path;
  int max_cuts = 2;
  std::string format = "tsv";
};

int run_mmp_extract(const MmpExtractOpts& opts) {
  std::vector<GroupedMol> mols;
  size_t skipped = 0;
  size_t lineno = 0;
  for (const std::string& line : read_lines(opts.in_path)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string smiles, id, group;
    in >> smiles >> id >> group;
    if (smiles.empty()) continue;
    if (group.empty()) group = "all";
    try {
      GroupedMol g;
      g.mol = parse_smiles(smiles);
      g.id = id;
      g.group = group;
      mols.push_back(std::move(g));
    } catch (const Error& e) {
      std::cerr << "line " << lineno << ": " << e.what() << "\n";
      ++skipped;
    }
  }
  if (mols.empty()) throw EmptyInput("no parseable molecules in input");

  auto pairs = pair_index(mols, opts.max_cuts);
  if (opts.format == "json") {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const MatchedPair& p : pairs) {
      nlohmann::ordered_json row;
      row["group"] = p.group;
      row["id_a"] = p.id_a;
      row["id_b"] = p.id_b;
      row["mol_a"] = p.mol_a;
      row["mol_b"] = p.mol_b;
      row["context"] = p.context;
      row["frag_a"] = p.frag_a;
      row["frag_b"] = p.frag_b;
      row["arity"] = p.arity;
      row["class"] = pair_class_name(p.cls);
      rows.push_back(std::move(row));
    }
    std::cout << rows.dump(2) << "\n";
  } else {
    for (const MatchedPair& p : pairs)
      std::cout << p.group << "\t" << p.id_a << "\t" << p.id_b << "\t" << p.mol_a
                << "\t" << p.mol_b << "\t" << p.context << "\t" << p.frag_a
                << "\t" << p.frag_b << "\t" << p.arity << "\t"
                << pair_class_name(p.cls) << "\n";
  }
  return skipped > 0 ? 1 : 0;
}

struct MmpClassifyOpts {
  std::string frag_a, frag_b, mol_a, mol_b;
};

int run_mmp_classify(const MmpClassifyOpts& opts) {
  PairClass cls = classify_pair(Fragment::parse(opts.frag_a),
                                Fragment::parse(opts.frag_b),
                                parse_smiles(opts.mol_a), parse_smiles(opts.mol_b));
  std::cout << pair_class_name(cls) << "\n";
  return 0;
}

struct RxnOpts {
  std::vector<std::string> reactions;
  std::string in_path;
  std::string format = "tsv";
};

int run_rxn_diff(const RxnOpts& opts) {
  std::vector<std::string> inputs = opts.reactions;
  if (!opts.in_path.empty())
    for (const std::string& line : read_lines(opts.in_path))
      if (!line.empty() && line[0] != '#') inputs.push_back(line);
  if (inputs.empty()) throw EmptyInput("no reactions given");

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const std::string& rxn : inputs) {
    std::string status, detail, context;
    try {
      std::string reason;
      auto diff = diff_mapped_reaction(rxn, &reason);
      if (diff) {
        status = "edit";
        detail = emit_reaction_smirks(diff->action);
        context = diff->context;
      } else {
        status = "rejected";
        detail = reason;
      }
    } catch (const Error& e) {
      status = "rejected";
      detail = e.what();
    }
    if (opts.format == "json") {
      nlohmann::ordered_json row;
      row["reaction"] = rxn;
      row["status"] = status;
      row["detail"] = detail;
      if (!context.empty()) row["context"] = context;
      rows.push_back(std::move(row));
    } else {
      std::cout << status << "\t" << detail;
      if (!context.empty()) std::cout << "\t" << context;
      std::cout << "\n";
    }
  }
  if (opts.format == "json") std::cout << rows.dump(2) << "\n";
  return 0;
}

struct FilterOptsCli {
  std::string in_path;
  FilterOptions options;
  std::string format = "tsv";
};

int run_filter(const FilterOptsCli& opts) {
  std::vector<std::string> lines = read_lines(opts.in_path);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  size_t lineno = 0;
  for (const std::string& line : lines) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string smiles, id;
    in >> smiles >> id;
    if (smiles.empty()) continue;
    if (id.empty()) id = std::to_string(lineno);

    std::string status, reason, kept;
    try {
      FilterReport report = filter_compound(parse_smiles(smiles), opts.options);
      status = report.passed ? "pass" : "fail";
      reason = report.reason;
      kept = report.kept_smiles;
    } catch (const Error& e) {
      status = "fail";
      reason = e.what();
    }
    if (opts.format == "json") {
      nlohmann::ordered_json row;
      row["id"] = id;
      row["input"] = smiles;
      row["status"] = status;
      row["reason"] = reason;
      row["kept"] = kept;
      rows.push_back(std::move(row));
    } else {
      std::cout << id << "\t" << status << "\t" << reason << "\t" << kept << "\n";
    }
  }
  if (opts.format == "json") std::cout << rows.dump(2) << "\n";
  return 0;
}

struct DeconOpts {
  std::string pairs_path;
  std::string train_path;
  double threshold = 0.6;
  int bits = 2048;
};

int run_decon(const DeconOpts& opts) {
  std::vector<Fingerprint> train;
  for (const std::string& line : read_lines(opts.train_path)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string smiles;
    in >> smiles;
    if (!smiles.empty()) train.push_back(ecfp(parse_smiles(smiles), 2, opts.bits));
  }

  std::vector<PairFingerprints> pairs;
  std::vector<std::string> pair_lines;
  for (const std::string& line : read_lines(opts.pairs_path)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string a, b;
    in >> a >> b;
    if (a.empty() || b.empty())
      throw Error("pair lines need two SMILES: " + line);
    PairFingerprints pf;
    pf.a = ecfp(parse_smiles(a), 2, opts.bits);
    pf.b = ecfp(parse_smiles(b), 2, opts.bits);
    pairs.push_back(std::move(pf));
    pair_lines.push_back(line);
  }
  if (pairs.empty()) throw EmptyInput("no pairs given");

  std::vector<uint8_t> keep = decontaminate(pairs, train, opts.threshold);
  for (size_t i = 0; i < pairs.size(); ++i) {
    double sim = std::max(max_similarity(pairs[i].a, train),
                          max_similarity(pairs[i].b, train));
    std::cout << (keep[i] ? "keep" : "drop") << "\t" << format_double(sim, 6)
              << "\t" << pair_lines[i] << "\n";
  }
  return 0;
}

struct FpOpts {
  std::string smiles_a, smiles_b;
  int bits = 2048;
};

int run_fp_sim(const FpOpts& opts) {
  double sim = tanimoto(ecfp(parse_smiles(opts.smiles_a), 2, opts.bits),
                        ecfp(parse_smiles(opts.smiles_b), 2, opts.bits));
  std::cout << format_double(sim, 9) << "\n";
  return 0;
}

struct EvalOpts {
  std::string in_path;
  std::string goal_oracle;
  std::string goal_direction = "increase";
  double goal_margin = 0.0;
  std::vector<std::string> oracle_cmds;  // name=command
  uint64_t seed = 0;
  std::string format = "json";
};

int run_eval(const EvalOpts& opts) {
  std::vector<EvalRecord> records;
  size_t lineno = 0;
  for (const std::string& line : read_lines(opts.in_path)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw JsonError("line " + std::to_string(lineno) + ": " + e.what());
    }
    EvalRecord rec;
    rec.id = j.value("id", "");
    rec.source = j.value("source", "");
    rec.predicted = j.value("predicted", "");
    if (j.contains("actions"))
      for (const auto& a : j["actions"]) rec.actions.push_back(a.get<std::string>());
    if (j.contains("ground_truths"))
      for (const auto& g : j["ground_truths"])
        rec.ground_truths.push_back(g.get<std::string>());
    records.push_back(std::move(rec));
  }

  OracleRegistry oracles = OracleRegistry::builtin();
  for (const std::string& spec : opts.oracle_cmds) {
    size_t eq = spec.find('=');
    if (eq == std::string::npos)
      throw Error("--oracle-cmd needs name=command: " + spec);
    oracles.add_external(spec.substr(0, eq), spec.substr(eq + 1));
  }

  std::optional<Goal> goal;
  if (!opts.goal_oracle.empty()) {
    Goal g;
    g.oracle = opts.goal_oracle;
    g.increase = opts.goal_direction != "decrease";
    g.margin = opts.goal_margin;
    goal = g;
  }

  Metrics m = evaluate(records, goal, oracles, opts.seed);
  if (opts.format == "table") {
    auto row = [](const std::string& name, const std::string& value,
                  const std::string& detail) {
      std::cout << std::left << std::setw(20) << name << std::right
                << std::setw(12) << value;
      if (!detail.empty()) std::cout << "  " << detail;
      std::cout << "\n";
    };
    row("records", std::to_string(m.n_records), "");
    row("validity", format_double(m.validity, 4),
        std::to_string(m.n_valid) + "/" + std::to_string(m.n_records));
    row("mean_similarity", format_double(m.mean_similarity, 4), "");
    row("success_rate", format_double(m.success_rate, 4),
        std::to_string(m.n_success) + "/" + std::to_string(m.n_records));
    row("consistency", format_double(m.consistency, 4),
        std::to_string(m.n_consistent) + "/" +
            std::to_string(m.n_consistency_eligible));
    row("execution_accuracy", format_double(m.execution_accuracy, 4),
        std::to_string(m.n_accurate) + "/" +
            std::to_string(m.n_accuracy_eligible));
    return 0;
  }
  nlohmann::ordered_json j;
  j["n_records"] = m.n_records;
  j["validity"] = m.validity;
  j["mean_similarity"] = m.mean_similarity;
  j["success_rate"] = m.success_rate;
  j["consistency"] = m.consistency;
  j["execution_accuracy"] = m.execution_accuracy;
  j["n_valid"] = m.n_valid;
  j["n_success"] = m.n_success;
  j["n_consistency_eligible"] = m.n_consistency_eligible;
  j["n_consistent"] = m.n_consistent;
  j["n_accuracy_eligible"] = m.n_accuracy_eligible;
  j["n_accurate"] = m.n_accurate;
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct EmitOpts {
  std::string source;
  std::string script_path;
};

int run_emit(const EmitOpts& opts, bool prompt) {
  Molecule source = parse_smiles(opts.source);
  EditScript script = script_from_json(read_file(opts.script_path));
  if (prompt)
    std::cout << render_prompt(numbered_smiles(source), script);
  else
    std::cout << emit_rdkit_snippet(source, script);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"moledit: deterministic molecular editing and dataset toolkit"};
  app.require_subcommand(1);

  CanonOpts canon_opts;
  auto* canon = app.add_subcommand("canon", "canonical SMILES");
  canon->add_option("smiles", canon_opts.inline_smiles, "input SMILES");
  canon->add_option("--in", canon_opts.in_path, "input .smi file");
  canon->add_flag("--kekulized", canon_opts.kekulized, "kekulized spelling");
  canon->add_option("--format", canon_opts.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));

  CanonOpts number_opts;
  number_opts.numbered = true;
  auto* number = app.add_subcommand("number", "canonical SMILES with atom numbers");
  number->add_option("smiles", number_opts.inline_smiles, "input SMILES");
  number->add_option("--in", number_opts.in_path, "input .smi file");
  number->add_option("--format", number_opts.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));

  auto* edit = app.add_subcommand("edit", "apply edits to a molecule");
  edit->require_subcommand(1);
  EditOpts apply_opts;
  auto* edit_apply = edit->add_subcommand("apply", "apply textual actions");
  edit_apply->add_option("--source", apply_opts.source, "source SMILES")->required();
  edit_apply->add_option("--action", apply_opts.actions, "edit instruction");
  edit_apply->add_option("--wrapper", apply_opts.wrapper_path,
                         "instruction-wrapper JSON file");
  edit_apply->add_option("--seed", apply_opts.seed, "site selection seed");
  edit_apply->add_option("--format", apply_opts.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));

  EditOpts exec_opts;
  auto* edit_exec = edit->add_subcommand("exec-json", "apply a JSON edit script");
  edit_exec->add_option("--source", exec_opts.source, "source SMILES")->required();
  edit_exec->add_option("--script", exec_opts.script_path, "script JSON file")
      ->required();
  edit_exec->add_option("--seed", exec_opts.seed, "site selection seed");
  edit_exec->add_option("--format", exec_opts.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));

  auto* gen = app.add_subcommand("gen", "generate datasets");
  gen->require_subcommand(1);
  GenOpts gen_opts;
  auto* gen_synth = gen->add_subcommand("synth", "synthetic edit samples as JSONL");
  gen_synth->add_option("--in", gen_opts.in_path, "input .smi file")->required();
  gen_synth->add_option("--seed", gen_opts.seed, "base seed");
  gen_synth->add_option("--iterations", gen_opts.iterations,
                        "edits per sample, 0 = uniform 1..3");
  gen_synth->add_option("--jobs", gen_opts.jobs, "worker threads");

  auto* mmp = app.add_subcommand("mmp", "matched molecular pairs");
  mmp->require_subcommand(1);
  MmpExtractOpts extract_opts;
  auto* mmp_extract = mmp->add_subcommand("extract", "pair extraction");
  mmp_extract->add_option("--in", extract_opts.in_path,
                          "lines: SMILES [id [group]]")->required();
  mmp_extract->add_option("--max-cuts", extract_opts.max_cuts, "1 or 2")
      ->check(CLI::Range(1, 2));
  mmp_extract->add_option("--format", extract_opts.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));

  MmpClassifyOpts classify_opts;
  auto* mmp_classify = mmp->add_subcommand("classify", "classify one pair");
  mmp_classify->add_option("frag_a", classify_opts.frag_a, "variable part A")
      ->required();
  mmp_classify->add_option("frag_b", classify_opts.frag_b, "variable part B")
      ->required();
  mmp_classify->add_option("mol_a", classify_opts.mol_a, "molecule A")->required();
  mmp_classify->add_option("mol_b", classify_opts.mol_b, "molecule B")->required();

  auto* rxn = app.add_subcommand("rxn", "reaction analysis");
  rxn->require_subcommand(1);
  RxnOpts rxn_opts;
  auto* rxn_diff = rxn->add_subcommand("diff", "edit extraction from mapped reactions");
  rxn_diff->add_option("reaction", rxn_opts.reactions, "mapped reaction SMILES");
  rxn_diff->add_option("--in", rxn_opts.in_path, "file with one reaction per line");
  rxn_diff->add_option("--format", rxn_opts.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));

  FilterOptsCli filter_opts;
  auto* filter = app.add_subcommand("filter", "compound filtering");
  filter->add_option("--in", filter_opts.in_path, "input .smi file")->required();
  filter->add_option("--min-mw", filter_opts.options.min_mw, "minimum weight");
  filter->add_option("--max-mw", filter_opts.options.max_mw, "maximum weight");
  filter->add_option("--max-chain", filter_opts.options.max_chain,
                     "longest acyclic chain");
  filter->add_option("--format", filter_opts.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));

  DeconOpts decon_opts;
  auto* decon = app.add_subcommand("decon", "drop pairs similar to a reference set");
  decon->add_option("--pairs", decon_opts.pairs_path,
                    "lines with two fragment SMILES")->required();
  decon->add_option("--train", decon_opts.train_path, "reference SMILES file")
      ->required();
  decon->add_option("--threshold", decon_opts.threshold, "drop at or above");
  decon->add_option("--bits", decon_opts.bits, "fingerprint width");

  auto* fp = app.add_subcommand("fp", "fingerprints");
  fp->require_subcommand(1);
  FpOpts fp_opts;
  auto* fp_sim = fp->add_subcommand("sim", "Tanimoto similarity of two molecules");
  fp_sim->add_option("a", fp_opts.smiles_a, "first SMILES")->required();
  fp_sim->add_option("b", fp_opts.smiles_b, "second SMILES")->required();
  fp_sim->add_option("--bits", fp_opts.bits, "fingerprint width");

  EvalOpts eval_opts;
  auto* eval = app.add_subcommand("eval", "score prediction records");
  eval->add_option("--in", eval_opts.in_path, "JSONL records")->required();
  eval->add_option("--goal-oracle", eval_opts.goal_oracle, "oracle name");
  eval->add_option("--goal-direction", eval_opts.goal_direction,
                   "increase or decrease")
      ->check(CLI::IsMember({"increase", "decrease"}));
  eval->add_option("--goal-margin", eval_opts.goal_margin, "required improvement");
  eval->add_option("--oracle-cmd", eval_opts.oracle_cmds,
                   "external oracle as name=command");
  eval->add_option("--seed", eval_opts.seed, "execution seed");
  eval->add_option("--format", eval_opts.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));

  auto* emit = app.add_subcommand("emit", "prompt and code generation");
  emit->require_subcommand(1);
  EmitOpts prompt_opts;
  auto* emit_prompt = emit->add_subcommand("prompt", "instruction prompt");
  emit_prompt->add_option("--source", prompt_opts.source, "source SMILES")
      ->required();
  emit_prompt->add_option("--script", prompt_opts.script_path, "script JSON file")
      ->required();
  EmitOpts code_opts;
  auto* emit_code = emit->add_subcommand("code", "executable edit snippet");
  emit_code->add_option("--source", code_opts.source, "source SMILES")->required();
  emit_code->add_option("--script", code_opts.script_path, "script JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (canon->parsed()) return run_canon(canon_opts);
    if (number->parsed()) return run_canon(number_opts);
    if (edit->parsed() && edit_apply->parsed()) return run_edit(apply_opts, false);
    if (edit->parsed() && edit_exec->parsed()) return run_edit(exec_opts, true);
    if (gen->parsed() && gen_synth->parsed()) return run_gen(gen_opts);
    if (mmp->parsed() && mmp_extract->parsed()) return run_mmp_extract(extract_opts);
    if (mmp->parsed() && mmp_classify->parsed()) return run_mmp_classify(classify_opts);
    if (rxn->parsed() && rxn_diff->parsed()) return run_rxn_diff(rxn_opts);
    if (filter->parsed()) return run_filter(filter_opts);
    if (decon->parsed()) return run_decon(decon_opts);
    if (fp->parsed() && fp_sim->parsed()) return run_fp_sim(fp_opts);
    if (eval->parsed()) return run_eval(eval_opts);
    if (emit->parsed() && emit_prompt->parsed()) return run_emit(prompt_opts, true);
    if (emit->parsed() && emit_code->parsed()) return run_emit(code_opts, false);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace moledit
