#include "moledit/evalx.hpp"

#include <cstdio>
#include <optional>
#include <set>
#include <sstream>

#include "moledit/editor.hpp"
#include "moledit/errors.hpp"
#include "moledit/fprint.hpp"
#include "moledit/lineio.hpp"

namespace moledit {

OracleRegistry OracleRegistry::builtin() {
  OracleRegistry reg;
  reg.add("mol_weight", [](const Molecule& m) { return descriptors(m).mol_weight; });
  reg.add("heavy_atoms",
          [](const Molecule& m) { return double(descriptors(m).heavy_atoms); });
  reg.add("ring_count", [](const Molecule& m) { return double(descriptors(m).rings); });
  reg.add("hbd", [](const Molecule& m) { return double(descriptors(m).hbd); });
  reg.add("hba", [](const Molecule& m) { return double(descriptors(m).hba); });
  return reg;
}

void OracleRegistry::add(const std::string& name,
                         std::function<double(const Molecule&)> fn) {
  fns_[name] = std::move(fn);
}

void OracleRegistry::add_external(const std::string& name,
                                  const std::string& command) {
  fns_[name] = [command, name](const Molecule& m) {
    std::string quoted = "'";
    for (char c : canonical_smiles(m))
      quoted += c == '\'' ? std::string("'\\''") : std::string(1, c);
    quoted += "'";
    std::string cmd = command + " " + quoted;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw UnknownOracle("oracle '" + name + "' could not start");
    std::string text;
    char buf[256];
    while (fgets(buf, sizeof buf, pipe)) text += buf;
    int status = pclose(pipe);
    double value = 0.0;
    std::istringstream in(text);
    if (status != 0 || !(in >> value))
      throw UnknownOracle("oracle '" + name + "' produced no value");
    return value;
  };
}

double OracleRegistry::value(const std::string& name, const Molecule& mol) const {
  auto it = fns_.find(name);
  if (it == fns_.end()) throw UnknownOracle("no oracle named '" + name + "'");
  return it->second(mol);
}

namespace {

std::optional<Molecule> try_parse(const std::string& smiles) {
  if (smiles.empty()) return std::nullopt;
  try {
    return parse_smiles(smiles);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<EditScript> try_script(const std::vector<std::string>& actions) {
  if (actions.empty()) return std::nullopt;
  EditScript script;
  for (const std::string& text : actions) {
    try {
      script.actions.push_back(parse_action(normalize_action(text)));
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  return script;
}

}  // namespace

Metrics evaluate(const std::vector<EvalRecord>& records,
                 const std::optional<Goal>& goal, const OracleRegistry& oracles,
                 uint64_t seed) {
  if (records.empty()) throw EmptyInput("no records to evaluate");
  if (goal && !oracles.has(goal->oracle))
    throw UnknownOracle("no oracle named '" + goal->oracle + "'");

  Metrics m;
  m.n_records = records.size();
  double sim_sum = 0.0;
  size_t sim_n = 0;

  for (const EvalRecord& rec : records) {
    auto source = try_parse(rec.source);
    auto predicted = try_parse(rec.predicted);
    auto script = try_script(rec.actions);

    std::optional<EditOutcome> executed;
    if (source && script) {
      try {
        executed = apply_script(*source, *script, seed);
      } catch (const Error&) {
      }
    }

    if (predicted) {
      ++m.n_valid;
      if (source) {
        sim_sum += tanimoto(ecfp(*source), ecfp(*predicted));
        ++sim_n;
      }
    }

    if (goal && source && predicted) {
      double before = oracles.value(goal->oracle, *source);
      double after = oracles.value(goal->oracle, *predicted);
      double delta = goal->increase ? after - before : before - after;
      if (delta > goal->margin) ++m.n_success;
    }

    // Consistency: the stated actions must reproduce the stated prediction.
    // Only records without parseable actions leave the denominator.
    if (script) {
      ++m.n_consistency_eligible;
      if (predicted && executed) {
        std::string want = canonical_smiles(*predicted);
        for (const std::string& got : executed->product_smiles)
          if (got == want) {
            ++m.n_consistent;
            break;
          }
      }
    }

    if (!rec.ground_truths.empty()) {
      ++m.n_accuracy_eligible;
      std::set<std::string> targets;
      for (const std::string& gt : rec.ground_truths)
        if (auto gm = try_parse(gt)) targets.insert(canonical_smiles(*gm));
      std::vector<std::string> candidates;
      if (predicted)
        candidates.push_back(canonical_smiles(*predicted));
      else if (executed)
        candidates = executed->product_smiles;
      for (const std::string& c : candidates)
        if (targets.count(c)) {
          ++m.n_accurate;
          break;
        }
    }
  }

  auto pct = [](size_t num, size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / den;
  };
  m.validity = pct(m.n_valid, m.n_records);
  m.mean_similarity = sim_n == 0 ? 0.0 : sim_sum / sim_n;
  m.success_rate = goal ? pct(m.n_success, m.n_records) : 0.0;
  m.consistency = pct(m.n_consistent, m.n_consistency_eligible);
  m.execution_accuracy = pct(m.n_accurate, m.n_accuracy_eligible);
  return m;
}

}  // namespace moledit
