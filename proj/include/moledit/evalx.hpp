#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"

namespace moledit {

struct EvalRecord {
  std::string id;
  std::string source;
  std::string predicted;                   // empty = no prediction made
  std::vector<std::string> actions;        // textual edit instructions
  std::vector<std::string> ground_truths;  // acceptable targets
};

struct Goal {
  std::string oracle;
  bool increase = true;
  double margin = 0.0;  // required improvement beyond the source value
};

class OracleRegistry {
public:
  // mol_weight, heavy_atoms, ring_count, hbd, hba.
  static OracleRegistry builtin();

  void add(const std::string& name, std::function<double(const Molecule&)> fn);
  // Shell command invoked with the SMILES appended; must print one number.
  void add_external(const std::string& name, const std::string& command);

  bool has(const std::string& name) const { return fns_.count(name) != 0; }
  double value(const std::string& name, const Molecule& mol) const;

private:
  std::map<std::string, std::function<double(const Molecule&)>> fns_;
};

struct Metrics {
  size_t n_records = 0;
  size_t n_valid = 0;
  size_t n_success = 0;
  size_t n_consistency_eligible = 0;
  size_t n_consistent = 0;
  size_t n_accuracy_eligible = 0;
  size_t n_accurate = 0;

  double validity = 0.0;            // percent of records whose prediction parses
  double mean_similarity = 0.0;     // over records where source and prediction parse
  double success_rate = 0.0;        // percent of records meeting the goal
  double consistency = 0.0;         // percent of action-bearing records whose
                                    // execution reproduces the prediction
  double execution_accuracy = 0.0;  // percent of ground-truth records hit
};

// Scores a batch.  `seed` feeds script execution.  Throws EmptyInput on an
// empty batch and UnknownOracle when the goal names a missing oracle.
Metrics evaluate(const std::vector<EvalRecord>& records,
                 const std::optional<Goal>& goal, const OracleRegistry& oracles,
                 uint64_t seed);

}  // namespace moledit
