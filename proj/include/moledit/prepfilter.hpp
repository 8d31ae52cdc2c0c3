#pragma once

#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/fprint.hpp"

namespace moledit {

struct FilterOptions {
  double min_mw = 100.0;   // inclusive
  double max_mw = 800.0;   // inclusive
  int max_chain = 6;       // longest acyclic unbranched run, inclusive
};

struct FilterReport {
  bool passed = false;
  std::string reason;        // empty when passed
  std::string kept_smiles;   // canonical largest fragment, salts stripped
  Molecule kept;
};

// Salt stripping plus molecular-weight, element-set, and chain-length gates.
FilterReport filter_compound(const Molecule& mol, const FilterOptions& opts = {});

struct PairFingerprints {
  Fingerprint a;
  Fingerprint b;
};

// Highest Tanimoto of `fp` against the reference set; 0 for an empty set.
double max_similarity(const Fingerprint& fp, const std::vector<Fingerprint>& refs);

// Keep mask over candidate pairs: a pair is dropped when either side reaches
// `threshold` similarity against any reference fingerprint.
std::vector<uint8_t> decontaminate(const std::vector<PairFingerprints>& pairs,
                                   const std::vector<Fingerprint>& refs,
                                   double threshold = 0.6);

}  // namespace moledit
