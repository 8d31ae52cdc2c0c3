#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/editor.hpp"

namespace moledit {

// Replacement vocabulary entry.  Arity-1 entries are substituents, arity-2
// entries are linkers; original and replacement are always drawn from the
// same arity class.
struct PoolEntry {
  std::string name;
  std::string smiles;
  int arity = 1;
  Fragment fragment;
};

// The built-in substituent and linker pools (25 + 20 entries), parsed once.
const std::vector<PoolEntry>& builtin_pools();

// One accepted generation step, for the sample record.
struct SynthEdit {
  std::string pattern_name;
  std::string pattern;
  std::vector<int> attachment_atoms;  // source numbering, may be empty
  std::vector<int> site;              // matched atoms in the executed product chain
  std::string replacement_name;
  std::string replacement;
};

struct SynthSample {
  std::string source;           // canonical
  std::string numbered_source;  // canonical with atom numbers
  std::vector<SynthEdit> edits;
  EditScript script;
  std::string target;           // canonical primary product of the script
  std::string prompt;
  std::string rdkit_snippet;
};

// Random walk over the pools: draw a pattern without replacement until one
// matches, pick a site, swap in a same-arity replacement, chain up to
// `iterations` times (0 draws uniformly from {1,2,3}).  The recorded target
// is the primary product of re-executing the recorded script, so samples are
// self-consistent by construction.  Returns nothing when no pool pattern
// matches the source.
std::optional<SynthSample> generate_sample(const Molecule& source, uint64_t seed,
                                           int iterations = 0);

// Instruction prompt for a numbered molecule plus edit script.
std::string render_prompt(const std::string& numbered_source,
                          const EditScript& script);

// One JSONL line with the full sample record.
std::string sample_to_json(const SynthSample& sample);

}  // namespace moledit
