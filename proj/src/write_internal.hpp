#pragma once

// Order-driven SMILES emission shared by the plain writer, the random
// speller, the numbering formatter, and canonicalization.

#include <cstdint>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"

namespace moledit::detail {

struct WriteOpts {
  bool kekulized = false;
  bool include_maps = true;
  bool number_brackets = false;  // bracket every non-dummy atom, with H count
};

// Writes the subgraph induced by `mask` (all atoms when null) as a
// dot-joined SMILES.  Traversal starts at the lowest-priority atom of each
// component and visits neighbors in ascending priority.  When non-null,
// emit_order receives atom indices in the order their tokens appear.
std::string write_ordered(const Molecule& m, const std::vector<int64_t>& priority,
                          const WriteOpts& opts, const std::vector<uint8_t>* mask,
                          std::vector<int>* emit_order);

}  // namespace moledit::detail
