#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"

namespace moledit {

// Substructure query language: element symbols with aromatic case, '*'
// wildcards, bracket H counts, charges, atom maps, R / !R ring membership
// joined with ';'.  Bonds: default single-or-aromatic, plus - = # : ~.
// Anything beyond that set raises UnsupportedPrimitive.

struct QueryAtom {
  bool wildcard = false;
  int16_t atomic_num = 0;
  int8_t aromatic = -1;   // -1 any, 0 aliphatic, 1 aromatic
  int16_t hcount = -1;    // -1 any
  int8_t ring = -1;       // -1 any, 0 acyclic only, 1 ring only
  bool charge_set = false;
  int8_t charge = 0;
  bool isotope_set = false;
  int16_t isotope = 0;
  int32_t map = 0;
};

enum class BondExpr : uint8_t {
  Any,
  Single,
  Double,
  Triple,
  Aromatic,
  SingleOrAromatic,
};

struct QueryBond {
  int a = -1;
  int b = -1;
  BondExpr expr = BondExpr::SingleOrAromatic;
};

class Pattern {
public:
  std::vector<QueryAtom> atoms;
  std::vector<QueryBond> bonds;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, bond idx)

  void finalize();
  size_t size() const { return atoms.size(); }
  int degree(int atom) const { return static_cast<int>(adj[atom].size()); }
};

Pattern parse_pattern(const std::string& text);

// Query using a fragment molecule verbatim: exact element, aromaticity and
// charge, H count only where the fragment fixed it, dummies as wildcard
// anchors, bond orders exact.  `ring_constraint` entries follow the fragment
// atom order (-1 none, 0 acyclic, 1 ring).
Pattern pattern_from_molecule(const Molecule& frag,
                              const std::vector<int8_t>& ring_constraint);

struct Match {
  std::vector<int> atoms;  // query index -> molecule atom index
};

// All embeddings of `pattern` in `mol`, deduplicated by the set of atoms
// matched to non-wildcard query atoms, ordered lexicographically.  Extra
// molecule bonds at matched atoms are allowed (substructure semantics).
std::vector<Match> find_matches(const Molecule& mol, const Pattern& pattern);

}  // namespace moledit
