#pragma once

// Shared low-level SMILES/pattern tokenizer.  Molecule and fragment parsing
// live in lineio; the pattern compiler reuses the same raw pass with a wider
// primitive set.

#include <cstdint>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"

namespace moledit::detail {

enum class ParseMode {
  Molecule,  // plain SMILES
  Fragment,  // SMILES plus [X;!R] / [X;R] ring constraints
  Pattern,   // fragment set plus bare wildcards and '~' bonds
};

struct RawAtom {
  bool wildcard = false;   // '*'
  int16_t atomic_num = 0;
  int8_t aromatic = 0;     // from letter case
  bool bracket = false;
  int charge = 0;
  bool charge_seen = false;
  int isotope = 0;
  bool isotope_seen = false;
  int hcount = -1;         // bracket H count, -1 = none given
  int map = 0;
  int8_t ring_constraint = -1;  // -1 none, 0 requires acyclic, 1 requires ring
  size_t pos = 0;
};

struct RawBond {
  int a = -1;
  int b = -1;
  char sym = 0;  // 0 unspecified, else - = # : ~
  size_t pos = 0;
};

struct RawMol {
  std::vector<RawAtom> atoms;
  std::vector<RawBond> bonds;
  bool stereo_seen = false;
};

RawMol parse_raw(const std::string& text, ParseMode mode);

// Raw atoms/bonds to an unperceived molecule; pattern-only features throw.
// strict_bracket_h: a bracket atom with no H digit means zero hydrogens
// (molecule reading).  Fragments pass false so [N;!R] style atoms derive
// their hydrogens like bare atoms; an explicit digit still pins the count.
Molecule raw_to_molecule(const RawMol& raw, bool strict_bracket_h = true);

// Fragment-mode ring constraints per atom, aligned with raw.atoms.
std::vector<int8_t> ring_constraints(const RawMol& raw);

}  // namespace moledit::detail
