#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace moledit {

// Atomic number 0 is the attachment dummy '*'.
constexpr int kDummyAtom = 0;

struct ElementInfo {
  int atomic_num;
  const char* symbol;
  double mass;  // average atomic weight
};

// Returns 0 for unrecognized symbols ('*' maps to kDummyAtom via the parser,
// not through here).
int atomic_number(std::string_view symbol);

const char* element_symbol(int atomic_num);

double atomic_mass(int atomic_num);

// Allowed total valences for a neutral atom, smallest first.  Empty means the
// element carries no valence model and is never checked or given implicit H.
const std::vector<int>& default_valences(int atomic_num);

// Valences adjusted for formal charge (isoelectronic shift, e.g. N+ behaves
// like C, O- like F).  Empty when unmodelled.
std::vector<int> allowed_valences(int atomic_num, int charge);

// Elements that may be written bare in SMILES: B C N O P S F Cl Br I.
bool organic_subset(int atomic_num);

// Elements accepted as lowercase aromatic symbols: b c n o p s se as.
bool aromatic_capable(int atomic_num);

}  // namespace moledit
