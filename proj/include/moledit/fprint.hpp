#pragma once

#include <cstdint>
#include <vector>

#include "moledit/chemgraph.hpp"

namespace moledit {

struct Fingerprint {
  int nbits = 0;
  std::vector<uint64_t> words;

  bool test(int bit) const { return (words[bit >> 6] >> (bit & 63)) & 1; }
  void set(int bit) { words[bit >> 6] |= uint64_t{1} << (bit & 63); }
  int popcount() const;
};

// Circular environment fingerprint: per-atom invariants hashed outward over
// `radius` bond shells, folded onto nbits (power of two).  Atom map numbers
// are ignored so relabeled fragments compare equal.
Fingerprint ecfp(const Molecule& mol, int radius = 2, int nbits = 2048);

// Both fingerprints empty counts as identical.  Throws WidthMismatch when the
// widths differ.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace moledit
