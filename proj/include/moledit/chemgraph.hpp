#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "moledit/elements.hpp"
#include "moledit/errors.hpp"

namespace moledit {

enum class BondOrder : uint8_t {
  Unspecified = 0,  // parser placeholder, resolved by perceive()
  Single = 1,
  Double = 2,
  Triple = 3,
  Aromatic = 4,
};

// Numeric order contribution used for valence sums.  Aromatic bonds are
// resolved through the kekule assignment before summing, so they never reach
// this function.
inline int bond_order_value(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 1;
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    default: return 1;
  }
}

struct Atom {
  int16_t atomic_num = kDummyAtom;
  int8_t charge = 0;
  int16_t isotope = 0;    // 0 = unspecified
  int32_t map_num = 0;    // 0 = none
  int16_t explicit_h = -1;  // fixed by bracket notation; -1 = derive
  bool aromatic = false;
};

struct Bond {
  int a = -1;
  int b = -1;
  BondOrder order = BondOrder::Unspecified;

  int other(int atom) const { return atom == a ? b : a; }
};

// Connectivity plus everything perceive() derives from it.  Treat instances
// as immutable once perceived; edits construct a fresh graph and re-perceive.
class Molecule {
public:
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  // True when the input carried stereochemistry that was stripped.
  bool stereo_stripped = false;

  // Derived state, valid when perceived() is true.
  bool is_perceived = false;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, bond index)
  std::vector<int> implicit_h;                        // per atom
  std::vector<uint8_t> atom_in_ring;
  std::vector<uint8_t> bond_in_ring;
  std::vector<std::vector<int>> rings;   // ring basis, each a cyclic atom walk
  std::vector<BondOrder> kekule;         // per bond; aromatic resolved to 1/2

  int add_atom(const Atom& a) {
    atoms.push_back(a);
    return static_cast<int>(atoms.size()) - 1;
  }
  int add_bond(int a, int b, BondOrder order) {
    bonds.push_back(Bond{a, b, order});
    return static_cast<int>(bonds.size()) - 1;
  }

  size_t num_atoms() const { return atoms.size(); }
  size_t num_bonds() const { return bonds.size(); }

  int degree(int atom) const { return static_cast<int>(adj[atom].size()); }

  int total_h(int atom) const {
    const Atom& a = atoms[atom];
    return a.explicit_h >= 0 ? a.explicit_h : implicit_h[atom];
  }

  // Sum of bond orders at `atom` with aromatic bonds in kekule form.
  int bond_valence(int atom) const;

  const Bond* bond_between(int a, int b) const;
  int bond_index_between(int a, int b) const;

  std::vector<std::vector<int>> components() const;
};

// Resolves unspecified bonds, perceives rings, kekulizes aromatic input,
// applies the electron-counting rule to kekule rings, assigns implicit
// hydrogens, and checks valences.  Throws ValenceError / KekulizationError.
Molecule perceive(Molecule mol);

struct Descriptors {
  double mol_weight = 0.0;
  int heavy_atoms = 0;
  int rings = 0;
  int hbd = 0;
  int hba = 0;
};

// Heavy atoms exclude dummies; mol_weight includes hydrogens.  hbd counts
// N/O with at least one hydrogen, hba counts all N/O.
Descriptors descriptors(const Molecule& mol);

// Canonical aromatic-form SMILES.  Equal strings iff the molecules are
// isomorphic including charges, isotopes, and map numbers; stereochemistry
// is not represented.  Implemented in canonical.cpp.
std::string canonical_smiles(const Molecule& mol);

// Canonical atom order used by the writer: position in the emitted string.
// Dummies participate.  Exposed for atom numbering.
std::vector<int> canonical_order(const Molecule& mol);

}  // namespace moledit
