#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "moledit/chemgraph.hpp"

namespace moledit {

struct SmilesDialect {
  bool kekulized_output = false;  // uppercase atoms, explicit double bonds
  bool include_maps = true;
};

// Parses one SMILES string into a perceived molecule.  Stereochemistry
// markers are accepted and dropped, with mol.stereo_stripped set.  Throws
// SyntaxError / ValenceError / KekulizationError.
Molecule parse_smiles(const std::string& text);

// Writes following input atom order.  parse(write(m)) is isomorphic to m.
std::string write_smiles(const Molecule& mol, const SmilesDialect& dialect = {});

// Writes a valid alternative spelling: random start atom, random branch
// order, random fragment order.  Used for normalization testing.
std::string write_random_smiles(const Molecule& mol, uint64_t seed);

// Copy of `mol` with map numbers 1..n assigned to heavy atoms in canonical
// output order.  Dummy atoms keep their maps.  Throws MapCollision when a
// non-dummy atom is already mapped.
Molecule number_atoms(const Molecule& mol);

// number_atoms rendered with every heavy atom bracketed, e.g. CCO becomes
// [CH3:1][CH2:2][OH:3].
std::string numbered_smiles(const Molecule& mol);

struct SmiRecord {
  std::string smiles;
  std::string id;
  size_t line = 0;
  Molecule mol;
};

struct SmiReadResult {
  std::vector<SmiRecord> records;
  size_t skipped = 0;
  std::vector<std::pair<size_t, std::string>> errors;  // (line, message)
};

// Reads SMILES-per-line records: `SMILES[<whitespace>id]`.  Blank lines and
// lines starting with '#' are ignored; records that fail to parse are
// counted and reported, never fatal.
SmiReadResult read_smi(std::istream& in);

}  // namespace moledit
