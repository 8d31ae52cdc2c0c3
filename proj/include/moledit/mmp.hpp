#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/editor.hpp"

namespace moledit {

// One decomposition along acyclic single bonds.  Pieces carry one dummy per
// severed bond; the dummy labels follow the sorted cut-bond order.
struct CutResult {
  std::vector<std::pair<int, int>> cut_bonds;  // (a, b) with a < b, sorted
  std::vector<Fragment> pieces;
  int middle = -1;  // two-cut decompositions: the piece bridging both cuts
};

// All decompositions with up to max_cuts severed bonds (1 or 2).  Only
// acyclic single bonds between non-dummy atoms are cut.
std::vector<CutResult> fragment_mol(const Molecule& mol, int max_cuts = 1);

// Ring systems plus linkers; substituents attached by single bonds are pruned
// iteratively, atoms attached by multiple bonds stay.  Empty for acyclic
// molecules.
std::string murcko_scaffold(const Molecule& mol);

enum class PairClass { Terminal, Core, Other };
const char* pair_class_name(PairClass cls);

// Classifies a fragment swap taking mol_a as the initial molecule.
// Terminal: one attachment and frag_a at most 30% of mol_a's heavy atoms.
// Core: two attachments, differing fragment scaffolds, both fragments ringed
// with at most five non-ring positions each (attachment points included),
// and frag_a under half of mol_a.  Everything else is Other.  Ratio
// numerators count heavy atoms only, attachment dummies excluded.
PairClass classify_pair(const Fragment& frag_a, const Fragment& frag_b,
                        const Molecule& mol_a, const Molecule& mol_b);

struct GroupedMol {
  Molecule mol;
  std::string group;
  std::string id;
};

struct MatchedPair {
  std::string group;
  std::string id_a, id_b;
  std::string mol_a, mol_b;    // canonical
  std::string context;         // shared part, dot-joined when disconnected
  std::string frag_a, frag_b;  // variable parts
  int arity = 1;
  PairClass cls = PairClass::Other;
};

// Pairs of molecules within a group that share a cut context and differ in
// the variable part.  max_cuts=2 includes the single-cut pairs.
std::vector<MatchedPair> pair_index(const std::vector<GroupedMol>& mols,
                                    int max_cuts = 2);

struct ReactionDiff {
  EditAction action;    // original and replacement with paired anchor labels
  std::string context;  // unchanged atoms with anchor dummies, canonical
};

// Extracts the single-site edit described by a mapped reaction SMILES
// "reactant>>product".  Identity reactions and changes that are not one
// connected region per side return nullopt and set reject_reason.  Throws
// ReactionParseError on unparseable input or duplicate maps, UnmappedAtoms
// when changed atoms have no mapped anchor.
std::optional<ReactionDiff> diff_mapped_reaction(
    const std::string& rxn, std::string* reject_reason = nullptr);

}  // namespace moledit
