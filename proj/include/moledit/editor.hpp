#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/patterns.hpp"

namespace moledit {

// A moiety with attachment dummies.  Dummies have degree one and carry
// distinct map numbers; the map labels pair original and replacement anchors.
class Fragment {
public:
  Fragment() = default;

  // Accepts SMILES plus [X;!R] / [X;R] ring constraints.  Unmapped dummies
  // receive the lowest unused labels in reading order.
  static Fragment parse(const std::string& text);

  static Fragment from_molecule(Molecule mol,
                                std::vector<int8_t> ring_constraints = {});

  const Molecule& mol() const { return mol_; }
  int arity() const { return static_cast<int>(dummies_.size()); }
  const std::vector<int>& dummy_atoms() const { return dummies_; }  // by map order
  std::vector<int> anchor_maps() const;                             // sorted
  int dummy_for_map(int map) const;                                 // -1 if absent
  const std::vector<int8_t>& ring_constraints() const { return ring_constraints_; }

  // Canonical SMILES with anchor maps preserved.
  std::string smiles() const;

  Pattern query() const;

  // Anchor-label permutations induced by fragment automorphisms, identity
  // first.  Each entry maps anchor label -> anchor label.
  std::vector<std::vector<std::pair<int, int>>> map_permutations() const;

private:
  Molecule mol_;
  std::vector<int> dummies_;
  std::vector<int8_t> ring_constraints_;
};

struct EditAction {
  Fragment original;
  std::vector<int> attachment_atoms;  // source numbering; empty = anywhere
  Fragment replacement;
};

struct EditScript {
  std::vector<EditAction> actions;
};

struct EditOutcome {
  std::vector<Molecule> products;            // sorted by canonical SMILES
  std::vector<std::string> product_smiles;   // canonical, aligned with products
  // Numbering of the source carried through the surgeries; atoms introduced
  // by replacements hold 0.  Aligned with products.
  std::vector<std::vector<int>> product_source_numbers;
  std::vector<std::vector<int>> applied_sites;  // per action, first branch
  std::vector<std::string> warnings;
};

// One closed embedding of a fragment: anchors cover every external bond of
// the matched core, so the core can be excised as a unit.
struct SiteMatch {
  std::vector<int> atoms;                    // fragment atom -> molecule atom
  std::vector<int> core;                     // matched non-dummy atoms, sorted
  std::vector<std::pair<int, int>> anchors;  // (anchor label, context atom)
};

std::vector<SiteMatch> find_sites(const Molecule& mol, const Fragment& frag);

// Grammar: replace <frag> [connected at <atom-list>] with <frag>
// Keywords are case-insensitive; the atom list tolerates "atom 5",
// "atom_number5", separators, and "and".  Throws ActionSyntaxError.
EditAction parse_action(const std::string& text);

// Textual repair of recoverable action defects: [*n] and [*n:] anchor
// spellings become [*:n]; aromatic nitrogen rings that fail kekulization
// gain the missing [nH].  Unfixable text is returned unchanged.
std::string normalize_action(const std::string& text);

// Applies actions in order.  Every automorphism-induced anchor assignment
// of each matched site contributes a product; later actions run on all
// surviving products.  `seed` resolves ambiguous site choices.
EditOutcome apply_script(const Molecule& source, const EditScript& script,
                         uint64_t seed);

std::string emit_reaction_smirks(const EditAction& action);
EditAction parse_reaction_smirks(const std::string& text);

// JSON forms: {"actions":[{"original":..,"attachment_atoms":[..],"replacement":..}]}
EditScript script_from_json(const std::string& json_text);
std::string script_to_json(const EditScript& script);

// Python snippet describing the script as RDKit ChemicalReaction steps.
// Text generation only; nothing is executed.
std::string emit_rdkit_snippet(const Molecule& source, const EditScript& script);

struct WrapperPayload {
  std::vector<std::string> action_texts;
  std::string final_target;
};

// Instruction-wrapper object with "Action Description" (string or list) and
// "Final Target Molecule".  Throws JsonError on malformed payloads.
WrapperPayload parse_wrapper_json(const std::string& json_text);

// Reassembles a core with one side fragment per anchor label.  Anchor bond
// orders must agree.  Used to verify cut round trips.
Molecule join_fragments(const Fragment& core, const std::vector<Fragment>& sides);

}  // namespace moledit
