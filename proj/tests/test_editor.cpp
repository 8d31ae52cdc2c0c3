#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/editor.hpp"
#include "moledit/lineio.hpp"

using namespace moledit;

namespace {

EditScript one_action(const std::string& text) {
  EditScript s;
  s.actions.push_back(parse_action(text));
  return s;
}

std::string apply_one(const std::string& mol, const std::string& action,
                      uint64_t seed = 0) {
  EditOutcome out = apply_script(parse_smiles(mol), one_action(action), seed);
  REQUIRE_FALSE(out.products.empty());
  return out.product_smiles[0];
}

}  // namespace

TEST_CASE("fragment parsing assigns anchors and arity") {
  Fragment methyl = Fragment::parse("[*:1]C");
  CHECK(methyl.arity() == 1);
  CHECK(methyl.anchor_maps() == std::vector<int>{1});

  Fragment link = Fragment::parse("[*:1]c1ccc([*:2])cc1");
  CHECK(link.arity() == 2);
  CHECK(link.anchor_maps() == std::vector<int>{1, 2});
  CHECK(link.dummy_for_map(2) >= 0);
  CHECK(link.dummy_for_map(3) == -1);

  // Unlabeled dummies pick up the lowest free labels in reading order.
  Fragment bare = Fragment::parse("[*]C[*]");
  CHECK(bare.anchor_maps() == std::vector<int>{1, 2});
}

TEST_CASE("fragment bracket atoms without H digits derive their hydrogens") {
  // [N;!R] in a linker must match secondary amines, so fragment mode cannot
  // read the bare bracket as zero hydrogens.
  Fragment amine = Fragment::parse("[*:1][N;!R][*:2]");
  Molecule dibenzylamine = parse_smiles("C(NCc1ccccc1)c1ccccc1");
  CHECK(find_sites(dibenzylamine, amine).size() == 1);

  // An explicit digit still pins the count.
  Fragment pinned = Fragment::parse("[*:1][NH0]([*:2])C");
  CHECK(find_sites(dibenzylamine, pinned).empty());
}

TEST_CASE("ring constraints written with ;R and ;!R are honored") {
  Fragment acyclic_n = Fragment::parse("[*:1][N;!R][*:2]");
  Molecule piperidine = parse_smiles("C1CCNCC1");
  CHECK(find_sites(piperidine, acyclic_n).empty());
}

TEST_CASE("find_sites keeps only closed embeddings") {
  // Methoxy on anisole: one closed site.
  CHECK(find_sites(parse_smiles("COc1ccccc1"), Fragment::parse("[*:1]OC")).size() == 1);

  // Aldehyde pattern cannot claim the carbonyl inside an ester: the ester
  // oxygen is an unmatched extra bond on the matched carbon.
  CHECK(find_sites(parse_smiles("CCOC(C)=O"), Fragment::parse("[*:1]C=O")).empty());

  // Neopentane: only the four methyls embed closed under [*:1]C.
  CHECK(find_sites(parse_smiles("CC(C)(C)C"), Fragment::parse("[*:1]C")).size() == 4);
}

TEST_CASE("map permutations follow fragment automorphisms, identity first") {
  std::vector<std::vector<std::pair<int, int>>> perms =
      Fragment::parse("[*:1]c1ccc([*:2])cc1").map_permutations();
  REQUIRE(perms.size() == 2);
  CHECK(perms[0] == std::vector<std::pair<int, int>>{{1, 1}, {2, 2}});
  CHECK(perms[1] == std::vector<std::pair<int, int>>{{1, 2}, {2, 1}});

  CHECK(Fragment::parse("[*:1]c1ccc([*:2])cn1").map_permutations().size() == 1);
  CHECK(Fragment::parse("[*:1]C").map_permutations().size() == 1);
}

TEST_CASE("terminal replacement rewrites toluene into phenol") {
  CHECK(apply_one("Cc1ccccc1", "replace [*:1]C connected at atom 1 with [*:1]O") ==
        canonical_smiles(parse_smiles("Oc1ccccc1")));
}

TEST_CASE("action text tolerates prose, quotes, and list spellings") {
  const std::string want = canonical_smiles(parse_smiles("Oc1ccccc1"));
  CHECK(apply_one("Cc1ccccc1",
                  "replace \"[*:1]C\" connected at atom 1 with \"[*:1]O\"") == want);
  CHECK(apply_one("Cc1ccccc1",
                  "Replace the substructure corresponding to [*:1]C connected at "
                  "atom_number1 with [*:1]O.") == want);

  EditAction linker = parse_action(
      "replace [*:1]c1ccc([*:2])cc1 connected at atom 2, atom 7 and atom 9 "
      "with [*:1]c1cnc([*:2])cc1");
  CHECK(linker.attachment_atoms == std::vector<int>{2, 7, 9});

  CHECK_THROWS_AS(parse_action("swap A for B"), ActionSyntaxError);
  CHECK_THROWS_AS(parse_action("replace with"), ActionSyntaxError);
}

TEST_CASE("normalize_action repairs anchor spellings and pyrrole hydrogens") {
  CHECK(normalize_action("replace [*1]C with [*2]O") ==
        "replace [*:1]C with [*:2]O");
  CHECK(normalize_action("replace [*1:]C with [*:1]O") ==
        "replace [*:1]C with [*:1]O");

  std::string fixed =
      normalize_action("replace [*:1]c1ccnc1 with [*:1]c1cncn1");
  CHECK(fixed.find("[nH]") != std::string::npos);
  EditAction act = parse_action(fixed);
  CHECK(act.original.arity() == 1);
  CHECK(act.replacement.arity() == 1);

  // Healthy text passes through untouched.
  std::string healthy = "replace [*:1]C with [*:1]O";
  CHECK(normalize_action(healthy) == healthy);
}

TEST_CASE("attachment atoms pin the site in a symmetric molecule") {
  // p-xylene numbered: the two methyls sit at distinct source numbers.
  Molecule xylene = parse_smiles("Cc1ccc(C)cc1");
  std::string numbered = numbered_smiles(xylene);
  CHECK(numbered.find("[CH3:1]") != std::string::npos);

  EditOutcome out = apply_script(
      xylene, one_action("replace [*:1]C connected at atom 1 with [*:1]O"), 0);
  CHECK(out.warnings.empty());
  CHECK(out.product_smiles[0] == canonical_smiles(parse_smiles("Cc1ccc(O)cc1")));

  // The attachment may also name the ring atom the dummy touches.
  EditOutcome via_ring = apply_script(
      xylene, one_action("replace [*:1]C connected at atom 2 with [*:1]O"), 0);
  CHECK(via_ring.product_smiles == out.product_smiles);
}

TEST_CASE("ambiguous sites resolve by seed with a warning") {
  Molecule m = parse_smiles("Cc1cccc(CC)c1");  // methyl and ethyl both match [*:1]C
  EditScript script = one_action("replace [*:1]C with [*:1]Br");

  EditOutcome a = apply_script(m, script, 1);
  EditOutcome b = apply_script(m, script, 1);
  CHECK(a.product_smiles == b.product_smiles);
  CHECK_FALSE(a.warnings.empty());

  std::set<std::string> seen;
  for (uint64_t seed = 0; seed < 32; ++seed)
    seen.insert(apply_script(m, script, seed).product_smiles[0]);
  CHECK(seen.size() > 1);
}

TEST_CASE("symmetric original with asymmetric replacement yields both products") {
  // Distinct para substituents land on distinguishable pyridine positions.
  Molecule m = parse_smiles("Cc1ccc(O)cc1");
  EditScript script =
      one_action("replace [*:1]c1ccc([*:2])cc1 with [*:1]c1ccc([*:2])cn1");
  EditOutcome out = apply_script(m, script, 0);
  REQUIRE(out.products.size() == 2);
  CHECK(out.product_smiles[0] != out.product_smiles[1]);
  CHECK(std::is_sorted(out.product_smiles.begin(), out.product_smiles.end()));

  std::set<std::string> got(out.product_smiles.begin(), out.product_smiles.end());
  std::set<std::string> want{canonical_smiles(parse_smiles("Cc1ccc(O)cn1")),
                             canonical_smiles(parse_smiles("Cc1ccc(O)nc1"))};
  CHECK(got == want);

  // A symmetric replacement collapses to a single product.
  EditOutcome sym = apply_script(
      m, one_action("replace [*:1]c1ccc([*:2])cc1 with [*:1]c1cc([*:2])cc(F)c1"),
      0);
  CHECK(sym.products.size() == 1);
}

TEST_CASE("source numbering flows through edits, new atoms read zero") {
  Molecule toluene = parse_smiles("Cc1ccccc1");
  EditOutcome out = apply_script(
      toluene, one_action("replace [*:1]C connected at atom 1 with [*:1]OC"), 0);
  REQUIRE(out.products.size() == 1);
  const Molecule& product = out.products[0];
  const std::vector<int>& nums = out.product_source_numbers[0];
  REQUIRE(nums.size() == product.num_atoms());

  int zeros = 0, kept = 0;
  for (size_t i = 0; i < nums.size(); ++i) {
    if (nums[i] == 0) ++zeros;
    else ++kept;
  }
  CHECK(zeros == 2);  // introduced O and C
  CHECK(kept == 6);   // ring carbons keep their numbers
  for (int n : nums) CHECK(n <= 7);
}

TEST_CASE("chained actions execute in order on surviving products") {
  EditScript script;
  script.actions.push_back(
      parse_action("replace [*:1]F connected at atom 8 with [*:1]O"));
  script.actions.push_back(
      parse_action("replace [*:1]C connected at atom 1 with [*:1]Cl"));
  EditOutcome out = apply_script(parse_smiles("Cc1ccc(F)cc1"), script, 0);
  REQUIRE(out.applied_sites.size() == 2);
  CHECK(out.product_smiles[0] == canonical_smiles(parse_smiles("Clc1ccc(O)cc1")));
}

TEST_CASE("missing fragments raise GroupNotFound") {
  CHECK_THROWS_AS(
      apply_script(parse_smiles("CCO"), one_action("replace [*:1]Br with [*:1]I"), 0),
      GroupNotFound);
}

TEST_CASE("grafts that break valence or aromaticity surface as errors") {
  // Doubly bonded anchor onto an aromatic carbon cannot kekulize.
  CHECK_THROWS_AS(apply_one("Cc1ccccc1", "replace [*:1]C with [*:1]=C"),
                  Error);
}

TEST_CASE("smirks serialization round trips actions") {
  EditAction act = parse_action(
      "replace [*:1]C(=O)O connected at atom 3 with [*:1]C(NC)=O");
  std::string smirks = emit_reaction_smirks(act);
  CHECK(smirks.find(">>") != std::string::npos);

  EditAction back = parse_reaction_smirks(smirks);
  CHECK(back.original.smiles() == act.original.smiles());
  CHECK(back.replacement.smiles() == act.replacement.smiles());
  // Attachment atoms are not representable in SMIRKS.
  CHECK(back.attachment_atoms.empty());

  CHECK(emit_reaction_smirks(parse_action("replace [*:1]Cl with [*:1]OC")) ==
        "[*:1]Cl>>[*:1]OC");
  CHECK_THROWS_AS(parse_reaction_smirks("no-arrow-here"), Error);
}

TEST_CASE("script json round trips byte for byte") {
  EditScript script;
  script.actions.push_back(
      parse_action("replace [*:1]C connected at atom 1 with [*:1]O"));
  script.actions.push_back(
      parse_action("replace [*:1]c1ccc([*:2])cc1 with [*:1]c1ccc([*:2])cn1"));
  std::string text = script_to_json(script);
  EditScript back = script_from_json(text);
  CHECK(script_to_json(back) == text);
  REQUIRE(back.actions.size() == 2);
  CHECK(back.actions[0].attachment_atoms == std::vector<int>{1});

  CHECK_THROWS_AS(script_from_json("{"), JsonError);
  CHECK_THROWS_AS(script_from_json("{\"actions\":[{}]}"), JsonError);
}

TEST_CASE("wrapper payloads accept string or list action descriptions") {
  WrapperPayload one = parse_wrapper_json(
      "{\"Action Description\": \"replace [*:1]C with [*:1]O\","
      " \"Final Target Molecule\": \"Oc1ccccc1\"}");
  CHECK(one.action_texts.size() == 1);
  CHECK(one.final_target == "Oc1ccccc1");

  WrapperPayload many = parse_wrapper_json(
      "{\"Action Description\": [\"replace [*:1]C with [*:1]O\","
      " \"replace [*:1]O with [*:1]N\"],"
      " \"Final Target Molecule\": \"Nc1ccccc1\"}");
  CHECK(many.action_texts.size() == 2);

  CHECK_THROWS_AS(parse_wrapper_json("[1,2]"), JsonError);
  CHECK_THROWS_AS(parse_wrapper_json("{\"Final Target Molecule\": 3}"), JsonError);
}

TEST_CASE("rdkit snippet names the reaction machinery it describes") {
  Molecule source = parse_smiles("Cc1ccccc1");
  EditScript script = one_action("replace [*:1]C connected at atom 1 with [*:1]O");
  std::string snippet = emit_rdkit_snippet(source, script);
  CHECK(snippet.find("ChemicalReaction") != std::string::npos);
  CHECK(snippet.find("RunReactants") != std::string::npos);
  CHECK(snippet.find("Cc1ccccc1") != std::string::npos);
  CHECK(snippet.find("[*:1]C>>[*:1]O") != std::string::npos);
  // Emission is deterministic.
  CHECK(emit_rdkit_snippet(source, script) == snippet);
}

TEST_CASE("join_fragments reassembles a core with its sides") {
  Fragment core = Fragment::parse("[*:1]c1ccc([*:2])cc1");
  Molecule joined = join_fragments(
      core, {Fragment::parse("[*:1]C"), Fragment::parse("[*:2]O")});
  CHECK(canonical_smiles(joined) == canonical_smiles(parse_smiles("Cc1ccc(O)cc1")));

  CHECK_THROWS_AS(join_fragments(core, {Fragment::parse("[*:1]C")}), ArityMismatch);
}

TEST_CASE("apply_script is deterministic for a fixed seed") {
  Molecule m = parse_smiles("CCc1ccc(CC)cc1");
  EditScript script = one_action("replace [*:1]CC with [*:1]C(C)C");
  EditOutcome a = apply_script(m, script, 99);
  EditOutcome b = apply_script(m, script, 99);
  CHECK(a.product_smiles == b.product_smiles);
  CHECK(a.applied_sites == b.applied_sites);
}
