#include <doctest.h>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/editor.hpp"
#include "moledit/lineio.hpp"
#include "moledit/synthgen.hpp"

using namespace moledit;

namespace {

// Reconstructs the actions spelled out in the prompt Replace-paragraphs.
std::vector<EditAction> actions_from_prompt(const std::string& prompt) {
  std::vector<EditAction> actions;
  std::istringstream in(prompt);
  std::string line, block;
  auto flush = [&]() {
    if (!block.empty()) actions.push_back(parse_action(block));
    block.clear();
  };
  while (std::getline(in, line)) {
    if (line.rfind("Replace the substructure", 0) == 0) {
      flush();
      block = line;
    } else if (!block.empty()) {
      if (line.empty()) flush();
      else block += " " + line;
    }
  }
  flush();
  return actions;
}

}  // namespace

TEST_CASE("builtin pools carry 25 substituents and 20 linkers") {
  const std::vector<PoolEntry>& pools = builtin_pools();
  REQUIRE(pools.size() == 45);

  int arity1 = 0, arity2 = 0;
  std::set<std::string> names;
  for (const PoolEntry& e : pools) {
    names.insert(e.name);
    CHECK_FALSE(e.name.empty());
    CHECK(e.fragment.arity() == e.arity);
    if (e.arity == 1) ++arity1;
    else if (e.arity == 2) ++arity2;
    // Entries parse independently and agree with the stored fragment.
    CHECK(Fragment::parse(e.smiles).smiles() == e.fragment.smiles());
  }
  CHECK(arity1 == 25);
  CHECK(arity2 == 20);
  CHECK(names.size() == pools.size());
}

TEST_CASE("generation is deterministic per seed and varies across seeds") {
  Molecule source = parse_smiles("Cc1ccc(F)cc1");
  auto a = generate_sample(source, 42);
  auto b = generate_sample(source, 42);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(sample_to_json(*a) == sample_to_json(*b));

  std::set<std::string> targets;
  for (uint64_t seed = 0; seed < 24; ++seed) {
    auto s = generate_sample(source, seed);
    if (s) targets.insert(s->target);
  }
  CHECK(targets.size() > 1);
}

TEST_CASE("samples re-execute to their recorded target") {
  const char* sources[] = {
      "Cc1ccc(F)cc1",      "CCOc1ccccc1",        "Cc1ccccc1N1CCCC1",
      "COc1ccc(Br)cc1",    "Cc1ccc(cc1)C(C)=O",  "OCc1ccncc1",
      "CN(C)c1ccccc1",     "Clc1ccc(CN2CCC2)cc1", "CC(C)c1ccc(O)cc1",
      "Fc1ccc(OCC2CC2)cc1", "Cc1cc(C)c(Cl)cc1",   "NC(=O)c1ccccc1",
      "CSc1ccccc1",        "Cc1nc2ccccc2s1",      "OC(=O)c1ccc(F)cc1",
      "CCN(CC)c1ccccn1",   "Brc1cccc(COC)c1",     "Cc1ccc(S(N)(=O)=O)cc1",
      "C1CCCCC1c1ccccc1",  "CC(=O)Nc1ccc(O)cc1",
  };
  int generated = 0;
  for (const char* src : sources) {
    Molecule mol = parse_smiles(src);
    for (uint64_t seed : {uint64_t{1}, uint64_t{7}}) {
      auto s = generate_sample(mol, seed);
      if (!s) continue;
      ++generated;
      CHECK(s->source == canonical_smiles(mol));
      CHECK(s->numbered_source == numbered_smiles(mol));
      // The script replayed from scratch lands on the recorded target.
      EditOutcome replay = apply_script(parse_smiles(s->source), s->script, 0);
      REQUIRE_FALSE(replay.product_smiles.empty());
      CHECK(replay.product_smiles[0] == s->target);
      // Target reparses to itself.
      CHECK(canonical_smiles(parse_smiles(s->target)) == s->target);
    }
  }
  CHECK(generated >= 30);
}

TEST_CASE("sources with no pool match yield nothing") {
  CHECK_FALSE(generate_sample(parse_smiles("c1ccccc1"), 0));
  CHECK_FALSE(generate_sample(parse_smiles("O"), 0));
}

TEST_CASE("iteration count bounds the edit chain") {
  Molecule source = parse_smiles("CCOc1ccc(CN2CCCC2)cc1");
  for (int iters : {1, 2, 3}) {
    for (uint64_t seed = 0; seed < 6; ++seed) {
      auto s = generate_sample(source, seed, iters);
      if (!s) continue;
      CHECK(s->edits.size() <= static_cast<size_t>(iters));
      CHECK(s->edits.size() == s->script.actions.size());
      CHECK_FALSE(s->edits.empty());
    }
  }
}

TEST_CASE("prompt spells the molecule, the edits, and the toolchain") {
  auto s = generate_sample(parse_smiles("Cc1ccc(F)cc1"), 42);
  REQUIRE(s);
  const std::string prefix = "You are given a molecule in SMILES format:\n\"";
  CHECK(s->prompt.rfind(prefix, 0) == 0);
  CHECK(s->prompt.find(s->numbered_source) != std::string::npos);
  CHECK(s->prompt.find("RDKit") != std::string::npos);

  size_t blocks = 0;
  for (size_t pos = s->prompt.find("Replace the substructure");
       pos != std::string::npos;
       pos = s->prompt.find("Replace the substructure", pos + 1))
    ++blocks;
  CHECK(blocks == s->edits.size());

  // The Replace-paragraphs parse back into the recorded script.
  std::vector<EditAction> parsed = actions_from_prompt(s->prompt);
  REQUIRE(parsed.size() == s->script.actions.size());
  for (size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].original.smiles() == s->script.actions[i].original.smiles());
    CHECK(parsed[i].replacement.smiles() ==
          s->script.actions[i].replacement.smiles());
    CHECK(parsed[i].attachment_atoms == s->script.actions[i].attachment_atoms);
  }
}

TEST_CASE("sample json carries every record field") {
  auto s = generate_sample(parse_smiles("CCOc1ccccc1"), 3);
  REQUIRE(s);
  std::string json = sample_to_json(*s);
  for (const char* key :
       {"\"source\"", "\"numbered_source\"", "\"edits\"", "\"pattern_name\"",
        "\"pattern\"", "\"attachment_atoms\"", "\"site\"", "\"replacement_name\"",
        "\"replacement\"", "\"script\"", "\"actions\"", "\"target\"", "\"prompt\"",
        "\"rdkit_snippet\""})
    CHECK(json.find(key) != std::string::npos);
  CHECK(json.find('\n') == std::string::npos);  // one JSONL line
  CHECK(json.find(s->target) != std::string::npos);
}

TEST_CASE("recorded attachment atoms stay within the source numbering") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto s = generate_sample(parse_smiles("CCOc1ccc(Br)cc1"), seed);
    if (!s) continue;
    int heavy = parse_smiles(s->source).num_atoms();
    for (const SynthEdit& e : s->edits)
      for (int a : e.attachment_atoms) {
        CHECK(a >= 1);
        CHECK(a <= heavy);
      }
  }
}

TEST_CASE("snippet in the sample matches the script emitter") {
  auto s = generate_sample(parse_smiles("COc1ccc(Br)cc1"), 5);
  REQUIRE(s);
  CHECK(s->rdkit_snippet == emit_rdkit_snippet(parse_smiles(s->source), s->script));
  CHECK(s->rdkit_snippet.find(s->source) != std::string::npos);
}
