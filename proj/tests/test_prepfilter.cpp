#include <doctest.h>

#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/fprint.hpp"
#include "moledit/lineio.hpp"
#include "moledit/prepfilter.hpp"

using namespace moledit;

namespace {

FilterReport run(const std::string& smi, FilterOptions opts = {}) {
  return filter_compound(parse_smiles(smi), opts);
}

Fingerprint bits(std::initializer_list<int> set_bits, int nbits = 2048) {
  Fingerprint fp;
  fp.nbits = nbits;
  fp.words.assign(nbits / 64, 0);
  for (int b : set_bits) fp.set(b);
  return fp;
}

}  // namespace

TEST_CASE("weight gates are inclusive on both ends") {
  // Isotope labels pin the weights exactly: [100C] weighs 100, [800C] 800.
  CHECK(run("[100C]").passed);
  CHECK(run("[800C]").passed);

  FilterReport low = run("[84C]=O");  // 84 + 15.999
  CHECK_FALSE(low.passed);
  CHECK(low.reason.find("weight") != std::string::npos);

  FilterReport high = run("[785C]=O");  // 785 + 15.999
  CHECK_FALSE(high.passed);
  CHECK(high.reason.find("weight") != std::string::npos);

  // Ordinary molecules on the light side fail too.
  CHECK_FALSE(run("CCO").passed);
}

TEST_CASE("chain gate counts the longest unbranched acyclic run") {
  // Hexyl chain on a ring passes; heptane's seven-carbon run fails.
  CHECK(run("CCCCCCc1ccccc1").passed);
  FilterReport heptane = run("CCCCCCC[100C]");  // weight padded over 100
  CHECK_FALSE(heptane.passed);
  CHECK(heptane.reason.find("chain") != std::string::npos);

  // Branching interrupts the run.
  CHECK(run("CCCCCC(C)C[100C]").passed);
  // Ring atoms do not extend a chain.
  CHECK(run("CCCCCCC1CC1[100C]").passed);
}

TEST_CASE("element gate admits the organic set plus Se and B") {
  CHECK(run("C[Se]c1ccccc1").passed);
  CHECK(run("OB(O)c1ccccc1").passed);
  CHECK(run("Cc1ccc(S(N)(=O)=O)cc1").passed);
  CHECK(run("FC(Cl)(Br)c1ccc(I)cc1").passed);
  CHECK(run("O=P(O)(O)Cc1ccccc1").passed);

  FilterReport silane = run("C[Si](C)(C)c1ccccc1");
  CHECK_FALSE(silane.passed);
  CHECK(silane.reason.find("Si") != std::string::npos);
}

TEST_CASE("salts are stripped to the largest fragment before the gates") {
  // Sodium acetate keeps the acetate, which then fails the weight gate.
  FilterReport acetate = run("CC(=O)[O-].[Na+]");
  CHECK_FALSE(acetate.passed);
  CHECK(acetate.kept_smiles == canonical_smiles(parse_smiles("CC(=O)[O-]")));
  CHECK(acetate.reason.find("weight") != std::string::npos);

  // A drug-sized cation sheds its chloride and passes.
  FilterReport salt = run("CN1CCC(CC1)c1ccc(Oc2ccccc2)cc1.[Cl-]");
  CHECK(salt.passed);
  CHECK(salt.kept_smiles ==
        canonical_smiles(parse_smiles("CN1CCC(CC1)c1ccc(Oc2ccccc2)cc1")));
  CHECK(salt.reason.empty());

  // The disallowed element gate applies to the kept fragment only.
  CHECK(run("c1ccc(-c2ccccc2)cc1C1CCCCC1.C[Si](C)C").passed);

  // Single-fragment inputs keep themselves.
  FilterReport plain = run("Cc1ccc(O)cc1");
  CHECK(plain.kept_smiles == canonical_smiles(parse_smiles("Cc1ccc(O)cc1")));
}

TEST_CASE("kept fragment is the heaviest by atom count") {
  FilterReport r = run("CCO.CCCCCCO.[Na+]");
  CHECK(r.kept_smiles == canonical_smiles(parse_smiles("CCCCCCO")));
}

TEST_CASE("custom bounds move the gates") {
  FilterOptions opts;
  opts.min_mw = 0.0;
  opts.max_mw = 10000.0;
  opts.max_chain = 3;
  CHECK(run("CCO", opts).passed);
  CHECK_FALSE(run("CCCC", opts).passed);
}

TEST_CASE("similarity screening drops pairs at the threshold") {
  // 9 shared of 15 total bits: exactly 0.6.
  Fingerprint ref = bits({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  Fingerprint at_limit = bits({0, 1, 2, 3, 4, 5, 6, 7, 8, 12, 13, 14});
  CHECK(tanimoto(ref, at_limit) == doctest::Approx(0.6).epsilon(1e-12));

  // 59 shared of 100 total bits: just under.
  std::vector<int> shared59, union100a, union100b;
  for (int i = 0; i < 59; ++i) shared59.push_back(i);
  union100a = shared59;
  union100b = shared59;
  for (int i = 59; i < 79; ++i) union100a.push_back(i);    // 20 private
  for (int i = 79; i < 100; ++i) union100b.push_back(i);   // 21 private
  Fingerprint just_under = bits({});
  for (int b : union100b) just_under.set(b);
  Fingerprint ref59 = bits({});
  for (int b : union100a) ref59.set(b);
  CHECK(tanimoto(ref59, just_under) == doctest::Approx(0.59).epsilon(1e-12));

  std::vector<PairFingerprints> pairs;
  pairs.push_back({ref, bits({100, 101})});        // identical left side
  pairs.push_back({at_limit, bits({100, 101})});   // exactly at threshold
  pairs.push_back({just_under, bits({100, 101})}); // below threshold
  pairs.push_back({bits({100, 101}), at_limit});   // threshold on the right side
  std::vector<uint8_t> keep = decontaminate(pairs, {ref, ref59});
  REQUIRE(keep.size() == 4);
  CHECK(keep[0] == 0);
  CHECK(keep[1] == 0);
  CHECK(keep[2] == 1);
  CHECK(keep[3] == 0);

  // Threshold 0 drops everything; a threshold above 1 keeps everything.
  CHECK(decontaminate(pairs, {ref}, 0.0) ==
        std::vector<uint8_t>{0, 0, 0, 0});
  CHECK(decontaminate(pairs, {ref}, 1.01) ==
        std::vector<uint8_t>{1, 1, 1, 1});
}

TEST_CASE("max_similarity scans the reference set") {
  Fingerprint probe = bits({1, 2, 3, 4});
  CHECK(max_similarity(probe, {}) == 0.0);
  std::vector<Fingerprint> refs{bits({1, 2, 3, 4}), bits({9})};
  CHECK(max_similarity(probe, refs) == 1.0);
  refs.erase(refs.begin());
  CHECK(max_similarity(probe, refs) == 0.0);
}
