#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/editor.hpp"
#include "moledit/fprint.hpp"
#include "moledit/lineio.hpp"

using namespace moledit;

namespace {

// Straight-line rewrite of the documented hashing scheme, kept here so the
// library cannot drift without this file noticing: FNV-1a over little-endian
// bytes, atom invariants (element, degree, charge+16, total H, aromatic,
// ring, isotope, dummy), then per-shell hashes over sorted
// (bond order, neighbor id) pairs.
uint64_t ref_mix(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t ref_hash(const std::vector<uint64_t>& vals) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint64_t v : vals) h = ref_mix(h, v);
  return h;
}

Fingerprint ref_ecfp(const Molecule& mol, int radius = 2, int nbits = 2048) {
  Molecule m = mol.is_perceived ? mol : perceive(mol);
  size_t n = m.num_atoms();
  std::vector<uint64_t> ids(n);
  for (size_t i = 0; i < n; ++i) {
    const Atom& a = m.atoms[i];
    ids[i] = ref_hash({(uint64_t)a.atomic_num, (uint64_t)m.degree((int)i),
                       (uint64_t)(a.charge + 16), (uint64_t)m.total_h((int)i),
                       a.aromatic ? 1ull : 0ull, m.atom_in_ring[i] ? 1ull : 0ull,
                       (uint64_t)a.isotope,
                       a.atomic_num == kDummyAtom ? 1ull : 0ull});
  }
  std::set<uint64_t> features(ids.begin(), ids.end());
  for (int r = 1; r <= radius; ++r) {
    std::vector<uint64_t> next(n);
    for (size_t i = 0; i < n; ++i) {
      std::vector<std::pair<uint64_t, uint64_t>> env;
      for (auto [nbr, bi] : m.adj[i])
        env.push_back({(uint64_t)m.bonds[bi].order, ids[nbr]});
      std::sort(env.begin(), env.end());
      std::vector<uint64_t> seq{(uint64_t)r, ids[i]};
      for (auto& [b, v] : env) {
        seq.push_back(b);
        seq.push_back(v);
      }
      next[i] = ref_hash(seq);
      features.insert(next[i]);
    }
    ids = std::move(next);
  }
  Fingerprint fp;
  fp.nbits = nbits;
  fp.words.assign(nbits / 64, 0);
  for (uint64_t f : features) fp.set((int)(f & (nbits - 1)));
  return fp;
}

}  // namespace

TEST_CASE("fingerprints agree with the reference hasher bit for bit") {
  for (const char* smi :
       {"C", "CCO", "c1ccccc1", "CC(=O)Nc1ccc(O)cc1", "[13CH4]", "[NH4+]",
        "O=[N+]([O-])c1ccccc1", "C1CC1.c1ccncc1"}) {
    Molecule m = parse_smiles(smi);
    CHECK(ecfp(m).words == ref_ecfp(m).words);
    CHECK(ecfp(m, 3, 1024).words == ref_ecfp(m, 3, 1024).words);
  }
}

TEST_CASE("fingerprints see the graph, not the spelling") {
  Fingerprint aromatic = ecfp(parse_smiles("c1ccccc1"));
  Fingerprint kekulized = ecfp(parse_smiles("C1=CC=CC=C1"));
  CHECK(aromatic.words == kekulized.words);

  // Atom maps are invisible.
  CHECK(ecfp(Fragment::parse("[*:1]CC").mol()).words ==
        ecfp(Fragment::parse("[*:2]CC").mol()).words);
  CHECK(ecfp(parse_smiles("[CH3:5][OH:1]")).words ==
        ecfp(parse_smiles("CO")).words);

  // Attachment dummies are not plain atoms.
  CHECK(ecfp(Fragment::parse("[*]C").mol()).words != ecfp(parse_smiles("CC")).words);
}

TEST_CASE("random respellings never move a fingerprint") {
  for (const char* smi :
       {"CC(=O)Nc1ccc(O)cc1", "CN1CCC(CC1)c1ccccc1", "O=C(O)c1ccccc1O"}) {
    Molecule m = parse_smiles(smi);
    Fingerprint want = ecfp(m);
    for (uint64_t seed = 0; seed < 20; ++seed) {
      Molecule respelled = parse_smiles(write_random_smiles(m, seed));
      CHECK(ecfp(respelled).words == want.words);
    }
  }
}

TEST_CASE("disjoint unions take the bitwise or of their parts") {
  Fingerprint a = ecfp(parse_smiles("CCO"));
  Fingerprint b = ecfp(parse_smiles("c1ccccc1"));
  Fingerprint both = ecfp(parse_smiles("CCO.c1ccccc1"));
  REQUIRE(a.words.size() == both.words.size());
  for (size_t i = 0; i < both.words.size(); ++i)
    CHECK(both.words[i] == (a.words[i] | b.words[i]));
}

TEST_CASE("every molecule lights at least one bit per radius level") {
  Fingerprint methane = ecfp(parse_smiles("C"));
  CHECK(methane.popcount() == 3);  // one distinct environment per shell
  CHECK(ecfp(parse_smiles("c1ccccc1")).popcount() == 3);
  CHECK(ecfp(parse_smiles("Cc1ccccc1")).popcount() == 12);
}

TEST_CASE("tanimoto is a bounded symmetric similarity") {
  Fingerprint a = ecfp(parse_smiles("CC(=O)Nc1ccc(O)cc1"));
  Fingerprint b = ecfp(parse_smiles("CN1CCC(CC1)c1ccccc1"));
  double ab = tanimoto(a, b);
  CHECK(ab == tanimoto(b, a));
  CHECK(ab >= 0.0);
  CHECK(ab <= 1.0);
  CHECK(tanimoto(a, a) == 1.0);

  Fingerprint empty1, empty2;
  empty1.nbits = empty2.nbits = 2048;
  empty1.words.assign(32, 0);
  empty2.words.assign(32, 0);
  CHECK(tanimoto(empty1, empty2) == 1.0);
  CHECK(tanimoto(empty1, a) == 0.0);
}

TEST_CASE("width discipline") {
  Fingerprint narrow = ecfp(parse_smiles("CCO"), 2, 1024);
  Fingerprint wide = ecfp(parse_smiles("CCO"), 2, 2048);
  CHECK_THROWS_AS(tanimoto(narrow, wide), WidthMismatch);
  CHECK_THROWS_AS(ecfp(parse_smiles("CCO"), 2, 1000), WidthMismatch);
  CHECK_THROWS_AS(ecfp(parse_smiles("CCO"), 2, 0), WidthMismatch);
}

TEST_CASE("similarity regressions stay put") {
  Fingerprint benzene = ecfp(parse_smiles("c1ccccc1"));
  Fingerprint toluene = ecfp(parse_smiles("Cc1ccccc1"));
  Fingerprint phenol = ecfp(parse_smiles("Oc1ccccc1"));
  CHECK(tanimoto(benzene, toluene) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(tanimoto(toluene, phenol) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}
