#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "moledit/chemgraph.hpp"
#include "moledit/lineio.hpp"
#include "moledit/patterns.hpp"

using namespace moledit;

namespace {

bool atom_ok(const QueryAtom& q, const Molecule& m, int at) {
  const Atom& a = m.atoms[at];
  if (q.wildcard) return a.atomic_num != 1;
  if (a.atomic_num != q.atomic_num) return false;
  if (q.aromatic >= 0 && a.aromatic != (q.aromatic == 1)) return false;
  if (q.hcount >= 0 && m.total_h(at) != q.hcount) return false;
  if (q.ring >= 0 && m.atom_in_ring[at] != (q.ring == 1)) return false;
  if (q.charge_set && a.charge != q.charge) return false;
  if (q.isotope_set && a.isotope != q.isotope) return false;
  return true;
}

bool bond_ok(BondExpr expr, BondOrder order) {
  switch (expr) {
    case BondExpr::Any: return true;
    case BondExpr::Single: return order == BondOrder::Single;
    case BondExpr::Double: return order == BondOrder::Double;
    case BondExpr::Triple: return order == BondOrder::Triple;
    case BondExpr::Aromatic: return order == BondOrder::Aromatic;
    case BondExpr::SingleOrAromatic:
      return order == BondOrder::Single || order == BondOrder::Aromatic;
  }
  return false;
}

// Exhaustive injective assignment enumeration, deduplicated the same way
// find_matches documents: by the set of atoms under non-wildcard queries.
size_t brute_count(const Molecule& m, const Pattern& p) {
  std::vector<int> assign(p.size(), -1);
  std::vector<uint8_t> used(m.num_atoms(), 0);
  std::set<std::vector<int>> keys;

  auto rec = [&](auto&& self, size_t qi) -> void {
    if (qi == p.size()) {
      std::vector<int> key;
      for (size_t i = 0; i < p.size(); ++i)
        if (!p.atoms[i].wildcard) key.push_back(assign[i]);
      std::sort(key.begin(), key.end());
      keys.insert(key);
      return;
    }
    for (size_t at = 0; at < m.num_atoms(); ++at) {
      if (used[at] || !atom_ok(p.atoms[qi], m, static_cast<int>(at))) continue;
      bool ok = true;
      for (auto [nbr, bi] : p.adj[qi]) {
        if (static_cast<size_t>(nbr) >= qi) continue;
        const Bond* b = m.bond_between(static_cast<int>(at), assign[nbr]);
        if (!b || !bond_ok(p.bonds[bi].expr, b->order)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      used[at] = 1;
      assign[qi] = static_cast<int>(at);
      self(self, qi + 1);
      used[at] = 0;
    }
  };
  rec(rec, 0);
  return keys.size();
}

}  // namespace

TEST_CASE("anchored methoxy pattern hits anisole exactly once") {
  Molecule anisole = parse_smiles("COc1ccccc1");
  Pattern p = parse_pattern("[*:1]OC");
  CHECK(find_matches(anisole, p).size() == 1);
}

TEST_CASE("wildcard-excluded dedup counts distinct heavy cores") {
  Molecule neopentane = parse_smiles("CC(C)(C)C");
  // [*:1]C embeds onto every C-C bond; the five carbons are five cores.
  CHECK(find_matches(neopentane, parse_pattern("[*:1]C")).size() == 5);

  Molecule toluene = parse_smiles("Cc1ccccc1");
  // All 12 automorphic ring embeddings collapse onto one atom set.
  CHECK(find_matches(toluene, parse_pattern("c1ccccc1")).size() == 1);
}

TEST_CASE("default bond between aromatic query atoms spans single too") {
  Molecule biphenyl = parse_smiles("c1ccc(cc1)-c1ccccc1");
  CHECK(find_matches(biphenyl, parse_pattern("cc")).size() == 13);
  CHECK(find_matches(biphenyl, parse_pattern("c-c")).size() == 1);
  CHECK(find_matches(biphenyl, parse_pattern("c:c")).size() == 12);
}

TEST_CASE("ring membership constraints filter candidate atoms") {
  Molecule m = parse_smiles("CNCc1ccccc1N1CCCC1");
  CHECK(find_matches(m, parse_pattern("[N;!R]")).size() == 1);
  CHECK(find_matches(m, parse_pattern("[N;R]")).size() == 1);
  CHECK(find_matches(m, parse_pattern("N")).size() == 2);
}

TEST_CASE("charge and hydrogen-count primitives match exactly") {
  Molecule nitro = parse_smiles("Cc1ccc(cc1)[N+](=O)[O-]");
  CHECK(find_matches(nitro, parse_pattern("[N+]")).size() == 1);
  CHECK(find_matches(nitro, parse_pattern("[O-]")).size() == 1);

  Molecule amines = parse_smiles("CN.CNC.CN(C)C");
  CHECK(find_matches(amines, parse_pattern("[NH2]")).size() == 1);
  CHECK(find_matches(amines, parse_pattern("[NH1]")).size() == 1);
  CHECK(find_matches(amines, parse_pattern("[NH0]")).size() == 1);
}

TEST_CASE("bond order expressions discriminate") {
  Molecule m = parse_smiles("CC=CC#CC");
  CHECK(find_matches(m, parse_pattern("C=C")).size() == 1);
  CHECK(find_matches(m, parse_pattern("C#C")).size() == 1);
  CHECK(find_matches(m, parse_pattern("C~C")).size() == 5);
}

TEST_CASE("unsupported query primitives are rejected loudly") {
  CHECK_THROWS_AS(parse_pattern("[C,N]"), UnsupportedPrimitive);
  CHECK_THROWS_AS(parse_pattern("[#6]"), UnsupportedPrimitive);
  CHECK_THROWS_AS(parse_pattern("[$(CO)]"), UnsupportedPrimitive);
  CHECK_THROWS_AS(parse_pattern("[X3]"), UnsupportedPrimitive);
  CHECK_THROWS_AS(parse_pattern("[!C]"), UnsupportedPrimitive);
}

TEST_CASE("no match comes back empty, never throws") {
  Molecule benzene = parse_smiles("c1ccccc1");
  CHECK(find_matches(benzene, parse_pattern("N")).empty());
  CHECK(find_matches(benzene, parse_pattern("C=O")).empty());
}

TEST_CASE("matcher agrees with exhaustive enumeration on small molecules") {
  const char* mols[] = {"CCO",
                        "CC(C)Cc1ccccc1",
                        "Cc1ccc(N)cc1",
                        "O=C(O)c1ccccc1",
                        "C1CCNCC1",
                        "CC(=O)NC",
                        "FC(F)(F)c1ccncc1"};
  const char* pats[] = {"C",      "CC",      "[*:1]C", "c1ccccc1", "N",
                        "[N;!R]", "[*:1]OC", "C=O",    "c",        "[CH3]"};
  for (const char* ms : mols) {
    Molecule m = parse_smiles(ms);
    for (const char* ps : pats) {
      Pattern p = parse_pattern(ps);
      CHECK_MESSAGE(find_matches(m, p).size() == brute_count(m, p),
                    ms << " vs " << ps);
    }
  }
}

TEST_CASE("fragment-derived queries fix hydrogen counts only where written") {
  // [NH] written in the fragment pins one hydrogen; plain N leaves it open.
  Molecule secondary = parse_smiles("CNC");
  Molecule tertiary = parse_smiles("CN(C)C");

  Pattern loose = parse_pattern("[*:1]N[*:2]");
  CHECK(find_matches(secondary, loose).size() == 1);
  // Wildcard assignments over the three methyls are automorphic repeats of
  // one nitrogen core, so they collapse to a single match.
  CHECK(find_matches(tertiary, loose).size() == 1);

  Pattern pinned_h = parse_pattern("[*:1][NH][*:2]");
  CHECK(find_matches(secondary, pinned_h).size() == 1);
  CHECK(find_matches(tertiary, pinned_h).empty());
}

TEST_CASE("match ordering is deterministic") {
  Molecule m = parse_smiles("CC(C)(C)C");
  Pattern p = parse_pattern("[*:1]C");
  std::vector<Match> first = find_matches(m, p);
  std::vector<Match> second = find_matches(m, p);
  REQUIRE(first.size() == second.size());
  for (size_t i = 0; i < first.size(); ++i)
    CHECK(first[i].atoms == second[i].atoms);
}
