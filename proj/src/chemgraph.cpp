#include "moledit/chemgraph.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

namespace moledit {

namespace {

// Bitset over bond indices, used for the ring-basis Gaussian elimination.
struct BondSet {
  std::vector<uint64_t> w;
  explicit BondSet(size_t nbits) : w((nbits + 63) / 64, 0) {}
  void set(int i) { w[i >> 6] |= uint64_t{1} << (i & 63); }
  bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  void operator^=(const BondSet& o) {
    for (size_t i = 0; i < w.size(); ++i) w[i] ^= o.w[i];
  }
  int lowest() const {
    for (size_t i = 0; i < w.size(); ++i)
      if (w[i]) return static_cast<int>(i * 64 + std::countr_zero(w[i]));
    return -1;
  }
  bool empty() const {
    for (uint64_t x : w)
      if (x) return false;
    return true;
  }
  int count() const {
    int c = 0;
    for (uint64_t x : w) c += std::popcount(x);
    return c;
  }
  bool operator<(const BondSet& o) const {
    // Fewer bonds first, then lowest-index participation.
    int ca = count(), cb = o.count();
    if (ca != cb) return ca < cb;
    for (size_t i = 0; i < w.size(); ++i)
      if (w[i] != o.w[i]) return w[i] < o.w[i];
    return false;
  }
};

void build_adjacency(Molecule& m) {
  m.adj.assign(m.num_atoms(), {});
  for (size_t bi = 0; bi < m.bonds.size(); ++bi) {
    const Bond& b = m.bonds[bi];
    if (b.a < 0 || b.b < 0 || b.a >= static_cast<int>(m.num_atoms()) ||
        b.b >= static_cast<int>(m.num_atoms()))
      throw Error("bond references a missing atom");
    if (b.a == b.b) throw Error("self bond");
    m.adj[b.a].push_back({b.b, static_cast<int>(bi)});
    m.adj[b.b].push_back({b.a, static_cast<int>(bi)});
  }
  for (auto& nbrs : m.adj)
    std::sort(nbrs.begin(), nbrs.end());
}

// Marks bonds that participate in some cycle (non-bridges) via an iterative
// DFS low-link pass.
void mark_ring_bonds(Molecule& m) {
  const int n = static_cast<int>(m.num_atoms());
  m.bond_in_ring.assign(m.num_bonds(), 0);
  m.atom_in_ring.assign(n, 0);

  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  struct Frame { int atom; int parent_bond; size_t next; };
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> stack{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < m.adj[f.atom].size()) {
        auto [nbr, bi] = m.adj[f.atom][f.next++];
        if (bi == f.parent_bond) continue;
        if (disc[nbr] < 0) {
          disc[nbr] = low[nbr] = timer++;
          stack.push_back({nbr, bi, 0});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nbr]);
          m.bond_in_ring[bi] = 1;  // back edge always closes a cycle
        }
      } else {
        int atom = f.atom, pb = f.parent_bond;
        stack.pop_back();
        if (!stack.empty()) {
          int parent = stack.back().atom;
          low[parent] = std::min(low[parent], low[atom]);
          if (low[atom] > disc[parent]) continue;  // bridge
          m.bond_in_ring[pb] = 1;
        }
      }
    }
  }
  for (size_t bi = 0; bi < m.bonds.size(); ++bi)
    if (m.bond_in_ring[bi])
      m.atom_in_ring[m.bonds[bi].a] = m.atom_in_ring[m.bonds[bi].b] = 1;
}

// Shortest cycle through `bond` using ring bonds only, as an atom walk.
std::vector<int> shortest_cycle_through(const Molecule& m, int bond) {
  const int n = static_cast<int>(m.num_atoms());
  int src = m.bonds[bond].a, dst = m.bonds[bond].b;
  std::vector<int> prev(n, -2);
  std::vector<int> queue{src};
  prev[src] = -1;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int at = queue[qi];
    if (at == dst) break;
    for (auto [nbr, bi] : m.adj[at]) {
      if (bi == bond || !m.bond_in_ring[bi] || prev[nbr] != -2) continue;
      prev[nbr] = at;
      queue.push_back(nbr);
    }
  }
  if (prev[dst] == -2) return {};
  std::vector<int> walk;
  for (int at = dst; at != -1; at = prev[at]) walk.push_back(at);
  return walk;  // cyclic: walk.back()=src closes to walk.front()=dst
}

// Greedy smallest-first independent cycle basis over GF(2).  Shortest cycles
// through each ring bond cover molecular graphs; DFS fundamental cycles are
// appended as a completeness fallback for pathological topologies.
void perceive_rings(Molecule& m) {
  m.rings.clear();
  const int nbonds = static_cast<int>(m.num_bonds());
  int ring_bond_count = 0;
  for (uint8_t f : m.bond_in_ring) ring_bond_count += f;
  if (ring_bond_count == 0) return;

  std::vector<std::pair<BondSet, std::vector<int>>> candidates;
  auto add_candidate = [&](std::vector<int> walk) {
    if (walk.empty()) return;
    BondSet bs(nbonds);
    for (size_t i = 0; i < walk.size(); ++i) {
      int a = walk[i], b = walk[(i + 1) % walk.size()];
      bs.set(m.bond_index_between(a, b));
    }
    candidates.push_back({std::move(bs), std::move(walk)});
  };
  for (int bi = 0; bi < nbonds; ++bi)
    if (m.bond_in_ring[bi]) add_candidate(shortest_cycle_through(m, bi));

  // Fundamental cycles: BFS tree, one cycle per non-tree ring bond.
  {
    const int n = static_cast<int>(m.num_atoms());
    std::vector<int> parent(n, -2), parent_bond(n, -1), depth(n, 0);
    std::vector<uint8_t> tree_bond(nbonds, 0);
    for (int root = 0; root < n; ++root) {
      if (parent[root] != -2) continue;
      parent[root] = -1;
      std::vector<int> queue{root};
      for (size_t qi = 0; qi < queue.size(); ++qi) {
        int at = queue[qi];
        for (auto [nbr, bi] : m.adj[at]) {
          if (parent[nbr] != -2) continue;
          parent[nbr] = at;
          parent_bond[nbr] = bi;
          depth[nbr] = depth[at] + 1;
          tree_bond[bi] = 1;
          queue.push_back(nbr);
        }
      }
    }
    for (int bi = 0; bi < nbonds; ++bi) {
      if (tree_bond[bi] || !m.bond_in_ring[bi]) continue;
      int u = m.bonds[bi].a, v = m.bonds[bi].b;
      std::vector<int> up, down;
      while (depth[u] > depth[v]) { up.push_back(u); u = parent[u]; }
      while (depth[v] > depth[u]) { down.push_back(v); v = parent[v]; }
      while (u != v) {
        up.push_back(u); u = parent[u];
        down.push_back(v); v = parent[v];
      }
      up.push_back(u);
      up.insert(up.end(), down.rbegin(), down.rend());
      add_candidate(std::move(up));
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<BondSet> basis;  // row-reduced
  for (auto& [bs, walk] : candidates) {
    BondSet reduced = bs;
    for (const BondSet& row : basis) {
      int pivot = row.lowest();
      if (pivot >= 0 && reduced.test(pivot)) reduced ^= row;
    }
    if (reduced.empty()) continue;
    basis.push_back(std::move(reduced));
    m.rings.push_back(std::move(walk));
  }
}

bool has_fixed_multiple_bond(const Molecule& m, int atom) {
  for (auto [nbr, bi] : m.adj[atom]) {
    BondOrder o = m.bonds[bi].order;
    if (o == BondOrder::Double || o == BondOrder::Triple) return true;
  }
  return false;
}

// Whether an aromatic atom must receive one double bond inside its aromatic
// system for the kekule assignment.
bool needs_kekule_double(const Molecule& m, int atom) {
  if (has_fixed_multiple_bond(m, atom)) return false;
  const Atom& a = m.atoms[atom];
  int sigma = m.degree(atom) + (a.explicit_h > 0 ? a.explicit_h : 0);
  switch (a.atomic_num) {
    case 6:
      return a.charge == 0;
    case 7:
    case 15:
    case 33:
      if (a.charge == 1) return sigma <= 3;
      if (a.charge == 0) return sigma == 2;
      return false;
    case 8:
    case 16:
    case 34:
      return a.charge == 1;
    default:
      return false;  // boron and exotics contribute no double
  }
}

// Perfect matching over atoms that require a kekule double, restricted to
// aromatic bonds.  Deterministic: lowest-index atom first, lowest neighbor
// first.
bool kekule_match(const Molecule& m, const std::vector<int>& want,
                  const std::vector<uint8_t>& is_arom_bond,
                  std::vector<int>& mate) {
  // want: list of atom indices needing a double, ascending.
  std::vector<uint8_t> in_want(m.num_atoms(), 0);
  for (int a : want) in_want[a] = 1;

  struct Choice { int atom; size_t next; int picked; };
  std::vector<Choice> stack;
  auto first_unmatched = [&](int from) {
    for (size_t i = from; i < want.size(); ++i)
      if (mate[want[i]] < 0) return static_cast<int>(i);
    return -1;
  };
  int start = first_unmatched(0);
  if (start < 0) return true;
  stack.push_back({want[start], 0, -1});
  while (!stack.empty()) {
    Choice& c = stack.back();
    if (c.picked >= 0) {  // undo previous attempt
      mate[c.atom] = mate[c.picked] = -1;
      c.picked = -1;
    }
    bool advanced = false;
    while (c.next < m.adj[c.atom].size()) {
      auto [nbr, bi] = m.adj[c.atom][c.next++];
      if (!is_arom_bond[bi] || !in_want[nbr] || mate[nbr] >= 0) continue;
      mate[c.atom] = nbr;
      mate[nbr] = c.atom;
      c.picked = nbr;
      int nxt = first_unmatched(0);
      if (nxt < 0) return true;
      stack.push_back({want[nxt], 0, -1});
      advanced = true;
      break;
    }
    if (!advanced) stack.pop_back();
  }
  return false;
}

void kekulize(Molecule& m) {
  const int nbonds = static_cast<int>(m.num_bonds());
  m.kekule.resize(nbonds);
  std::vector<uint8_t> is_arom_bond(nbonds, 0);
  for (int bi = 0; bi < nbonds; ++bi) {
    m.kekule[bi] = m.bonds[bi].order;
    if (m.bonds[bi].order != BondOrder::Aromatic) continue;
    const Bond& b = m.bonds[bi];
    if (!m.bond_in_ring[bi])
      throw KekulizationError("aromatic bond outside of a ring");
    if (!m.atoms[b.a].aromatic || !m.atoms[b.b].aromatic)
      throw KekulizationError("aromatic bond to a non-aromatic atom");
    is_arom_bond[bi] = 1;
  }
  std::vector<int> arom_deg(m.num_atoms(), 0);
  for (int bi = 0; bi < nbonds; ++bi) {
    if (!is_arom_bond[bi]) continue;
    ++arom_deg[m.bonds[bi].a];
    ++arom_deg[m.bonds[bi].b];
  }
  std::vector<int> want;
  for (size_t i = 0; i < m.num_atoms(); ++i) {
    if (!m.atoms[i].aromatic) continue;
    if (arom_deg[i] < 2)
      throw KekulizationError("aromatic atom not in an aromatic ring");
    if (needs_kekule_double(m, static_cast<int>(i))) want.push_back(static_cast<int>(i));
  }
  std::vector<int> mate(m.num_atoms(), -1);
  if (!kekule_match(m, want, is_arom_bond, mate))
    throw KekulizationError("aromatic system cannot be kekulized");
  for (int bi = 0; bi < nbonds; ++bi) {
    if (!is_arom_bond[bi]) continue;
    const Bond& b = m.bonds[bi];
    m.kekule[bi] =
        (mate[b.a] == b.b) ? BondOrder::Double : BondOrder::Single;
  }
}

void assign_implicit_h(Molecule& m) {
  m.implicit_h.assign(m.num_atoms(), 0);
  for (size_t i = 0; i < m.num_atoms(); ++i) {
    const Atom& a = m.atoms[i];
    if (a.atomic_num == kDummyAtom) continue;
    int sum = m.bond_valence(static_cast<int>(i));
    if (a.explicit_h >= 0) {
      auto allowed = allowed_valences(a.atomic_num, a.charge);
      if (!allowed.empty() && sum + a.explicit_h > allowed.back())
        throw ValenceError(std::string(element_symbol(a.atomic_num)) +
                           " with valence " + std::to_string(sum + a.explicit_h));
      continue;
    }
    auto allowed = allowed_valences(a.atomic_num, a.charge);
    if (allowed.empty()) continue;  // unmodelled: no implicit hydrogens
    int chosen = -1;
    for (int v : allowed)
      if (v >= sum) { chosen = v; break; }
    if (chosen < 0)
      throw ValenceError(std::string(element_symbol(a.atomic_num)) +
                         " with valence " + std::to_string(sum));
    m.implicit_h[i] = chosen - sum;
  }
}

// Electrons the atom donates to the ring π system, or -1 if it breaks
// conjugation.  `in_ring_set` marks atoms of the candidate ring.
int pi_contribution(const Molecule& m, int atom,
                    const std::vector<uint8_t>& in_ring_set) {
  const Atom& a = m.atoms[atom];
  bool double_in_ring = false, multiple_elsewhere = false;
  for (auto [nbr, bi] : m.adj[atom]) {
    BondOrder o = m.kekule[bi];
    if (o != BondOrder::Double && o != BondOrder::Triple) continue;
    // A double along any ring bond stays inside the fused π system; only
    // doubles to acyclic substituents are truly exocyclic.
    if (o == BondOrder::Double && (in_ring_set[nbr] || m.bond_in_ring[bi]))
      double_in_ring = true;
    else
      multiple_elsewhere = true;
  }
  if (double_in_ring) return 1;
  if (multiple_elsewhere) return 0;  // exocyclic double: sp2, donates nothing
  int connections = m.degree(atom) + m.total_h(atom);
  switch (a.atomic_num) {
    case 6:
      if (a.charge == -1) return 2;
      if (a.charge == 1) return 0;
      return -1;  // saturated carbon
    case 7:
    case 15:
      if (a.charge <= 0 && connections <= 3) return 2;
      if (a.charge == 1 && connections == 3) return 0;
      return -1;
    case 8:
      if (a.charge == 0) return 2;
      return -1;
    case 16:
    case 34:
      if (a.charge == 0 && connections == 2) return 2;
      if (a.charge == 1 && connections == 3) return 2;
      return -1;
    default:
      return -1;
  }
}

// Applies the 4n+2 rule to kekule-form rings of C/N/O/S and rewrites hits to
// aromatic form.  Input-aromatic atoms are left as declared.
void aromatize(Molecule& m) {
  std::vector<uint8_t> in_set(m.num_atoms(), 0);
  for (const auto& ring : m.rings) {
    bool candidate = true;
    for (int at : ring) {
      int z = m.atoms[at].atomic_num;
      if (z != 6 && z != 7 && z != 8 && z != 15 && z != 16 && z != 34) {
        candidate = false;
        break;
      }
    }
    if (!candidate) continue;
    bool already = true;
    for (int at : ring) already = already && m.atoms[at].aromatic;
    if (already) continue;

    for (int at : ring) in_set[at] = 1;
    int electrons = 0;
    for (int at : ring) {
      int c = pi_contribution(m, at, in_set);
      if (c < 0) { electrons = -1; break; }
      electrons += c;
    }
    if (electrons >= 2 && electrons % 4 == 2) {
      for (int at : ring) m.atoms[at].aromatic = true;
      for (size_t i = 0; i < ring.size(); ++i) {
        int bi = m.bond_index_between(ring[i], ring[(i + 1) % ring.size()]);
        m.bonds[bi].order = BondOrder::Aromatic;
      }
    }
    for (int at : ring) in_set[at] = 0;
  }
}

}  // namespace

int Molecule::bond_valence(int atom) const {
  int sum = 0;
  for (auto [nbr, bi] : adj[atom]) sum += bond_order_value(kekule[bi]);
  return sum;
}

const Bond* Molecule::bond_between(int a, int b) const {
  int bi = bond_index_between(a, b);
  return bi < 0 ? nullptr : &bonds[bi];
}

int Molecule::bond_index_between(int a, int b) const {
  for (auto [nbr, bi] : adj[a])
    if (nbr == b) return bi;
  return -1;
}

std::vector<std::vector<int>> Molecule::components() const {
  std::vector<std::vector<int>> comps;
  std::vector<uint8_t> seen(num_atoms(), 0);
  for (size_t root = 0; root < num_atoms(); ++root) {
    if (seen[root]) continue;
    std::vector<int> comp{static_cast<int>(root)};
    seen[root] = 1;
    for (size_t qi = 0; qi < comp.size(); ++qi)
      for (auto [nbr, bi] : adj[comp[qi]])
        if (!seen[nbr]) { seen[nbr] = 1; comp.push_back(nbr); }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

Molecule perceive(Molecule m) {
  // Duplicate bonds are structural errors regardless of order.
  build_adjacency(m);
  for (size_t i = 0; i < m.num_atoms(); ++i) {
    const auto& nbrs = m.adj[i];
    for (size_t k = 1; k < nbrs.size(); ++k)
      if (nbrs[k].first == nbrs[k - 1].first)
        throw Error("duplicate bond between atoms");
  }

  mark_ring_bonds(m);
  perceive_rings(m);

  // Unspecified bonds become aromatic only inside declared-aromatic rings.
  for (size_t bi = 0; bi < m.num_bonds(); ++bi) {
    Bond& b = m.bonds[bi];
    if (b.order != BondOrder::Unspecified) continue;
    b.order = (m.bond_in_ring[bi] && m.atoms[b.a].aromatic && m.atoms[b.b].aromatic)
                  ? BondOrder::Aromatic
                  : BondOrder::Single;
  }

  kekulize(m);
  assign_implicit_h(m);
  aromatize(m);
  m.is_perceived = true;
  return m;
}

Descriptors descriptors(const Molecule& m) {
  Descriptors d;
  for (size_t i = 0; i < m.num_atoms(); ++i) {
    const Atom& a = m.atoms[i];
    if (a.atomic_num == kDummyAtom) continue;
    ++d.heavy_atoms;
    d.mol_weight += a.isotope > 0 ? a.isotope : atomic_mass(a.atomic_num);
    d.mol_weight += m.total_h(static_cast<int>(i)) * atomic_mass(1);
    if (a.atomic_num == 7 || a.atomic_num == 8) {
      ++d.hba;
      if (m.total_h(static_cast<int>(i)) > 0) ++d.hbd;
    }
  }
  d.rings = static_cast<int>(m.rings.size());
  return d;
}

}  // namespace moledit
