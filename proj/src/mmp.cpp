#include "moledit/mmp.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "moledit/errors.hpp"
#include "moledit/lineio.hpp"

namespace moledit {

namespace {

// Piece of a molecule after severing cut bonds: component atoms plus one
// labeled dummy per severed bond endpoint inside the component.
Fragment build_piece(const Molecule& m, const std::vector<int>& comp,
                     const std::vector<std::pair<int, int>>& cuts) {
  std::vector<int> to_new(m.num_atoms(), -1);
  Molecule out;
  for (int at : comp) {
    Atom a = m.atoms[at];
    a.map_num = 0;
    to_new[at] = out.add_atom(a);
  }
  std::set<std::pair<int, int>> cut_set(cuts.begin(), cuts.end());
  for (const Bond& b : m.bonds) {
    auto key = std::minmax(b.a, b.b);
    if (cut_set.count({key.first, key.second})) continue;
    if (to_new[b.a] >= 0 && to_new[b.b] >= 0)
      out.add_bond(to_new[b.a], to_new[b.b], b.order);
  }
  for (size_t ci = 0; ci < cuts.size(); ++ci) {
    for (int end : {cuts[ci].first, cuts[ci].second}) {
      if (to_new[end] < 0) continue;
      Atom dummy;
      dummy.atomic_num = kDummyAtom;
      dummy.explicit_h = 0;
      dummy.map_num = static_cast<int>(ci) + 1;
      int d = out.add_atom(dummy);
      out.add_bond(d, to_new[end], BondOrder::Single);
    }
  }
  return Fragment::from_molecule(perceive(std::move(out)));
}

std::vector<CutResult> decompose(const Molecule& m,
                                 const std::vector<std::vector<std::pair<int, int>>>&
                                     cut_sets) {
  std::vector<CutResult> out;
  for (const auto& cuts : cut_sets) {
    // Components with the cut bonds removed.
    std::vector<int> comp_of(m.num_atoms(), -1);
    std::set<std::pair<int, int>> cut_set(cuts.begin(), cuts.end());
    int n_comp = 0;
    for (size_t s = 0; s < m.num_atoms(); ++s) {
      if (comp_of[s] >= 0) continue;
      std::vector<int> stack{static_cast<int>(s)};
      comp_of[s] = n_comp;
      while (!stack.empty()) {
        int at = stack.back();
        stack.pop_back();
        for (auto [nbr, bi] : m.adj[at]) {
          (void)bi;
          auto key = std::minmax(at, nbr);
          if (cut_set.count({key.first, key.second})) continue;
          if (comp_of[nbr] < 0) {
            comp_of[nbr] = n_comp;
            stack.push_back(nbr);
          }
        }
      }
      ++n_comp;
    }
    if (n_comp != static_cast<int>(cuts.size()) + 1) continue;  // not all bridges

    std::vector<std::vector<int>> comps(n_comp);
    for (size_t i = 0; i < m.num_atoms(); ++i)
      comps[comp_of[i]].push_back(static_cast<int>(i));

    CutResult res;
    res.cut_bonds = cuts;
    std::vector<int> cuts_touched(n_comp, 0);
    for (const auto& [a, b] : cuts) {
      if (comp_of[a] != comp_of[b]) {
        ++cuts_touched[comp_of[a]];
        ++cuts_touched[comp_of[b]];
      }
    }
    for (int c = 0; c < n_comp; ++c) {
      res.pieces.push_back(build_piece(m, comps[c], cuts));
      if (cuts.size() == 2 && cuts_touched[c] == 2) res.middle = static_cast<int>(res.pieces.size()) - 1;
    }
    if (cuts.size() == 2 && res.middle < 0) continue;  // both cuts must share a bridge piece
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace

std::vector<CutResult> fragment_mol(const Molecule& mol, int max_cuts) {
  if (max_cuts < 1 || max_cuts > 2)
    throw Error("max_cuts must be 1 or 2");
  Molecule m = mol.is_perceived ? mol : perceive(mol);

  std::vector<std::pair<int, int>> candidates;
  for (size_t bi = 0; bi < m.bonds.size(); ++bi) {
    const Bond& b = m.bonds[bi];
    if (b.order != BondOrder::Single || m.bond_in_ring[bi]) continue;
    if (m.atoms[b.a].atomic_num == kDummyAtom ||
        m.atoms[b.b].atomic_num == kDummyAtom)
      continue;
    auto key = std::minmax(b.a, b.b);
    candidates.push_back({key.first, key.second});
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<std::vector<std::pair<int, int>>> cut_sets;
  for (const auto& c : candidates) cut_sets.push_back({c});
  if (max_cuts == 2)
    for (size_t i = 0; i < candidates.size(); ++i)
      for (size_t j = i + 1; j < candidates.size(); ++j)
        cut_sets.push_back({candidates[i], candidates[j]});

  return decompose(m, cut_sets);
}

std::string murcko_scaffold(const Molecule& mol) {
  Molecule m = mol.is_perceived ? mol : perceive(mol);
  std::vector<uint8_t> alive(m.num_atoms(), 1);

  auto alive_degree = [&](int at) {
    int d = 0;
    for (auto [nbr, bi] : m.adj[at]) {
      (void)bi;
      if (alive[nbr]) ++d;
    }
    return d;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < m.num_atoms(); ++i) {
      if (!alive[i]) continue;
      int deg = alive_degree(static_cast<int>(i));
      if (deg > 1) continue;
      if (deg == 1) {
        int bi = -1;
        for (auto [nbr, b] : m.adj[i])
          if (alive[nbr]) bi = b;
        // Atoms held by a multiple bond stay with the scaffold.
        if (m.bonds[bi].order != BondOrder::Single) continue;
        // A pyrrole-type nitrogen losing its substituent regains the
        // hydrogen that carries its lone pair.
        int nbr = m.bonds[bi].other(static_cast<int>(i));
        Atom& na = m.atoms[nbr];
        if (na.aromatic && (na.atomic_num == 7 || na.atomic_num == 15) &&
            na.explicit_h <= 0 && alive_degree(nbr) == 3)
          na.explicit_h = 1;
      }
      alive[i] = 0;
      changed = true;
    }
  }

  std::vector<int> kept;
  for (size_t i = 0; i < m.num_atoms(); ++i)
    if (alive[i]) kept.push_back(static_cast<int>(i));
  if (kept.empty()) return "";

  std::vector<int> to_new(m.num_atoms(), -1);
  Molecule out;
  for (int at : kept) {
    Atom a = m.atoms[at];
    a.map_num = 0;
    to_new[at] = out.add_atom(a);
  }
  for (const Bond& b : m.bonds)
    if (to_new[b.a] >= 0 && to_new[b.b] >= 0)
      out.add_bond(to_new[b.a], to_new[b.b], b.order);
  return canonical_smiles(perceive(std::move(out)));
}

const char* pair_class_name(PairClass cls) {
  switch (cls) {
    case PairClass::Terminal: return "terminal";
    case PairClass::Core: return "core";
    default: return "other";
  }
}

namespace {

int fragment_heavy(const Fragment& f) {
  int n = 0;
  for (const Atom& a : f.mol().atoms)
    if (a.atomic_num > 1) ++n;
  return n;
}

int molecule_heavy(const Molecule& m) {
  int n = 0;
  for (const Atom& a : m.atoms)
    if (a.atomic_num > 1) ++n;
  return n;
}

bool has_ring_atom(const Fragment& f) {
  for (size_t i = 0; i < f.mol().num_atoms(); ++i)
    if (f.mol().atom_in_ring[i]) return true;
  return false;
}

// Non-ring positions of the variable part; attachment dummies count as
// positions.
int non_ring_positions(const Fragment& f) {
  int n = 0;
  for (size_t i = 0; i < f.mol().num_atoms(); ++i)
    if (!f.mol().atom_in_ring[i]) ++n;
  return n;
}

}  // namespace

PairClass classify_pair(const Fragment& frag_a, const Fragment& frag_b,
                        const Molecule& mol_a, const Molecule& mol_b) {
  if (frag_a.arity() != frag_b.arity())
    throw ArityMismatch("paired fragments disagree on attachment count");
  (void)mol_b;  // classification is directional: mol_a is the initial molecule

  // Ratio numerators exclude the attachment dummies; only the non-ring
  // position bound counts them.
  double ra = static_cast<double>(fragment_heavy(frag_a)) / molecule_heavy(mol_a);

  if (frag_a.arity() == 1)
    return ra <= 0.30 ? PairClass::Terminal : PairClass::Other;

  if (frag_a.arity() >= 2) {
    if (murcko_scaffold(frag_a.mol()) == murcko_scaffold(frag_b.mol()))
      return PairClass::Other;
    if (!has_ring_atom(frag_a) || !has_ring_atom(frag_b)) return PairClass::Other;
    if (non_ring_positions(frag_a) > 5 || non_ring_positions(frag_b) > 5)
      return PairClass::Other;
    if (ra >= 0.50) return PairClass::Other;
    return PairClass::Core;
  }
  return PairClass::Other;
}

namespace {

Fragment relabel_fragment(const Fragment& f, const std::map<int, int>& remap) {
  Molecule m = f.mol();
  for (Atom& a : m.atoms)
    if (a.atomic_num == kDummyAtom) a.map_num = remap.at(a.map_num);
  return Fragment::from_molecule(std::move(m), f.ring_constraints());
}

struct CutEntry {
  std::string context;  // canonical, dot-joined for two-piece contexts
  std::string var;      // canonical variable part
  int arity = 1;
  Fragment var_frag;
};

// Orientation entries of one decomposition: each piece takes a turn as the
// variable part where that reading is well formed.
std::vector<CutEntry> cut_entries(const CutResult& cut) {
  std::vector<CutEntry> out;
  if (cut.cut_bonds.size() == 1) {
    for (int v = 0; v < 2; ++v) {
      CutEntry e;
      e.var_frag = cut.pieces[v];
      e.var = e.var_frag.smiles();
      e.context = cut.pieces[1 - v].smiles();
      e.arity = 1;
      out.push_back(std::move(e));
    }
    return out;
  }

  // Two cuts: the bridging piece varies, the outer pieces form the context.
  // The two cut labelings are interchangeable; normalize to the smaller
  // rendering.
  std::vector<int> sides;
  for (size_t i = 0; i < cut.pieces.size(); ++i)
    if (static_cast<int>(i) != cut.middle) sides.push_back(static_cast<int>(i));

  const std::map<int, int> keep{{1, 1}, {2, 2}};
  const std::map<int, int> swap{{1, 2}, {2, 1}};
  CutEntry best;
  bool have = false;
  for (const auto& remap : {keep, swap}) {
    CutEntry e;
    e.arity = 2;
    e.var_frag = relabel_fragment(cut.pieces[cut.middle], remap);
    e.var = e.var_frag.smiles();
    std::vector<std::string> ctx;
    for (int s : sides) ctx.push_back(relabel_fragment(cut.pieces[s], remap).smiles());
    std::sort(ctx.begin(), ctx.end());
    e.context = ctx[0] + "." + ctx[1];
    if (!have || std::tie(e.context, e.var) < std::tie(best.context, best.var)) {
      best = std::move(e);
      have = true;
    }
  }
  out.push_back(std::move(best));
  return out;
}

}  // namespace

std::vector<MatchedPair> pair_index(const std::vector<GroupedMol>& mols,
                                    int max_cuts) {
  struct MolEntry {
    size_t idx;
    std::string var;
    Fragment var_frag;
  };
  // (group, arity, context) -> entries
  std::map<std::tuple<std::string, int, std::string>, std::vector<MolEntry>> buckets;
  std::vector<std::string> canons(mols.size());

  for (size_t i = 0; i < mols.size(); ++i) {
    Molecule m = mols[i].mol.is_perceived ? mols[i].mol : perceive(mols[i].mol);
    canons[i] = canonical_smiles(m);
    std::set<std::pair<std::string, std::string>> seen;
    for (const CutResult& cut : fragment_mol(m, max_cuts)) {
      for (CutEntry& e : cut_entries(cut)) {
        if (!seen.insert({e.context, e.var}).second) continue;
        buckets[{mols[i].group, e.arity, e.context}].push_back(
            {i, e.var, std::move(e.var_frag)});
      }
    }
  }

  std::vector<MatchedPair> out;
  // Deduplicated by (group, context, mol_a, mol_b): one pair per shared core.
  std::set<std::tuple<std::string, std::string, std::string, std::string>> emitted;
  for (const auto& [key, entries] : buckets) {
    for (size_t x = 0; x < entries.size(); ++x) {
      for (size_t y = x + 1; y < entries.size(); ++y) {
        const MolEntry* ea = &entries[x];
        const MolEntry* eb = &entries[y];
        if (canons[ea->idx] == canons[eb->idx]) continue;  // same structure
        if (ea->var == eb->var) continue;                  // nothing varies
        if (std::tie(canons[eb->idx], eb->var) < std::tie(canons[ea->idx], ea->var))
          std::swap(ea, eb);
        if (!emitted.insert({std::get<0>(key), std::get<2>(key), canons[ea->idx],
                             canons[eb->idx]})
                 .second)
          continue;
        MatchedPair p;
        p.group = std::get<0>(key);
        p.arity = std::get<1>(key);
        p.context = std::get<2>(key);
        p.id_a = mols[ea->idx].id;
        p.id_b = mols[eb->idx].id;
        p.mol_a = canons[ea->idx];
        p.mol_b = canons[eb->idx];
        p.frag_a = ea->var;
        p.frag_b = eb->var;
        p.cls = classify_pair(ea->var_frag, eb->var_frag, mols[ea->idx].mol,
                              mols[eb->idx].mol);
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

// ----- mapped reaction diff ------------------------------------------------

namespace {

struct SidePick {
  Molecule mol;                 // the analyzed component(s)
  std::map<int, int> map_atom;  // map number -> atom index
};

std::map<int, int> collect_maps(const Molecule& m) {
  std::map<int, int> out;
  for (size_t i = 0; i < m.num_atoms(); ++i) {
    int map = m.atoms[i].map_num;
    if (map <= 0) continue;
    if (out.count(map))
      throw ReactionParseError("atom map " + std::to_string(map) +
                               " used twice on one side");
    out[map] = static_cast<int>(i);
  }
  return out;
}

Molecule extract_atoms(const Molecule& m, const std::vector<int>& atoms,
                       bool clear_maps) {
  std::vector<int> to_new(m.num_atoms(), -1);
  Molecule out;
  for (int at : atoms) {
    Atom a = m.atoms[at];
    if (clear_maps) a.map_num = 0;
    to_new[at] = out.add_atom(a);
  }
  for (const Bond& b : m.bonds)
    if (to_new[b.a] >= 0 && to_new[b.b] >= 0)
      out.add_bond(to_new[b.a], to_new[b.b], b.order);
  return out;
}

// Reactant component sharing the most maps with the product; salts and
// reagents without maps are ignored.
SidePick pick_reactant(const Molecule& m, const std::set<int>& product_maps) {
  auto comps = m.components();
  int best = -1, best_shared = -1;
  for (size_t c = 0; c < comps.size(); ++c) {
    int shared = 0;
    for (int at : comps[c])
      if (m.atoms[at].map_num > 0 && product_maps.count(m.atoms[at].map_num))
        ++shared;
    if (shared > best_shared) {
      best_shared = shared;
      best = static_cast<int>(c);
    }
  }
  if (best_shared <= 0)
    throw UnmappedAtoms("reactant side shares no atom maps with the product");
  SidePick pick;
  pick.mol = perceive(extract_atoms(m, comps[best], false));
  pick.map_atom = collect_maps(pick.mol);
  return pick;
}

bool connected_region(const Molecule& m, const std::vector<int>& atoms) {
  if (atoms.empty()) return true;
  std::set<int> in(atoms.begin(), atoms.end());
  std::set<int> seen{atoms[0]};
  std::vector<int> stack{atoms[0]};
  while (!stack.empty()) {
    int at = stack.back();
    stack.pop_back();
    for (auto [nbr, bi] : m.adj[at]) {
      (void)bi;
      if (in.count(nbr) && !seen.count(nbr)) {
        seen.insert(nbr);
        stack.push_back(nbr);
      }
    }
  }
  return seen.size() == in.size();
}

// Changed-region fragment: changed atoms plus one dummy per anchor bond,
// labeled by the anchor's position in `label_of`.
Fragment changed_fragment(const Molecule& m, const std::vector<int>& changed,
                          const std::map<int, int>& label_of,
                          const std::set<int>& core_atoms) {
  std::vector<int> to_new(m.num_atoms(), -1);
  Molecule out;
  for (int at : changed) {
    Atom a = m.atoms[at];
    a.map_num = 0;
    to_new[at] = out.add_atom(a);
  }
  for (const Bond& b : m.bonds)
    if (to_new[b.a] >= 0 && to_new[b.b] >= 0)
      out.add_bond(to_new[b.a], to_new[b.b], b.order);
  for (const Bond& b : m.bonds) {
    int changed_end = -1, core_end = -1;
    if (to_new[b.a] >= 0 && core_atoms.count(b.b)) { changed_end = b.a; core_end = b.b; }
    if (to_new[b.b] >= 0 && core_atoms.count(b.a)) { changed_end = b.b; core_end = b.a; }
    if (changed_end < 0) continue;
    Atom dummy;
    dummy.atomic_num = kDummyAtom;
    dummy.explicit_h = 0;
    dummy.map_num = label_of.at(m.atoms[core_end].map_num);
    int d = out.add_atom(dummy);
    out.add_bond(d, to_new[changed_end], b.order);
  }
  return Fragment::from_molecule(perceive(std::move(out)));
}

}  // namespace

std::optional<ReactionDiff> diff_mapped_reaction(const std::string& rxn,
                                                 std::string* reject_reason) {
  auto reject = [&](const std::string& why) -> std::optional<ReactionDiff> {
    if (reject_reason) *reject_reason = why;
    return std::nullopt;
  };

  size_t sep = rxn.find(">>");
  if (sep == std::string::npos || rxn.find(">>", sep + 2) != std::string::npos)
    throw ReactionParseError("expected exactly one '>>' in reaction SMILES");

  Molecule reactant_all, product;
  try {
    reactant_all = parse_smiles(rxn.substr(0, sep));
    product = parse_smiles(rxn.substr(sep + 2));
  } catch (const Error& e) {
    throw ReactionParseError(std::string("bad reaction side: ") + e.what());
  }

  auto product_maps = collect_maps(product);
  std::set<int> product_map_set;
  for (const auto& [map, at] : product_maps) product_map_set.insert(map);

  SidePick reactant = pick_reactant(reactant_all, product_map_set);

  // Core: maps present on both sides whose atom and bond environment agree.
  std::set<int> core;
  for (const auto& [map, at] : reactant.map_atom)
    if (product_maps.count(map)) core.insert(map);

  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (auto it = core.begin(); it != core.end();) {
      int map = *it;
      int ra = reactant.map_atom.at(map);
      int pa = product_maps.at(map);
      const Atom& x = reactant.mol.atoms[ra];
      const Atom& y = product.atoms[pa];
      bool same = x.atomic_num == y.atomic_num && x.charge == y.charge &&
                  x.isotope == y.isotope;
      if (same) {
        // Bonds into the current core must agree in partner and order.
        std::multiset<std::pair<int, int>> rn, pn;
        for (auto [nbr, bi] : reactant.mol.adj[ra]) {
          int nm = reactant.mol.atoms[nbr].map_num;
          if (nm > 0 && core.count(nm))
            rn.insert({nm, static_cast<int>(reactant.mol.bonds[bi].order)});
        }
        for (auto [nbr, bi] : product.adj[pa]) {
          int nm = product.atoms[nbr].map_num;
          if (nm > 0 && core.count(nm))
            pn.insert({nm, static_cast<int>(product.bonds[bi].order)});
        }
        same = rn == pn;
      }
      if (!same) {
        it = core.erase(it);
        shrunk = true;
      } else {
        ++it;
      }
    }
  }

  std::vector<int> changed_r, changed_p;
  std::set<int> core_atoms_r, core_atoms_p;
  for (int map : core) {
    core_atoms_r.insert(reactant.map_atom.at(map));
    core_atoms_p.insert(product_maps.at(map));
  }
  for (size_t i = 0; i < reactant.mol.num_atoms(); ++i)
    if (!core_atoms_r.count(static_cast<int>(i)))
      changed_r.push_back(static_cast<int>(i));
  for (size_t i = 0; i < product.num_atoms(); ++i)
    if (!core_atoms_p.count(static_cast<int>(i)))
      changed_p.push_back(static_cast<int>(i));

  if (changed_r.empty() && changed_p.empty())
    return reject("identity reaction, nothing changes");
  if (changed_r.empty() || changed_p.empty())
    return reject("pure addition or removal has no replaced fragment");
  if (!connected_region(reactant.mol, changed_r) ||
      !connected_region(product, changed_p))
    return reject("changed atoms form more than one region");

  // Anchor bonds between core and changed region, grouped by core map.
  auto anchor_maps = [](const Molecule& m, const std::set<int>& core_atoms,
                        const std::vector<int>& changed) {
    std::set<int> changed_set(changed.begin(), changed.end());
    std::multiset<int> maps;
    for (const Bond& b : m.bonds) {
      int core_end = -1;
      if (core_atoms.count(b.a) && changed_set.count(b.b)) core_end = b.a;
      if (core_atoms.count(b.b) && changed_set.count(b.a)) core_end = b.b;
      if (core_end >= 0) maps.insert(m.atoms[core_end].map_num);
    }
    return maps;
  };
  std::multiset<int> anchors_r = anchor_maps(reactant.mol, core_atoms_r, changed_r);
  std::multiset<int> anchors_p = anchor_maps(product, core_atoms_p, changed_p);

  if (anchors_r.empty() || anchors_p.empty())
    throw UnmappedAtoms("changed atoms are not attached to any mapped core atom");
  if (anchors_r != anchors_p)
    return reject("attachment points differ between the sides");
  for (auto it = anchors_r.begin(); it != anchors_r.end(); ++it)
    if (anchors_r.count(*it) > 1)
      return reject("multiple bonds to one attachment atom are ambiguous");

  // Anchor labels 1..k in sorted core-map order.
  std::map<int, int> label_of;
  for (int map : std::set<int>(anchors_r.begin(), anchors_r.end()))
    label_of[map] = static_cast<int>(label_of.size()) + 1;

  ReactionDiff diff;
  diff.action.original =
      changed_fragment(reactant.mol, changed_r, label_of, core_atoms_r);
  diff.action.replacement =
      changed_fragment(product, changed_p, label_of, core_atoms_p);

  // Context: core atoms with one labeled dummy per anchor.
  {
    std::vector<int> core_list(core_atoms_r.begin(), core_atoms_r.end());
    std::vector<int> to_new(reactant.mol.num_atoms(), -1);
    Molecule ctx;
    for (int at : core_list) {
      Atom a = reactant.mol.atoms[at];
      a.map_num = 0;
      to_new[at] = ctx.add_atom(a);
    }
    for (const Bond& b : reactant.mol.bonds)
      if (to_new[b.a] >= 0 && to_new[b.b] >= 0)
        ctx.add_bond(to_new[b.a], to_new[b.b], b.order);
    for (const auto& [map, label] : label_of) {
      Atom dummy;
      dummy.atomic_num = kDummyAtom;
      dummy.explicit_h = 0;
      dummy.map_num = label;
      int d = ctx.add_atom(dummy);
      ctx.add_bond(d, to_new[reactant.map_atom.at(map)], BondOrder::Single);
    }
    diff.context = canonical_smiles(perceive(std::move(ctx)));
  }
  return diff;
}

}  // namespace moledit
