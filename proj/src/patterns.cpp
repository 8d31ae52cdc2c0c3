#include "moledit/patterns.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "parse_internal.hpp"

namespace moledit {

void Pattern::finalize() {
  adj.assign(atoms.size(), {});
  for (size_t bi = 0; bi < bonds.size(); ++bi) {
    adj[bonds[bi].a].push_back({bonds[bi].b, static_cast<int>(bi)});
    adj[bonds[bi].b].push_back({bonds[bi].a, static_cast<int>(bi)});
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
}

Pattern parse_pattern(const std::string& text) {
  detail::RawMol raw = detail::parse_raw(text, detail::ParseMode::Pattern);
  Pattern p;
  for (const auto& ra : raw.atoms) {
    QueryAtom qa;
    if (ra.wildcard) {
      qa.wildcard = true;
      qa.aromatic = -1;
    } else {
      qa.atomic_num = ra.atomic_num;
      qa.aromatic = ra.aromatic ? 1 : 0;
    }
    qa.hcount = static_cast<int16_t>(ra.hcount);
    qa.ring = ra.ring_constraint;
    if (ra.charge_seen) {
      qa.charge_set = true;
      qa.charge = static_cast<int8_t>(ra.charge);
    }
    if (ra.isotope_seen) {
      qa.isotope_set = true;
      qa.isotope = static_cast<int16_t>(ra.isotope);
    }
    qa.map = ra.map;
    p.atoms.push_back(qa);
  }
  for (const auto& rb : raw.bonds) {
    BondExpr e;
    switch (rb.sym) {
      case 0: e = BondExpr::SingleOrAromatic; break;
      case '-': e = BondExpr::Single; break;
      case '=': e = BondExpr::Double; break;
      case '#': e = BondExpr::Triple; break;
      case ':': e = BondExpr::Aromatic; break;
      case '~': e = BondExpr::Any; break;
      default:
        throw UnsupportedPrimitive("unsupported bond symbol in pattern");
    }
    p.bonds.push_back(QueryBond{rb.a, rb.b, e});
  }
  p.finalize();

  // Connectivity: matching is defined over one connected query.
  if (!p.atoms.empty()) {
    std::vector<uint8_t> seen(p.atoms.size(), 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    for (size_t qi = 0; qi < queue.size(); ++qi)
      for (auto [nbr, bi] : p.adj[queue[qi]])
        if (!seen[nbr]) { seen[nbr] = 1; queue.push_back(nbr); }
    for (uint8_t s : seen)
      if (!s) throw UnsupportedPrimitive("disconnected patterns are not supported");
  }
  return p;
}

Pattern pattern_from_molecule(const Molecule& frag,
                              const std::vector<int8_t>& ring_constraint) {
  Pattern p;
  for (size_t i = 0; i < frag.num_atoms(); ++i) {
    const Atom& a = frag.atoms[i];
    QueryAtom qa;
    if (a.atomic_num == kDummyAtom) {
      qa.wildcard = true;
    } else {
      qa.atomic_num = a.atomic_num;
      qa.aromatic = a.aromatic ? 1 : 0;
      qa.charge_set = true;
      qa.charge = a.charge;
      if (a.isotope != 0) {
        qa.isotope_set = true;
        qa.isotope = a.isotope;
      }
      if (a.explicit_h >= 0) qa.hcount = a.explicit_h;
    }
    qa.map = a.map_num;
    if (i < ring_constraint.size()) qa.ring = ring_constraint[i];
    p.atoms.push_back(qa);
  }
  for (const Bond& b : frag.bonds) {
    BondExpr e;
    switch (b.order) {
      case BondOrder::Single: e = BondExpr::Single; break;
      case BondOrder::Double: e = BondExpr::Double; break;
      case BondOrder::Triple: e = BondExpr::Triple; break;
      case BondOrder::Aromatic: e = BondExpr::Aromatic; break;
      default: e = BondExpr::SingleOrAromatic; break;
    }
    p.bonds.push_back(QueryBond{b.a, b.b, e});
  }
  p.finalize();
  return p;
}

namespace {

bool atom_compatible(const QueryAtom& q, const Molecule& m, int a) {
  const Atom& atom = m.atoms[a];
  if (!q.wildcard) {
    if (atom.atomic_num != q.atomic_num) return false;
    if (q.aromatic >= 0 && (atom.aromatic ? 1 : 0) != q.aromatic) return false;
  }
  if (q.hcount >= 0 && m.total_h(a) != q.hcount) return false;
  if (q.ring >= 0 && m.atom_in_ring[a] != q.ring) return false;
  if (q.charge_set && atom.charge != q.charge) return false;
  if (q.isotope_set && atom.isotope != q.isotope) return false;
  return true;
}

bool bond_compatible(BondExpr e, BondOrder o) {
  switch (e) {
    case BondExpr::Any: return true;
    case BondExpr::Single: return o == BondOrder::Single;
    case BondExpr::Double: return o == BondOrder::Double;
    case BondExpr::Triple: return o == BondOrder::Triple;
    case BondExpr::Aromatic: return o == BondOrder::Aromatic;
    case BondExpr::SingleOrAromatic:
      return o == BondOrder::Single || o == BondOrder::Aromatic;
  }
  return false;
}

}  // namespace

std::vector<Match> find_matches(const Molecule& mol, const Pattern& pattern) {
  const size_t nq = pattern.size();
  std::vector<Match> out;
  if (nq == 0 || mol.num_atoms() == 0) return out;

  // Candidate counts drive the start choice; subsequent query atoms follow
  // adjacency so every placement is bond-checked against placed neighbors.
  std::vector<int> cand_count(nq, 0);
  for (size_t qi = 0; qi < nq; ++qi)
    for (size_t a = 0; a < mol.num_atoms(); ++a)
      if (atom_compatible(pattern.atoms[qi], mol, static_cast<int>(a)))
        ++cand_count[qi];

  std::vector<int> order;
  {
    std::vector<uint8_t> placed(nq, 0);
    int start = 0;
    for (size_t qi = 1; qi < nq; ++qi) {
      // Prefer constrained (non-wildcard) rare atoms as anchors.
      auto key = [&](size_t q) {
        return std::make_tuple(pattern.atoms[q].wildcard ? 1 : 0, cand_count[q],
                               static_cast<int>(q));
      };
      if (key(qi) < key(start)) start = static_cast<int>(qi);
    }
    order.push_back(start);
    placed[start] = 1;
    while (order.size() < nq) {
      int next = -1;
      for (size_t qi = 0; qi < nq; ++qi) {
        if (placed[qi]) continue;
        bool touches = false;
        for (auto [nbr, bi] : pattern.adj[qi])
          if (placed[nbr]) { touches = true; break; }
        if (!touches) continue;
        if (next < 0 || cand_count[qi] < cand_count[next]) next = static_cast<int>(qi);
      }
      if (next < 0) throw Error("pattern is not connected");
      order.push_back(next);
      placed[next] = 1;
    }
  }

  std::vector<int> assign(nq, -1);
  std::vector<uint8_t> used(mol.num_atoms(), 0);
  std::vector<Match> raw;

  auto backtrack = [&](auto&& self, size_t depth) -> void {
    if (depth == nq) {
      raw.push_back(Match{assign});
      return;
    }
    int qi = order[depth];
    const QueryAtom& qa = pattern.atoms[qi];
    for (size_t a = 0; a < mol.num_atoms(); ++a) {
      if (used[a] || !atom_compatible(qa, mol, static_cast<int>(a))) continue;
      bool ok = true;
      for (auto [nbr, bi] : pattern.adj[qi]) {
        if (assign[nbr] < 0) continue;
        int mb = mol.bond_index_between(static_cast<int>(a), assign[nbr]);
        if (mb < 0 || !bond_compatible(pattern.bonds[bi].expr, mol.bonds[mb].order)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      assign[qi] = static_cast<int>(a);
      used[a] = 1;
      self(self, depth + 1);
      assign[qi] = -1;
      used[a] = 0;
    }
  };
  backtrack(backtrack, 0);

  // Dedup on the non-wildcard image set; keep the smallest mapping vector.
  std::map<std::vector<int>, Match> by_core;
  for (auto& match : raw) {
    std::vector<int> core;
    for (size_t qi = 0; qi < nq; ++qi)
      if (!pattern.atoms[qi].wildcard) core.push_back(match.atoms[qi]);
    std::sort(core.begin(), core.end());
    auto it = by_core.find(core);
    if (it == by_core.end())
      by_core.emplace(std::move(core), std::move(match));
    else if (match.atoms < it->second.atoms)
      it->second = std::move(match);
  }
  for (auto& [core, match] : by_core) out.push_back(std::move(match));
  return out;
}

}  // namespace moledit
