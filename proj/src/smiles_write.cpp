#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "moledit/lineio.hpp"
#include "write_internal.hpp"

namespace moledit {
namespace detail {

namespace {

bool bare_aromatic_ok(int z) {
  return z == 5 || z == 6 || z == 7 || z == 8 || z == 15 || z == 16;
}

// Hydrogen count a bare atom token would re-parse to, or -1 when no bare
// spelling reproduces the atom.
int predicted_bare_h(const Molecule& m, int i, bool kekulized) {
  const Atom& a = m.atoms[i];
  if (a.atomic_num == kDummyAtom) return 0;
  int sum = 0;
  if (kekulized) {
    sum = m.bond_valence(i);
  } else {
    bool has_mult = false;
    int arom_bonds = 0;
    for (auto [nbr, bi] : m.adj[i]) {
      BondOrder o = m.bonds[bi].order;
      if (o == BondOrder::Aromatic) {
        ++arom_bonds;
      } else {
        sum += bond_order_value(o);
        if (o == BondOrder::Double || o == BondOrder::Triple) has_mult = true;
      }
    }
    sum += arom_bonds;
    if (a.aromatic) {
      // A bare aromatic token re-derives its kekule double from scratch.
      int z = a.atomic_num;
      bool needs = !has_mult &&
                   (z == 6 || ((z == 7 || z == 15) && m.degree(i) == 2));
      if (needs) ++sum;
    }
  }
  const auto& allowed = default_valences(a.atomic_num);
  for (int v : allowed)
    if (v >= sum) return v - sum;
  return -1;
}

std::string charge_suffix(int charge) {
  if (charge == 0) return "";
  std::string s(1, charge > 0 ? '+' : '-');
  int mag = charge > 0 ? charge : -charge;
  if (mag > 1) s += std::to_string(mag);
  return s;
}

std::string atom_token(const Molecule& m, int i, const WriteOpts& opts) {
  const Atom& a = m.atoms[i];
  bool arom_out = a.aromatic && !opts.kekulized;
  int map = opts.include_maps ? a.map_num : 0;

  bool bracket = false;
  if (opts.number_brackets && a.atomic_num != kDummyAtom) {
    bracket = true;
  } else if (a.charge != 0 || a.isotope != 0 || map != 0) {
    bracket = true;
  } else if (a.atomic_num != kDummyAtom) {
    if (!organic_subset(a.atomic_num))
      bracket = true;
    else if (arom_out && !bare_aromatic_ok(a.atomic_num))
      bracket = true;
    else
      bracket = predicted_bare_h(m, i, opts.kekulized) != m.total_h(i);
  }

  std::string sym = a.atomic_num == kDummyAtom ? "*" : element_symbol(a.atomic_num);
  if (arom_out)
    for (char& c : sym) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  if (!bracket) return sym;

  std::string out = "[";
  if (a.isotope != 0) out += std::to_string(a.isotope);
  out += sym;
  int h = m.total_h(i);
  if (h > 0) {
    out += 'H';
    if (h > 1) out += std::to_string(h);
  }
  out += charge_suffix(a.charge);
  if (map != 0) {
    out += ':';
    out += std::to_string(map);
  }
  out += ']';
  return out;
}

std::string bond_symbol(const Molecule& m, int bi, const WriteOpts& opts) {
  BondOrder o = opts.kekulized && !m.kekule.empty() ? m.kekule[bi] : m.bonds[bi].order;
  switch (o) {
    case BondOrder::Double:
      return "=";
    case BondOrder::Triple:
      return "#";
    case BondOrder::Single: {
      // Explicit single between two aromatic atoms, otherwise a reparse
      // would promote an in-ring default bond back to aromatic.
      const Bond& b = m.bonds[bi];
      if (!opts.kekulized && m.atoms[b.a].aromatic && m.atoms[b.b].aromatic)
        return "-";
      return "";
    }
    default:
      return "";
  }
}

std::string ring_digit(int d) {
  if (d <= 9) return std::to_string(d);
  return "%" + std::to_string(d);
}

struct ComponentWriter {
  const Molecule& m;
  const std::vector<int64_t>& priority;
  const WriteOpts& opts;

  std::vector<int> disc;            // discovery index, -1 unvisited
  std::vector<std::vector<int>> tree_children;
  std::vector<std::vector<int>> ring_open;   // back-edge bond ids opening here
  std::vector<std::vector<int>> ring_close;  // back-edge bond ids closing here
  std::vector<int> emit;

  explicit ComponentWriter(const Molecule& mol, const std::vector<int64_t>& prio,
                           const WriteOpts& o)
      : m(mol), priority(prio), opts(o), disc(mol.num_atoms(), -1),
        tree_children(mol.num_atoms()), ring_open(mol.num_atoms()),
        ring_close(mol.num_atoms()) {}

  void dfs(int start) {
    std::set<int> back_bonds;
    struct Frame { int atom; int parent_bond; std::vector<int> nbrs; size_t next; };
    auto sorted_neighbors = [&](int at) {
      std::vector<int> order(m.adj[at].size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int x, int y) {
        return priority[m.adj[at][x].first] < priority[m.adj[at][y].first];
      });
      return order;
    };
    std::vector<Frame> stack;
    disc[start] = static_cast<int>(emit.size());
    emit.push_back(start);
    stack.push_back({start, -1, sorted_neighbors(start), 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next >= f.nbrs.size()) {
        stack.pop_back();
        continue;
      }
      auto [nbr, bi] = m.adj[f.atom][f.nbrs[f.next++]];
      if (bi == f.parent_bond) continue;
      if (disc[nbr] < 0) {
        disc[nbr] = static_cast<int>(emit.size());
        emit.push_back(nbr);
        tree_children[f.atom].push_back(bi);
        stack.push_back({nbr, bi, sorted_neighbors(nbr), 0});
      } else if (back_bonds.insert(bi).second) {
        int early = disc[nbr] < disc[f.atom] ? nbr : f.atom;
        int late = m.bonds[bi].other(early);
        ring_open[early].push_back(bi);
        ring_close[late].push_back(bi);
      }
    }
    // Openings in partner discovery order gives small digits to the rings
    // that close first.
    for (int at : emit) {
      std::sort(ring_open[at].begin(), ring_open[at].end(), [&](int x, int y) {
        int lx = disc[m.bonds[x].a] > disc[m.bonds[x].b] ? m.bonds[x].a : m.bonds[x].b;
        int ly = disc[m.bonds[y].a] > disc[m.bonds[y].b] ? m.bonds[y].a : m.bonds[y].b;
        return disc[lx] < disc[ly];
      });
    }
  }

  std::string render() {
    // Digit assignment in emission order, reusing freed digits.
    std::map<int, int> digit_of;  // bond -> digit
    std::set<int> free_digits;
    for (int d = 1; d <= 99; ++d) free_digits.insert(d);
    for (int at : emit) {
      std::vector<int> released;
      for (int bi : ring_close[at]) released.push_back(digit_of.at(bi));
      for (int bi : ring_open[at]) {
        if (free_digits.empty()) throw Error("ring closure digits exhausted");
        int d = *free_digits.begin();
        free_digits.erase(free_digits.begin());
        digit_of[bi] = d;
      }
      for (int d : released) free_digits.insert(d);
    }

    std::string out;
    emit_atom(emit[0], -1, digit_of, out);
    return out;
  }

  void emit_atom(int at, int parent_bond, std::map<int, int>& digit_of,
                 std::string& out) {
    out += atom_token(m, at, opts);
    std::vector<std::pair<int, int>> digits;  // (digit, bond)
    for (int bi : ring_close[at]) digits.push_back({digit_of.at(bi), bi});
    std::sort(digits.begin(), digits.end());
    size_t n_close = digits.size();
    for (int bi : ring_open[at]) digits.push_back({digit_of.at(bi), bi});
    for (size_t k = 0; k < digits.size(); ++k) {
      auto [d, bi] = digits[k];
      // The closing end restates the bond symbol only when the opening end
      // could not (closure discovered at the later atom); emit at both ends
      // for simplicity, parsers accept agreeing symbols.
      out += bond_symbol(m, bi, opts);
      out += ring_digit(d);
      (void)n_close;
    }
    const auto& children = tree_children[at];
    for (size_t k = 0; k < children.size(); ++k) {
      int bi = children[k];
      int child = m.bonds[bi].other(at);
      bool last = k + 1 == children.size();
      if (!last) out += '(';
      out += bond_symbol(m, bi, opts);
      emit_atom(child, bi, digit_of, out);
      if (!last) out += ')';
    }
    (void)parent_bond;
  }
};

}  // namespace

std::string write_ordered(const Molecule& m, const std::vector<int64_t>& priority,
                          const WriteOpts& opts, const std::vector<uint8_t>* mask,
                          std::vector<int>* emit_order) {
  if (m.num_atoms() == 0) return "";
  std::vector<uint8_t> seen(m.num_atoms(), 0);
  if (mask)
    for (size_t i = 0; i < m.num_atoms(); ++i) seen[i] = !(*mask)[i];

  // Component start atoms, ordered by priority.
  std::vector<int> starts;
  std::vector<int> atom_order(m.num_atoms());
  std::iota(atom_order.begin(), atom_order.end(), 0);
  std::sort(atom_order.begin(), atom_order.end(),
            [&](int x, int y) { return priority[x] < priority[y]; });
  {
    std::vector<uint8_t> visited = seen;
    for (int at : atom_order) {
      if (visited[at]) continue;
      starts.push_back(at);
      std::vector<int> queue{at};
      visited[at] = 1;
      for (size_t qi = 0; qi < queue.size(); ++qi)
        for (auto [nbr, bi] : m.adj[queue[qi]])
          if (!visited[nbr]) { visited[nbr] = 1; queue.push_back(nbr); }
    }
  }

  std::string out;
  for (size_t ci = 0; ci < starts.size(); ++ci) {
    ComponentWriter w(m, priority, opts);
    w.dfs(starts[ci]);
    if (ci) out += '.';
    out += w.render();
    if (emit_order)
      emit_order->insert(emit_order->end(), w.emit.begin(), w.emit.end());
  }
  return out;
}

}  // namespace detail

std::string write_smiles(const Molecule& mol, const SmilesDialect& dialect) {
  std::vector<int64_t> prio(mol.num_atoms());
  std::iota(prio.begin(), prio.end(), 0);
  detail::WriteOpts opts;
  opts.kekulized = dialect.kekulized_output;
  opts.include_maps = dialect.include_maps;
  return detail::write_ordered(mol, prio, opts, nullptr, nullptr);
}

std::string write_random_smiles(const Molecule& mol, uint64_t seed) {
  std::vector<int64_t> prio(mol.num_atoms());
  std::iota(prio.begin(), prio.end(), 0);
  std::mt19937_64 rng(seed);
  for (size_t i = prio.size(); i > 1; --i)
    std::swap(prio[i - 1], prio[rng() % i]);
  return detail::write_ordered(mol, prio, detail::WriteOpts{}, nullptr, nullptr);
}

Molecule number_atoms(const Molecule& mol) {
  for (size_t i = 0; i < mol.num_atoms(); ++i)
    if (mol.atoms[i].atomic_num != kDummyAtom && mol.atoms[i].map_num != 0)
      throw MapCollision("atom " + std::to_string(i) + " already carries map " +
                         std::to_string(mol.atoms[i].map_num));
  std::vector<int> order = canonical_order(mol);
  Molecule out = mol;
  int next = 1;
  for (int at : order)
    if (out.atoms[at].atomic_num != kDummyAtom) out.atoms[at].map_num = next++;
  return out;
}

std::string numbered_smiles(const Molecule& mol) {
  std::vector<int> order = canonical_order(mol);
  Molecule numbered = mol;
  {
    int next = 1;
    for (int at : order) {
      if (numbered.atoms[at].atomic_num == kDummyAtom) continue;
      if (numbered.atoms[at].map_num != 0)
        throw MapCollision("atom " + std::to_string(at) + " already carries map " +
                           std::to_string(numbered.atoms[at].map_num));
      numbered.atoms[at].map_num = next++;
    }
  }
  std::vector<int64_t> prio(mol.num_atoms());
  for (size_t pos = 0; pos < order.size(); ++pos) prio[order[pos]] = static_cast<int64_t>(pos);
  detail::WriteOpts opts;
  opts.number_brackets = true;
  return detail::write_ordered(numbered, prio, opts, nullptr, nullptr);
}

}  // namespace moledit
