#include <algorithm>
#include <numeric>

#include "moledit/chemgraph.hpp"
#include "write_internal.hpp"

// Canonical form: iterative neighborhood refinement over atom invariants,
// tie-broken by branching on the first ambiguous class and keeping the
// lexicographically smallest emission.  The candidate set is invariant under
// input atom order, so equal molecules always converge to one string.

namespace moledit {

namespace {

using detail::WriteOpts;
using detail::write_ordered;

std::vector<int64_t> initial_ranks(const Molecule& m) {
  const size_t n = m.num_atoms();
  std::vector<std::vector<int64_t>> keys(n);
  for (size_t i = 0; i < n; ++i) {
    const Atom& a = m.atoms[i];
    keys[i] = {a.atomic_num,
               m.degree(static_cast<int>(i)),
               a.charge,
               m.total_h(static_cast<int>(i)),
               m.atom_in_ring[i],
               a.aromatic ? 1 : 0,
               a.isotope,
               a.map_num};
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return keys[x] < keys[y]; });
  std::vector<int64_t> out(n, 0);
  int64_t r = 0;
  for (size_t k = 0; k < n; ++k) {
    if (k > 0 && keys[order[k]] != keys[order[k - 1]]) ++r;
    out[order[k]] = r;
  }
  return out;
}

int64_t count_classes(const std::vector<int64_t>& ranks) {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()) + 1;
}

// One full refinement to a stable partition.
std::vector<int64_t> refine(const Molecule& m, std::vector<int64_t> ranks) {
  const size_t n = m.num_atoms();
  if (n == 0) return ranks;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  int64_t classes = count_classes(ranks);
  while (true) {
    std::vector<std::vector<int64_t>> keys(n);
    for (size_t i = 0; i < n; ++i) {
      auto& key = keys[i];
      key.push_back(ranks[i]);
      std::vector<int64_t> env;
      for (auto [nbr, bi] : m.adj[i])
        env.push_back(static_cast<int64_t>(m.bonds[bi].order) * (1 << 24) +
                      ranks[nbr]);
      std::sort(env.begin(), env.end());
      key.insert(key.end(), env.begin(), env.end());
    }
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return keys[x] < keys[y]; });
    std::vector<int64_t> next(n, 0);
    int64_t r = 0;
    for (size_t k = 0; k < n; ++k) {
      if (k > 0 && keys[order[k]] != keys[order[k - 1]]) ++r;
      next[order[k]] = r;
    }
    int64_t next_classes = r + 1;
    ranks = std::move(next);
    if (next_classes == classes) return ranks;
    classes = next_classes;
  }
}

struct CanonPiece {
  std::string smiles;
  std::vector<int> order;
};

void solve_component(const Molecule& m, const std::vector<uint8_t>& mask,
                     std::vector<int64_t> ranks, CanonPiece& best) {
  // First duplicated rank inside the component, lowest rank value wins.
  const size_t n = m.num_atoms();
  int64_t dup_rank = -1;
  {
    std::vector<int> count_by_rank;
    for (size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      size_t r = static_cast<size_t>(ranks[i]);
      if (count_by_rank.size() <= r) count_by_rank.resize(r + 1, 0);
      ++count_by_rank[r];
    }
    for (size_t r = 0; r < count_by_rank.size(); ++r)
      if (count_by_rank[r] > 1) { dup_rank = static_cast<int64_t>(r); break; }
  }

  if (dup_rank < 0) {
    CanonPiece piece;
    piece.smiles = write_ordered(m, ranks, WriteOpts{}, &mask, &piece.order);
    if (best.smiles.empty() && best.order.empty()) {
      best = std::move(piece);
    } else if (piece.smiles < best.smiles) {
      best = std::move(piece);
    }
    return;
  }
  for (size_t i = 0; i < n; ++i) {
    if (!mask[i] || ranks[i] != dup_rank) continue;
    std::vector<int64_t> bumped(n);
    for (size_t k = 0; k < n; ++k) bumped[k] = ranks[k] * 2;
    bumped[i] -= 1;
    solve_component(m, mask, refine(m, std::move(bumped)), best);
  }
}

}  // namespace

static std::vector<CanonPiece> canonical_pieces(const Molecule& m) {
  std::vector<int64_t> base = refine(m, initial_ranks(m));
  std::vector<CanonPiece> pieces;
  for (const auto& comp : m.components()) {
    std::vector<uint8_t> mask(m.num_atoms(), 0);
    for (int at : comp) mask[at] = 1;
    CanonPiece best;
    solve_component(m, mask, base, best);
    pieces.push_back(std::move(best));
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const CanonPiece& x, const CanonPiece& y) {
              return x.smiles != y.smiles ? x.smiles < y.smiles
                                          : x.order < y.order;
            });
  return pieces;
}

std::string canonical_smiles(const Molecule& m) {
  if (m.num_atoms() == 0) return "";
  std::string out;
  auto pieces = canonical_pieces(m);
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (i) out += '.';
    out += pieces[i].smiles;
  }
  return out;
}

std::vector<int> canonical_order(const Molecule& m) {
  std::vector<int> order;
  for (auto& piece : canonical_pieces(m))
    order.insert(order.end(), piece.order.begin(), piece.order.end());
  return order;
}

}  // namespace moledit
