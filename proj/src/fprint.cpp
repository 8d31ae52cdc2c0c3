#include "moledit/fprint.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "moledit/errors.hpp"

namespace moledit {

int Fingerprint::popcount() const {
  int n = 0;
  for (uint64_t w : words) n += std::popcount(w);
  return n;
}

namespace {

constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr uint64_t kFnvPrime = 0x100000001b3ull;

uint64_t fnv_mix(uint64_t h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

uint64_t hash_seq(const std::vector<uint64_t>& vals) {
  uint64_t h = kFnvOffset;
  for (uint64_t v : vals) h = fnv_mix(h, v);
  return h;
}

}  // namespace

Fingerprint ecfp(const Molecule& mol, int radius, int nbits) {
  if (nbits <= 0 || (nbits & (nbits - 1)) != 0)
    throw WidthMismatch("fingerprint width must be a power of two");
  Molecule scratch;
  if (!mol.is_perceived) scratch = perceive(mol);
  const Molecule& m = mol.is_perceived ? mol : scratch;

  const size_t n = m.num_atoms();
  std::vector<uint64_t> ids(n);
  for (size_t i = 0; i < n; ++i) {
    const Atom& a = m.atoms[i];
    ids[i] = hash_seq({static_cast<uint64_t>(a.atomic_num),
                       static_cast<uint64_t>(m.degree(static_cast<int>(i))),
                       static_cast<uint64_t>(a.charge + 16),
                       static_cast<uint64_t>(m.total_h(static_cast<int>(i))),
                       static_cast<uint64_t>(a.aromatic ? 1 : 0),
                       static_cast<uint64_t>(m.atom_in_ring[i] ? 1 : 0),
                       static_cast<uint64_t>(a.isotope),
                       static_cast<uint64_t>(a.atomic_num == kDummyAtom ? 1 : 0)});
  }

  std::set<uint64_t> features(ids.begin(), ids.end());
  for (int r = 1; r <= radius; ++r) {
    std::vector<uint64_t> next(n);
    for (size_t i = 0; i < n; ++i) {
      std::vector<std::pair<uint64_t, uint64_t>> env;
      for (auto [nbr, bi] : m.adj[i])
        env.push_back({static_cast<uint64_t>(m.bonds[bi].order), ids[nbr]});
      std::sort(env.begin(), env.end());
      std::vector<uint64_t> seq{static_cast<uint64_t>(r), ids[i]};
      for (auto& [b, v] : env) {
        seq.push_back(b);
        seq.push_back(v);
      }
      next[i] = hash_seq(seq);
      features.insert(next[i]);
    }
    ids = std::move(next);
  }

  Fingerprint fp;
  fp.nbits = nbits;
  fp.words.assign(static_cast<size_t>(nbits) / 64, 0);
  for (uint64_t f : features) fp.set(static_cast<int>(f & (nbits - 1)));
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.nbits != b.nbits)
    throw WidthMismatch("fingerprint widths differ: " + std::to_string(a.nbits) +
                        " vs " + std::to_string(b.nbits));
  int both = 0, any = 0;
  for (size_t i = 0; i < a.words.size(); ++i) {
    both += std::popcount(a.words[i] & b.words[i]);
    any += std::popcount(a.words[i] | b.words[i]);
  }
  return any == 0 ? 1.0 : static_cast<double>(both) / any;
}

}  // namespace moledit
