#include "moledit/prepfilter.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "moledit/elements.hpp"
#include "moledit/errors.hpp"

namespace moledit {

namespace {

// H, B, C, N, O, F, P, S, Cl, Se, Br, I.
const std::set<int> kAllowedElements = {1, 5, 6, 7, 8, 9, 15, 16, 17, 34, 35, 53};

Molecule extract_component(const Molecule& m, const std::vector<int>& atoms) {
  std::vector<int> to_new(m.num_atoms(), -1);
  Molecule out;
  for (int at : atoms) to_new[at] = out.add_atom(m.atoms[at]);
  for (const Bond& b : m.bonds)
    if (to_new[b.a] >= 0 && to_new[b.b] >= 0)
      out.add_bond(to_new[b.a], to_new[b.b], b.order);
  return perceive(std::move(out));
}

int heavy_count(const Molecule& m) {
  int n = 0;
  for (const Atom& a : m.atoms)
    if (a.atomic_num > 1) ++n;
  return n;
}

// Longest run of acyclic atoms each carrying at most two heavy neighbors:
// branch points and ring atoms break a chain.
int longest_chain(const Molecule& m) {
  const size_t n = m.num_atoms();
  std::vector<uint8_t> chainy(n, 0);
  for (size_t i = 0; i < n; ++i)
    chainy[i] = !m.atom_in_ring[i] && m.degree(static_cast<int>(i)) <= 2 &&
                m.atoms[i].atomic_num != kDummyAtom;

  // Chain components are paths, so the longest run is the largest component.
  std::vector<uint8_t> seen(n, 0);
  int best = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!chainy[i] || seen[i]) continue;
    int count = 0;
    std::vector<int> stack{static_cast<int>(i)};
    seen[i] = 1;
    while (!stack.empty()) {
      int at = stack.back();
      stack.pop_back();
      ++count;
      for (auto [nbr, bi] : m.adj[at]) {
        (void)bi;
        if (chainy[nbr] && !seen[nbr]) {
          seen[nbr] = 1;
          stack.push_back(nbr);
        }
      }
    }
    best = std::max(best, count);
  }
  return best;
}

std::string format_mw(double mw) {
  std::ostringstream out;
  out.precision(3);
  out << std::fixed << mw;
  return out.str();
}

}  // namespace

FilterReport filter_compound(const Molecule& mol, const FilterOptions& opts) {
  FilterReport report;
  Molecule m = mol.is_perceived ? mol : perceive(mol);

  auto comps = m.components();
  if (comps.empty()) {
    report.reason = "no atoms";
    return report;
  }

  // Salt stripping: keep the largest component.
  std::vector<Molecule> pieces;
  for (const auto& comp : comps) pieces.push_back(extract_component(m, comp));
  size_t best = 0;
  for (size_t i = 1; i < pieces.size(); ++i) {
    int ha = heavy_count(pieces[i]), hb = heavy_count(pieces[best]);
    double wa = descriptors(pieces[i]).mol_weight;
    double wb = descriptors(pieces[best]).mol_weight;
    if (std::tuple(-ha, -wa, canonical_smiles(pieces[i])) <
        std::tuple(-hb, -wb, canonical_smiles(pieces[best])))
      best = i;
  }
  report.kept = std::move(pieces[best]);
  report.kept_smiles = canonical_smiles(report.kept);

  for (const Atom& a : report.kept.atoms) {
    if (!kAllowedElements.count(a.atomic_num)) {
      report.reason =
          "element " + std::string(element_symbol(a.atomic_num)) + " not allowed";
      return report;
    }
  }

  double mw = descriptors(report.kept).mol_weight;
  if (mw < opts.min_mw) {
    report.reason = "molecular weight " + format_mw(mw) + " below " +
                    format_mw(opts.min_mw);
    return report;
  }
  if (mw > opts.max_mw) {
    report.reason = "molecular weight " + format_mw(mw) + " above " +
                    format_mw(opts.max_mw);
    return report;
  }

  int chain = longest_chain(report.kept);
  if (chain > opts.max_chain) {
    report.reason = "acyclic chain of " + std::to_string(chain) +
                    " atoms exceeds " + std::to_string(opts.max_chain);
    return report;
  }

  report.passed = true;
  return report;
}

double max_similarity(const Fingerprint& fp, const std::vector<Fingerprint>& refs) {
  double best = 0.0;
  for (const Fingerprint& ref : refs) best = std::max(best, tanimoto(fp, ref));
  return best;
}

std::vector<uint8_t> decontaminate(const std::vector<PairFingerprints>& pairs,
                                   const std::vector<Fingerprint>& refs,
                                   double threshold) {
  std::vector<uint8_t> keep(pairs.size(), 1);
  for (size_t i = 0; i < pairs.size(); ++i)
    if (max_similarity(pairs[i].a, refs) >= threshold ||
        max_similarity(pairs[i].b, refs) >= threshold)
      keep[i] = 0;
  return keep;
}

}  // namespace moledit
