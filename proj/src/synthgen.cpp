#include "moledit/synthgen.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "moledit/lineio.hpp"

namespace moledit {

namespace {

uint64_t rng_next(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

size_t rng_below(uint64_t& state, size_t n) {
  return n <= 1 ? 0 : static_cast<size_t>(rng_next(state) % n);
}

template <typename T>
void shuffle_vec(std::vector<T>& v, uint64_t& state) {
  for (size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng_below(state, i)]);
}

struct PoolSpec {
  const char* name;
  const char* smiles;
  int arity;
};

constexpr PoolSpec kPoolSpecs[] = {
    {"Fluoro", "[*:1]F", 1},
    {"Chloro", "[*:1]Cl", 1},
    {"Bromo", "[*:1]Br", 1},
    {"Iodo", "[*:1]I", 1},
    {"Methyl", "[*:1]C", 1},
    {"Ethyl", "[*:1]CC", 1},
    {"Isopropyl", "[*:1]C(C)C", 1},
    {"tert-Butyl", "[*:1]C(C)(C)C", 1},
    {"Phenyl", "[*:1]c1ccccc1", 1},
    {"p-Tolyl", "[*:1]c1ccc(cc1)C", 1},
    {"p-Chlorophenyl", "[*:1]c1ccc(cc1)Cl", 1},
    {"Hydroxyl", "[*:1]O", 1},
    {"Methoxy", "[*:1]OC", 1},
    {"Ethoxy", "[*:1]OCC", 1},
    {"Carboxyl", "[*:1]C(=O)O", 1},
    {"Aldehyde", "[*:1]C=O", 1},
    {"Ketone", "[*:1]C(=O)C", 1},
    {"Amino", "[*:1]N", 1},
    {"Methylamino", "[*:1]NC", 1},
    {"Dimethylamino", "[*:1]N(C)C", 1},
    {"Cyano", "[*:1]C#N", 1},
    {"Nitro", "[*:1][N+](=O)[O-]", 1},
    {"Thiol", "[*:1]S", 1},
    {"Methylthio", "[*:1]SC", 1},
    {"Sulfonyl", "[*:1]S(=O)(=O)C", 1},
    {"Meta-phenylene", "[*:1]c1cc([*:2])ccc1", 2},
    {"Para-phenylene", "[*:1]c1ccc([*:2])cc1", 2},
    {"Ortho-phenylene", "[*:1]c1c([*:2])cccc1", 2},
    {"Amide", "[*:1][C;!R](=O)[N;!R][*:2]", 2},
    {"Reverse amide", "[*:1][N;!R][C;!R](=O)[*:2]", 2},
    {"Ester", "[*:1][C;!R](=O)[O;!R][*:2]", 2},
    {"Ketone bridge", "[*:1][C;!R](=O)[*:2]", 2},
    {"Urea", "[*:1][N;!R][C;!R](=O)[N;!R][*:2]", 2},
    {"Carbamate", "[*:1][O;!R][C;!R](=O)[N;!R][*:2]", 2},
    {"Sulfonamide", "[*:1]S(=O)(=O)[N;!R][*:2]", 2},
    {"Methylene", "[*:1][C;!R][*:2]", 2},
    {"Ethylene", "[*:1][C;!R][C;!R][*:2]", 2},
    {"Ether", "[*:1][O;!R][*:2]", 2},
    {"Thioether", "[*:1][S;!R][*:2]", 2},
    {"Secondary amine", "[*:1][N;!R][*:2]", 2},
    {"1,2,3-Triazole", "[*:1]c1nnn([*:2])c1", 2},
    {"Imidazole-type", "[*:1]c1[nH]cc([*:2])n1", 2},
    {"Piperazine", "[*:1]N1CCN([*:2])CC1", 2},
    {"Piperidine", "[*:1]N1CCC([*:2])CC1", 2},
    {"PEG unit", "[*:1][O;!R][C;!R][C;!R][O;!R][*:2]", 2},
};

}  // namespace

const std::vector<PoolEntry>& builtin_pools() {
  static const std::vector<PoolEntry> pools = [] {
    std::vector<PoolEntry> out;
    for (const PoolSpec& spec : kPoolSpecs) {
      PoolEntry e;
      e.name = spec.name;
      e.smiles = spec.smiles;
      e.arity = spec.arity;
      e.fragment = Fragment::parse(spec.smiles);
      out.push_back(std::move(e));
    }
    return out;
  }();
  return pools;
}

namespace {

// Source numbers naming a site's anchors, preferring the context atom and
// falling back to the core atom next to the dummy.  Atoms introduced by an
// earlier replacement have no number and are skipped.
std::vector<int> attachment_numbers(const SiteMatch& site, const Fragment& frag,
                                    const std::vector<int>& src) {
  std::vector<int> out;
  for (const auto& [label, ctx] : site.anchors) {
    int n = src[ctx];
    if (n == 0) {
      int dummy = frag.dummy_for_map(label);
      n = src[site.atoms[frag.mol().adj[dummy][0].first]];
    }
    if (n > 0) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::optional<SynthSample> generate_sample(const Molecule& source, uint64_t seed,
                                           int iterations) {
  const auto& pools = builtin_pools();
  Molecule m0 = source.is_perceived ? source : perceive(source);

  uint64_t rng = seed ^ 0x73796e746867656eull;
  int n_edits = iterations > 0 ? iterations : 1 + static_cast<int>(rng_below(rng, 3));

  SynthSample sample;
  sample.source = canonical_smiles(m0);
  sample.numbered_source = numbered_smiles(m0);

  Molecule state = m0;
  std::vector<int> state_src(state.num_atoms(), 0);
  {
    int next = 1;
    for (int at : canonical_order(state))
      if (state.atoms[at].atomic_num != kDummyAtom) state_src[at] = next++;
  }
  std::string state_canon = sample.source;
  EditOutcome last_out;

  for (int round = 0; round < n_edits; ++round) {
    std::vector<size_t> order(pools.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_vec(order, rng);

    bool accepted = false;
    for (size_t pi : order) {
      const PoolEntry& p = pools[pi];
      auto sites = find_sites(state, p.fragment);
      if (sites.empty()) continue;
      shuffle_vec(sites, rng);

      std::vector<size_t> repls;
      for (size_t ri = 0; ri < pools.size(); ++ri)
        if (ri != pi && pools[ri].arity == p.arity) repls.push_back(ri);
      shuffle_vec(repls, rng);

      for (const SiteMatch& site : sites) {
        std::vector<int> attach = attachment_numbers(site, p.fragment, state_src);
        for (size_t ri : repls) {
          EditAction action;
          action.original = p.fragment;
          action.attachment_atoms = attach;
          action.replacement = pools[ri].fragment;
          EditScript trial = sample.script;
          trial.actions.push_back(action);
          EditOutcome out;
          try {
            out = apply_script(m0, trial, 0);
          } catch (const Error&) {
            continue;
          }
          // An edit must move the chain; a primary product identical to the
          // current state would make the step unverifiable.
          if (out.product_smiles[0] == state_canon) continue;

          sample.script = std::move(trial);
          state = out.products[0];
          state_src = out.product_source_numbers[0];
          state_canon = out.product_smiles[0];
          last_out = std::move(out);

          SynthEdit edit;
          edit.pattern_name = p.name;
          edit.pattern = p.smiles;
          edit.attachment_atoms = attach;
          edit.replacement_name = pools[ri].name;
          edit.replacement = pools[ri].smiles;
          sample.edits.push_back(std::move(edit));
          accepted = true;
          break;
        }
        if (accepted) break;
      }
      if (accepted) break;
    }
    if (!accepted) break;  // no pool pattern matches any further
  }

  if (sample.edits.empty()) return std::nullopt;

  sample.target = state_canon;
  for (size_t i = 0; i < sample.edits.size(); ++i)
    sample.edits[i].site = last_out.applied_sites[i];
  sample.prompt = render_prompt(sample.numbered_source, sample.script);
  sample.rdkit_snippet = emit_rdkit_snippet(m0, sample.script);
  return sample;
}

std::string render_prompt(const std::string& numbered_source,
                          const EditScript& script) {
  std::string out;
  out += "You are given a molecule in SMILES format:\n\"" + numbered_source +
         "\".\n\n";
  out +=
      "For reference, atoms where new groups will be attached are marked with\n"
      "\"[*:n]\", where \"n\" is the atom mapping number.\n\n"
      "Future connected atoms in groups are labeled using the same numbers,\n"
      "ensuring one-to-one attachment correspondence. You will then be given\n"
      "multiple instructions on how to edit the molecule.\n\n";
  for (const EditAction& a : script.actions) {
    out += "Replace the substructure corresponding to\n\"" + a.original.smiles() +
           "\"\n";
    if (!a.attachment_atoms.empty()) {
      out += a.attachment_atoms.size() == 1 ? "connected at atom " :
                                              "connected at atoms ";
      for (size_t i = 0; i < a.attachment_atoms.size(); ++i) {
        if (i) out += " and ";
        out += std::to_string(a.attachment_atoms[i]);
      }
      out += "\n";
    }
    out += "with \"" + a.replacement.smiles() + "\".\n\n";
  }
  out +=
      "Generate a Python code snippet that performs these replacements\n"
      "using RDKit via ChemicalReaction.\n\n"
      "Ensure the code is executable and returns the modified molecule as\n"
      "a new SMILES string.\n\n"
      "You must return a Python code snippet wrapped in triple backticks.\n\n"
      "The code should import modules from RDKit, perform the operation,\n"
      "and print only the modified molecule in SMILES format.\n";
  return out;
}

std::string sample_to_json(const SynthSample& sample) {
  nlohmann::ordered_json j;
  j["source"] = sample.source;
  j["numbered_source"] = sample.numbered_source;
  nlohmann::ordered_json edits = nlohmann::ordered_json::array();
  for (const SynthEdit& e : sample.edits) {
    nlohmann::ordered_json je;
    je["pattern_name"] = e.pattern_name;
    je["pattern"] = e.pattern;
    je["attachment_atoms"] = e.attachment_atoms;
    je["site"] = e.site;
    je["replacement_name"] = e.replacement_name;
    je["replacement"] = e.replacement;
    edits.push_back(std::move(je));
  }
  j["edits"] = std::move(edits);
  j["script"] = nlohmann::ordered_json::parse(script_to_json(sample.script));
  j["target"] = sample.target;
  j["prompt"] = sample.prompt;
  j["rdkit_snippet"] = sample.rdkit_snippet;
  return j.dump();
}

}  // namespace moledit
