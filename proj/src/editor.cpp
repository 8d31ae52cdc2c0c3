#include "moledit/editor.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "moledit/lineio.hpp"
#include "parse_internal.hpp"
#include "write_internal.hpp"

namespace moledit {

namespace {

uint64_t rng_next(uint64_t& state) {
  // splitmix64; good enough and stable across platforms.
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

size_t rng_below(uint64_t& state, size_t n) {
  return n <= 1 ? 0 : static_cast<size_t>(rng_next(state) % n);
}

}  // namespace

Fragment Fragment::parse(const std::string& text) {
  detail::RawMol raw = detail::parse_raw(text, detail::ParseMode::Fragment);
  Molecule mol = detail::raw_to_molecule(raw, /*strict_bracket_h=*/false);
  return from_molecule(perceive(std::move(mol)), detail::ring_constraints(raw));
}

Fragment Fragment::from_molecule(Molecule mol, std::vector<int8_t> ring_constraints) {
  Fragment f;
  f.mol_ = mol.is_perceived ? std::move(mol) : perceive(std::move(mol));
  f.ring_constraints_ = std::move(ring_constraints);
  f.ring_constraints_.resize(f.mol_.num_atoms(), -1);

  std::set<int> used;
  std::vector<int> unmapped;
  for (size_t i = 0; i < f.mol_.num_atoms(); ++i) {
    if (f.mol_.atoms[i].atomic_num != kDummyAtom) continue;
    if (f.mol_.degree(static_cast<int>(i)) != 1)
      throw ActionSyntaxError("attachment dummy must have exactly one bond");
    int map = f.mol_.atoms[i].map_num;
    if (map > 0) {
      if (!used.insert(map).second)
        throw ActionSyntaxError("duplicate attachment label " + std::to_string(map));
    } else {
      unmapped.push_back(static_cast<int>(i));
    }
  }
  int next = 1;
  for (int at : unmapped) {
    while (used.count(next)) ++next;
    f.mol_.atoms[at].map_num = next;
    used.insert(next);
  }
  if (used.empty())
    throw ActionSyntaxError("fragment has no attachment point");

  for (int map : used) {
    for (size_t i = 0; i < f.mol_.num_atoms(); ++i)
      if (f.mol_.atoms[i].atomic_num == kDummyAtom && f.mol_.atoms[i].map_num == map)
        f.dummies_.push_back(static_cast<int>(i));
  }

  if (f.mol_.components().size() != 1)
    throw ActionSyntaxError("fragment must be connected");
  return f;
}

std::vector<int> Fragment::anchor_maps() const {
  std::vector<int> maps;
  for (int at : dummies_) maps.push_back(mol_.atoms[at].map_num);
  return maps;  // dummies_ is map-ordered
}

int Fragment::dummy_for_map(int map) const {
  for (int at : dummies_)
    if (mol_.atoms[at].map_num == map) return at;
  return -1;
}

std::string Fragment::smiles() const { return canonical_smiles(mol_); }

Pattern Fragment::query() const {
  return pattern_from_molecule(mol_, ring_constraints_);
}

std::vector<std::vector<std::pair<int, int>>> Fragment::map_permutations() const {
  const size_t n = mol_.num_atoms();
  // Invariant classes; dummies are interchangeable regardless of map.
  auto invariant = [&](int i) {
    const Atom& a = mol_.atoms[i];
    return std::tuple(a.atomic_num, a.aromatic, a.charge, a.isotope,
                      a.atomic_num == kDummyAtom ? 0 : a.map_num,
                      a.explicit_h, mol_.degree(i),
                      static_cast<int>(ring_constraints_[i]));
  };

  std::vector<int> perm(n, -1);
  std::vector<uint8_t> used(n, 0);
  std::set<std::vector<std::pair<int, int>>> label_perms;

  auto record = [&]() {
    std::vector<std::pair<int, int>> lp;
    for (int at : dummies_)
      lp.push_back({mol_.atoms[at].map_num, mol_.atoms[perm[at]].map_num});
    label_perms.insert(std::move(lp));
  };

  auto backtrack = [&](auto&& self, size_t i) -> void {
    if (i == n) {
      record();
      return;
    }
    for (size_t j = 0; j < n; ++j) {
      if (used[j] || invariant(static_cast<int>(i)) != invariant(static_cast<int>(j)))
        continue;
      bool ok = true;
      for (auto [nbr, bi] : mol_.adj[i]) {
        if (static_cast<size_t>(nbr) > i || perm[nbr] < 0) continue;
        int mb = mol_.bond_index_between(static_cast<int>(j), perm[nbr]);
        if (mb < 0 || mol_.bonds[mb].order != mol_.bonds[bi].order) {
          ok = false;
          break;
        }
      }
      // Degree equality is in the invariant; edge counts match globally.
      if (!ok) continue;
      perm[i] = static_cast<int>(j);
      used[j] = 1;
      self(self, i + 1);
      perm[i] = -1;
      used[j] = 0;
    }
  };
  backtrack(backtrack, 0);

  std::vector<std::vector<std::pair<int, int>>> out(label_perms.begin(),
                                                    label_perms.end());
  // Identity first, rest in set order.
  std::vector<std::pair<int, int>> identity;
  for (int at : dummies_)
    identity.push_back({mol_.atoms[at].map_num, mol_.atoms[at].map_num});
  auto it = std::find(out.begin(), out.end(), identity);
  if (it != out.end()) std::iter_swap(out.begin(), it);
  return out;
}

namespace {

// ----- action text ------------------------------------------------------

std::string strip_quotes(std::string s) {
  while (!s.empty() && (s.front() == '"' || s.front() == '\'')) s.erase(s.begin());
  while (!s.empty() &&
         (s.back() == '"' || s.back() == '\'' || s.back() == '.' || s.back() == ','))
    s.pop_back();
  return s;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> tokens_of(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

}  // namespace

EditAction parse_action(const std::string& text) {
  auto toks = tokens_of(text);
  size_t i = 0;
  auto expect_keyword = [&](const char* kw) {
    if (i >= toks.size() || lower(strip_quotes(toks[i])) != kw)
      throw ActionSyntaxError(std::string("expected '") + kw + "' in action: " + text);
    ++i;
  };
  expect_keyword("replace");
  // Prose variant: "replace the substructure corresponding to "X" ...".
  if (i + 3 < toks.size() && lower(toks[i]) == "the" &&
      lower(toks[i + 1]) == "substructure" && lower(toks[i + 2]) == "corresponding" &&
      lower(toks[i + 3]) == "to")
    i += 4;
  if (i >= toks.size()) throw ActionSyntaxError("missing original fragment: " + text);
  std::string orig_text = strip_quotes(toks[i++]);

  std::vector<int> attachment;
  if (i < toks.size() && lower(toks[i]) == "connected") {
    ++i;
    expect_keyword("at");
    bool seen_with = false;
    for (; i < toks.size(); ++i) {
      std::string t = strip_quotes(toks[i]);
      if (lower(t) == "with") { seen_with = true; ++i; break; }
      // Accept "atom", "atoms", "and", "atom_number7", "7", "7,".
      std::string digits;
      for (char c : t)
        if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
        else if (!digits.empty()) break;
      if (!digits.empty()) {
        attachment.push_back(std::stoi(digits));
        continue;
      }
      std::string w = lower(t);
      if (w == "atom" || w == "atoms" || w == "and" || w == "atom_number" ||
          w == "atom_numbers" || w.empty())
        continue;
      throw ActionSyntaxError("unexpected token '" + t + "' in attachment list");
    }
    if (!seen_with) throw ActionSyntaxError("missing 'with' in action: " + text);
  } else {
    expect_keyword("with");
  }
  if (i >= toks.size()) throw ActionSyntaxError("missing replacement fragment: " + text);
  std::string repl_text = strip_quotes(toks[i++]);
  if (i < toks.size())
    throw ActionSyntaxError("unexpected trailing text in action: " + text);

  EditAction action;
  try {
    action.original = Fragment::parse(orig_text);
    action.replacement = Fragment::parse(repl_text);
  } catch (const ActionSyntaxError&) {
    throw;
  } catch (const Error& e) {
    throw ActionSyntaxError(std::string("bad fragment in action: ") + e.what());
  }
  action.attachment_atoms = std::move(attachment);

  auto om = action.original.anchor_maps();
  auto rm = action.replacement.anchor_maps();
  if (om.size() != rm.size())
    throw ArityMismatch("original has " + std::to_string(om.size()) +
                        " attachment points, replacement has " +
                        std::to_string(rm.size()));
  return action;
}

namespace {

// [*7] and [*7:] become [*:7].
std::string repair_anchor_spelling(const std::string& text) {
  std::string out;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '[' && i + 1 < text.size() && text[i + 1] == '*') {
      size_t j = i + 2;
      std::string digits;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
        digits += text[j++];
      if (!digits.empty() && j < text.size() && text[j] == ':') ++j;
      if (!digits.empty() && j < text.size() && text[j] == ']') {
        out += "[*:" + digits + "]";
        i = j + 1;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

// One missing pyrrole-type hydrogen: try [nH] at each bare aromatic n until
// the fragment kekulizes.
std::string repair_aromatic_nh(const std::string& frag_text) {
  try {
    Fragment::parse(frag_text);
    return frag_text;
  } catch (const KekulizationError&) {
  } catch (const Error&) {
    return frag_text;
  }
  for (size_t i = 0; i < frag_text.size(); ++i) {
    if (frag_text[i] != 'n') continue;
    if (i > 0 && frag_text[i - 1] == '[') continue;
    std::string candidate = frag_text.substr(0, i) + "[nH]" + frag_text.substr(i + 1);
    try {
      Fragment::parse(candidate);
      return candidate;
    } catch (const Error&) {
    }
  }
  return frag_text;
}

}  // namespace

std::string normalize_action(const std::string& text) {
  std::string repaired = repair_anchor_spelling(text);
  // Fragment tokens are the ones carrying anchors; repair each in place.
  auto toks = tokens_of(repaired);
  std::string out;
  for (size_t i = 0; i < toks.size(); ++i) {
    std::string t = toks[i];
    if (t.find("[*:") != std::string::npos) {
      std::string bare = strip_quotes(t);
      std::string fixed = repair_aromatic_nh(bare);
      if (fixed != bare) {
        size_t at = t.find(bare);
        t = t.substr(0, at) + fixed + t.substr(at + bare.size());
      }
    }
    if (i) out += ' ';
    out += t;
  }
  return out;
}

// ----- script application ------------------------------------------------

std::vector<SiteMatch> find_sites(const Molecule& mol, const Fragment& frag) {
  Pattern pat = frag.query();
  std::vector<SiteMatch> out;
  for (const Match& match : find_matches(mol, pat)) {
    bool closed = true;
    for (size_t qi = 0; qi < pat.size() && closed; ++qi) {
      if (pat.atoms[qi].wildcard) continue;
      // Closed embedding: every molecule bond at a core atom is matched, so
      // the anchors account for all external connections.
      closed = mol.degree(match.atoms[qi]) == pat.degree(static_cast<int>(qi));
    }
    if (!closed) continue;
    SiteMatch e;
    e.atoms = match.atoms;
    for (size_t qi = 0; qi < pat.size(); ++qi) {
      if (pat.atoms[qi].wildcard)
        e.anchors.push_back({pat.atoms[qi].map, match.atoms[qi]});
      else
        e.core.push_back(match.atoms[qi]);
    }
    std::sort(e.anchors.begin(), e.anchors.end());
    std::sort(e.core.begin(), e.core.end());
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

struct ChainState {
  Molecule mol;
  std::vector<int> src;  // source numbering per atom, 0 = introduced later
  std::string canon;
};

int context_atom(const SiteMatch& e, int label) {
  for (const auto& [l, at] : e.anchors)
    if (l == label) return at;
  return -1;
}

// Source numbers a requested attachment may designate: the context atom or
// the core atom next to the dummy.
bool attachment_satisfied(const SiteMatch& e, const Fragment& frag,
                          const std::vector<int>& src,
                          const std::vector<int>& wanted) {
  std::set<int> allowed;
  for (const auto& [label, ctx] : e.anchors) {
    if (src[ctx] > 0) allowed.insert(src[ctx]);
    int dummy = frag.dummy_for_map(label);
    int core_nbr = e.atoms[frag.mol().adj[dummy][0].first];
    if (src[core_nbr] > 0) allowed.insert(src[core_nbr]);
  }
  for (int n : wanted)
    if (!allowed.count(n)) return false;
  return true;
}

Molecule graft(const Molecule& mol, const SiteMatch& e, const Fragment& repl,
               const std::map<int, int>& label_map, const std::vector<int>& src,
               std::vector<int>& src_out) {
  std::vector<uint8_t> removed(mol.num_atoms(), 0);
  for (int at : e.core) removed[at] = 1;

  Molecule out;
  std::vector<int> mol_to_new(mol.num_atoms(), -1);
  std::vector<int> new_src;
  for (size_t i = 0; i < mol.num_atoms(); ++i) {
    if (removed[i]) continue;
    mol_to_new[i] = out.add_atom(mol.atoms[i]);
    new_src.push_back(src[i]);
  }
  for (const Bond& b : mol.bonds)
    if (mol_to_new[b.a] >= 0 && mol_to_new[b.b] >= 0)
      out.add_bond(mol_to_new[b.a], mol_to_new[b.b], b.order);

  const Molecule& rm = repl.mol();
  std::vector<int> repl_to_new(rm.num_atoms(), -1);
  for (size_t i = 0; i < rm.num_atoms(); ++i) {
    if (rm.atoms[i].atomic_num == kDummyAtom) continue;
    Atom a = rm.atoms[i];
    a.map_num = 0;  // anchor labels stay on dummies only
    repl_to_new[i] = out.add_atom(a);
    new_src.push_back(0);
  }
  for (const Bond& b : rm.bonds)
    if (repl_to_new[b.a] >= 0 && repl_to_new[b.b] >= 0)
      out.add_bond(repl_to_new[b.a], repl_to_new[b.b], b.order);

  for (int dummy : repl.dummy_atoms()) {
    int label = rm.atoms[dummy].map_num;
    auto lm = label_map.find(label);
    if (lm == label_map.end())
      throw ArityMismatch("replacement anchor " + std::to_string(label) +
                          " has no counterpart");
    int ctx = context_atom(e, lm->second);
    if (ctx < 0)
      throw ArityMismatch("no context atom for anchor " + std::to_string(lm->second));
    auto [nbr, bi] = rm.adj[dummy][0];
    out.add_bond(repl_to_new[nbr], mol_to_new[ctx], rm.bonds[bi].order);
  }

  src_out = std::move(new_src);
  return perceive(std::move(out));
}

// Pair anchors between original and replacement: by equal label sets first,
// by sorted position otherwise.
std::map<int, int> pair_anchors(const Fragment& original, const Fragment& replacement,
                                std::vector<std::string>* warnings) {
  auto om = original.anchor_maps();
  auto rm = replacement.anchor_maps();
  if (om.size() != rm.size())
    throw ArityMismatch("original has " + std::to_string(om.size()) +
                        " attachment points, replacement has " +
                        std::to_string(rm.size()));
  std::map<int, int> pairing;  // replacement label -> original label
  if (om == rm) {
    for (int m : om) pairing[m] = m;
  } else {
    for (size_t i = 0; i < om.size(); ++i) pairing[rm[i]] = om[i];
    if (warnings)
      warnings->push_back("attachment labels differ; paired by sorted order");
  }
  return pairing;
}

}  // namespace

EditOutcome apply_script(const Molecule& source, const EditScript& script,
                         uint64_t seed) {
  if (script.actions.empty()) throw EmptyInput("edit script has no actions");

  EditOutcome outcome;
  uint64_t rng = seed ^ 0x6d6f6c65646974ull;

  ChainState init;
  init.mol = source.is_perceived ? source : perceive(source);
  init.src.assign(init.mol.num_atoms(), 0);
  {
    int next = 1;
    for (int at : canonical_order(init.mol))
      if (init.mol.atoms[at].atomic_num != kDummyAtom) init.src[at] = next++;
  }
  init.canon = canonical_smiles(init.mol);
  std::vector<ChainState> states{std::move(init)};

  for (const EditAction& action : script.actions) {
    auto pairing = pair_anchors(action.original, action.replacement,
                                &outcome.warnings);
    auto perms = action.original.map_permutations();

    std::vector<ChainState> next_states;
    std::set<std::string> seen;
    bool any_embedding = false;
    std::exception_ptr graft_error;
    bool site_recorded = false;

    for (const ChainState& state : states) {
      auto embeddings = find_sites(state.mol, action.original);
      if (!action.attachment_atoms.empty()) {
        std::vector<SiteMatch> kept;
        for (auto& e : embeddings)
          if (attachment_satisfied(e, action.original, state.src,
                                   action.attachment_atoms))
            kept.push_back(std::move(e));
        embeddings = std::move(kept);
      }
      if (embeddings.empty()) continue;
      any_embedding = true;

      size_t pick = 0;
      if (embeddings.size() > 1) {
        pick = rng_below(rng, embeddings.size());
        outcome.warnings.push_back(
            "ambiguous site: " + std::to_string(embeddings.size()) +
            " matches, selected one at random");
      }
      const SiteMatch& site = embeddings[pick];
      if (!site_recorded) {
        outcome.applied_sites.push_back(site.atoms);
        site_recorded = true;
      }

      for (const auto& perm : perms) {
        // Compose: replacement label -> original label -> permuted label.
        std::map<int, int> label_map;
        std::map<int, int> permuted(perm.begin(), perm.end());
        for (const auto& [rl, ol] : pairing) label_map[rl] = permuted.at(ol);
        try {
          ChainState ns;
          ns.mol = graft(state.mol, site, action.replacement, label_map,
                         state.src, ns.src);
          ns.canon = canonical_smiles(ns.mol);
          if (seen.insert(ns.canon).second) next_states.push_back(std::move(ns));
        } catch (const Error&) {
          graft_error = std::current_exception();
        }
      }
    }

    if (next_states.empty()) {
      if (any_embedding && graft_error) std::rethrow_exception(graft_error);
      throw GroupNotFound("fragment " + action.original.smiles() +
                          " not found in molecule");
    }
    if (!site_recorded) outcome.applied_sites.push_back({});
    std::sort(next_states.begin(), next_states.end(),
              [](const ChainState& x, const ChainState& y) { return x.canon < y.canon; });
    states = std::move(next_states);
  }

  for (ChainState& s : states) {
    outcome.product_smiles.push_back(s.canon);
    outcome.product_source_numbers.push_back(std::move(s.src));
    outcome.products.push_back(std::move(s.mol));
  }
  return outcome;
}

// ----- serialization ------------------------------------------------------

std::string emit_reaction_smirks(const EditAction& action) {
  return action.original.smiles() + ">>" + action.replacement.smiles();
}

EditAction parse_reaction_smirks(const std::string& text) {
  size_t sep = text.find(">>");
  if (sep == std::string::npos || text.find(">>", sep + 2) != std::string::npos)
    throw ActionSyntaxError("expected exactly one '>>' in reaction: " + text);
  EditAction action;
  try {
    action.original = Fragment::parse(text.substr(0, sep));
    action.replacement = Fragment::parse(text.substr(sep + 2));
  } catch (const ActionSyntaxError&) {
    throw;
  } catch (const Error& e) {
    throw ActionSyntaxError(std::string("bad fragment in reaction: ") + e.what());
  }
  if (action.original.arity() != action.replacement.arity())
    throw ArityMismatch("reaction sides disagree on attachment count");
  return action;
}

EditScript script_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw JsonError(std::string("bad script JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("actions") || !j["actions"].is_array())
    throw JsonError("script JSON must contain an \"actions\" array");
  EditScript script;
  for (const auto& item : j["actions"]) {
    if (!item.is_object() || !item.contains("original") ||
        !item.contains("replacement"))
      throw JsonError("each action needs \"original\" and \"replacement\"");
    EditAction action;
    try {
      action.original = Fragment::parse(item["original"].get<std::string>());
      action.replacement = Fragment::parse(item["replacement"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw JsonError(std::string("bad action fields: ") + e.what());
    }
    if (item.contains("attachment_atoms") && !item["attachment_atoms"].is_null()) {
      if (!item["attachment_atoms"].is_array())
        throw JsonError("\"attachment_atoms\" must be an array");
      for (const auto& v : item["attachment_atoms"])
        action.attachment_atoms.push_back(v.get<int>());
    }
    if (action.original.arity() != action.replacement.arity())
      throw ArityMismatch("action sides disagree on attachment count");
    script.actions.push_back(std::move(action));
  }
  if (script.actions.empty()) throw JsonError("script JSON has no actions");
  return script;
}

std::string script_to_json(const EditScript& script) {
  nlohmann::json actions = nlohmann::json::array();
  for (const EditAction& a : script.actions) {
    nlohmann::json item;
    item["original"] = a.original.smiles();
    if (!a.attachment_atoms.empty()) item["attachment_atoms"] = a.attachment_atoms;
    item["replacement"] = a.replacement.smiles();
    actions.push_back(std::move(item));
  }
  return nlohmann::json{{"actions", std::move(actions)}}.dump();
}

std::string emit_rdkit_snippet(const Molecule& source, const EditScript& script) {
  std::string out;
  out += "from rdkit import Chem\n";
  out += "from rdkit.Chem import AllChem\n\n";
  out += "mol = Chem.MolFromSmiles(\"" + canonical_smiles(source) + "\")\n";
  out += "steps = [\n";
  for (const EditAction& a : script.actions)
    out += "    \"" + emit_reaction_smirks(a) + "\",\n";
  out += "]\n";
  out += "for smarts in steps:\n";
  out += "    rxn = AllChem.ReactionFromSmarts(smarts)  # ChemicalReaction\n";
  out += "    products = rxn.RunReactants((mol,))\n";
  out += "    mol = products[0][0]\n";
  out += "    Chem.SanitizeMol(mol)\n";
  out += "print(Chem.MolToSmiles(mol))\n";
  return out;
}

WrapperPayload parse_wrapper_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw JsonError(std::string("bad wrapper JSON: ") + e.what());
  }
  if (!j.is_object()) throw JsonError("wrapper payload must be an object");
  WrapperPayload payload;
  if (!j.contains("Action Description"))
    throw JsonError("wrapper payload is missing \"Action Description\"");
  const auto& desc = j["Action Description"];
  if (desc.is_string()) {
    payload.action_texts.push_back(desc.get<std::string>());
  } else if (desc.is_array()) {
    for (const auto& v : desc) {
      if (!v.is_string())
        throw JsonError("\"Action Description\" entries must be strings");
      payload.action_texts.push_back(v.get<std::string>());
    }
  } else {
    throw JsonError("\"Action Description\" must be a string or list");
  }
  if (!j.contains("Final Target Molecule") || !j["Final Target Molecule"].is_string())
    throw JsonError("wrapper payload is missing \"Final Target Molecule\"");
  payload.final_target = j["Final Target Molecule"].get<std::string>();
  return payload;
}

Molecule join_fragments(const Fragment& core, const std::vector<Fragment>& sides) {
  std::map<int, const Fragment*> side_of;
  for (const Fragment& s : sides) {
    if (s.arity() != 1)
      throw ArityMismatch("side fragments must have exactly one attachment");
    int label = s.anchor_maps()[0];
    if (!side_of.emplace(label, &s).second)
      throw ArityMismatch("two side fragments share label " + std::to_string(label));
  }
  auto core_maps = core.anchor_maps();
  if (core_maps.size() != sides.size())
    throw ArityMismatch("core arity " + std::to_string(core_maps.size()) +
                        " vs " + std::to_string(sides.size()) + " side fragments");

  Molecule out;
  const Molecule& cm = core.mol();
  std::vector<int> core_to_new(cm.num_atoms(), -1);
  for (size_t i = 0; i < cm.num_atoms(); ++i) {
    if (cm.atoms[i].atomic_num == kDummyAtom) continue;
    Atom a = cm.atoms[i];
    core_to_new[i] = out.add_atom(a);
  }
  for (const Bond& b : cm.bonds)
    if (core_to_new[b.a] >= 0 && core_to_new[b.b] >= 0)
      out.add_bond(core_to_new[b.a], core_to_new[b.b], b.order);

  for (int label : core_maps) {
    auto it = side_of.find(label);
    if (it == side_of.end())
      throw ArityMismatch("no side fragment for label " + std::to_string(label));
    const Molecule& sm = it->second->mol();
    std::vector<int> side_to_new(sm.num_atoms(), -1);
    for (size_t i = 0; i < sm.num_atoms(); ++i) {
      if (sm.atoms[i].atomic_num == kDummyAtom) continue;
      side_to_new[i] = out.add_atom(sm.atoms[i]);
    }
    for (const Bond& b : sm.bonds)
      if (side_to_new[b.a] >= 0 && side_to_new[b.b] >= 0)
        out.add_bond(side_to_new[b.a], side_to_new[b.b], b.order);

    int core_dummy = core.dummy_for_map(label);
    auto [core_nbr, cbi] = cm.adj[core_dummy][0];
    int side_dummy = it->second->dummy_atoms()[0];
    auto [side_nbr, sbi] = sm.adj[side_dummy][0];
    if (cm.bonds[cbi].order != sm.bonds[sbi].order)
      throw ArityMismatch("anchor bond orders disagree for label " +
                          std::to_string(label));
    out.add_bond(core_to_new[core_nbr], side_to_new[side_nbr], cm.bonds[cbi].order);
  }
  return perceive(std::move(out));
}

}  // namespace moledit
