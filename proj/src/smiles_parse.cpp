#include <cctype>
#include <map>
#include <sstream>

#include "moledit/lineio.hpp"
#include "parse_internal.hpp"

namespace moledit {
namespace detail {

namespace {

struct Cursor {
  const std::string& s;
  size_t p = 0;
  bool done() const { return p >= s.size(); }
  char peek() const { return p < s.size() ? s[p] : '\0'; }
  char peek2() const { return p + 1 < s.size() ? s[p + 1] : '\0'; }
  char take() { return s[p++]; }
};

int parse_digits(Cursor& c, int max_digits) {
  int v = 0, n = 0;
  while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek())) &&
         n < max_digits) {
    v = v * 10 + (c.take() - '0');
    ++n;
  }
  return n == 0 ? -1 : v;
}

// Element symbol inside brackets: explicit, longest match wins.
// Lowercase single/double letters are the aromatic spellings.
int bracket_element(Cursor& c, bool& aromatic) {
  char ch = c.peek();
  if (ch == '*') {
    c.take();
    aromatic = false;
    return -1;  // wildcard sentinel
  }
  if (std::isupper(static_cast<unsigned char>(ch))) {
    // Two-letter first: [Cl] is chlorine, not carbon + stray 'l'.
    if (std::islower(static_cast<unsigned char>(c.peek2()))) {
      std::string two{ch, c.peek2()};
      int z = atomic_number(two);
      if (z > 0) {
        c.take();
        c.take();
        aromatic = false;
        return z;
      }
    }
    int z = atomic_number(std::string(1, ch));
    if (z > 0) {
      c.take();
      aromatic = false;
      return z;
    }
    return 0;
  }
  if (std::islower(static_cast<unsigned char>(ch))) {
    if (ch == 's' && c.peek2() == 'e') {
      c.take(); c.take();
      aromatic = true;
      return 34;
    }
    if (ch == 'a' && c.peek2() == 's') {
      c.take(); c.take();
      aromatic = true;
      return 33;
    }
    static const std::string kBare = "bcnops";
    if (kBare.find(ch) != std::string::npos) {
      c.take();
      aromatic = true;
      char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      return atomic_number(std::string(1, up));
    }
  }
  return 0;
}

RawAtom parse_bracket_atom(Cursor& c, ParseMode mode, bool& stereo) {
  RawAtom atom;
  atom.pos = c.p;
  atom.bracket = true;
  c.take();  // '['
  int iso = parse_digits(c, 3);
  if (iso >= 0) {
    atom.isotope = iso;
    atom.isotope_seen = true;
  }

  bool arom = false;
  int z = bracket_element(c, arom);
  if (z == 0) {
    if (mode == ParseMode::Pattern)
      throw UnsupportedPrimitive("unsupported pattern primitive '" +
                                 std::string(1, c.peek()) + "'");
    throw SyntaxError("unknown element symbol", c.p);
  }
  if (z < 0) {
    atom.wildcard = true;
    atom.atomic_num = kDummyAtom;
  } else {
    atom.atomic_num = static_cast<int16_t>(z);
    atom.aromatic = arom;
  }

  while (!c.done() && c.peek() != ']') {
    char ch = c.peek();
    if (ch == '@') {
      c.take();
      if (c.peek() == '@') c.take();
      stereo = true;
    } else if (ch == 'H') {
      c.take();
      int h = parse_digits(c, 2);
      atom.hcount = h < 0 ? 1 : h;
    } else if (ch == '+' || ch == '-') {
      c.take();
      int sign = ch == '+' ? 1 : -1;
      int mag = parse_digits(c, 2);
      if (mag < 0) {
        mag = 1;
        while (c.peek() == ch) {
          c.take();
          ++mag;
        }
      }
      atom.charge = sign * mag;
      atom.charge_seen = true;
    } else if (ch == ':') {
      c.take();
      int map = parse_digits(c, 5);
      if (map < 0) throw SyntaxError("atom map expects digits", c.p);
      atom.map = map;
    } else if (ch == ';') {
      if (mode == ParseMode::Molecule)
        throw SyntaxError("';' is not valid in plain SMILES", c.p);
      c.take();
      bool negate = false;
      if (c.peek() == '!') {
        c.take();
        negate = true;
      }
      if (c.peek() == 'R') {
        c.take();
        if (std::isdigit(static_cast<unsigned char>(c.peek())))
          throw UnsupportedPrimitive("ring-count primitive is not supported");
        atom.ring_constraint = negate ? 0 : 1;
      } else {
        throw UnsupportedPrimitive("unsupported constraint ';" +
                                   std::string(negate ? "!" : "") +
                                   std::string(1, c.peek()) + "'");
      }
    } else if (ch == ',' || ch == '&') {
      if (mode == ParseMode::Pattern)
        throw UnsupportedPrimitive(
            "only ';' conjunction is supported in patterns");
      throw SyntaxError("unexpected character in bracket atom", c.p);
    } else if (ch == '$' || ch == '#' || ch == 'D' || ch == 'X' || ch == 'v' ||
               ch == 'R' || ch == '!') {
      if (mode == ParseMode::Pattern)
        throw UnsupportedPrimitive("unsupported pattern primitive '" +
                                   std::string(1, ch) + "'");
      throw SyntaxError("unexpected character in bracket atom", c.p);
    } else {
      throw SyntaxError("unexpected character in bracket atom", c.p);
    }
  }
  if (c.done()) throw SyntaxError("unterminated bracket atom", atom.pos);
  c.take();  // ']'
  return atom;
}

// Bare (unbracketed) atom: organic subset or aromatic lowercase or '*'.
bool parse_bare_atom(Cursor& c, ParseMode mode, RawAtom& atom) {
  char ch = c.peek();
  atom.pos = c.p;
  if (ch == '*') {
    c.take();
    atom.wildcard = true;
    atom.atomic_num = kDummyAtom;
    return true;
  }
  if (ch == 'C' && c.peek2() == 'l') {
    c.take(); c.take();
    atom.atomic_num = 17;
    return true;
  }
  if (ch == 'B' && c.peek2() == 'r') {
    c.take(); c.take();
    atom.atomic_num = 35;
    return true;
  }
  static const std::string kOrganic = "BCNOPSFI";
  if (kOrganic.find(ch) != std::string::npos) {
    c.take();
    atom.atomic_num = static_cast<int16_t>(atomic_number(std::string(1, ch)));
    return true;
  }
  static const std::string kAromatic = "bcnops";
  if (kAromatic.find(ch) != std::string::npos) {
    c.take();
    char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    atom.atomic_num = static_cast<int16_t>(atomic_number(std::string(1, up)));
    atom.aromatic = 1;
    return true;
  }
  if (mode == ParseMode::Pattern && (ch == 'a' || ch == 'A'))
    throw UnsupportedPrimitive("aromatic wildcard is not supported");
  return false;
}

}  // namespace

RawMol parse_raw(const std::string& text, ParseMode mode) {
  RawMol mol;
  Cursor c{text};
  std::vector<int> branch_stack;
  int prev = -1;
  char pending_bond = 0;
  size_t pending_pos = 0;
  bool bond_pending = false;
  struct RingSlot { int atom; char sym; size_t pos; };
  std::map<int, RingSlot> open_rings;

  auto link = [&](int from, int to, char sym, size_t pos) {
    mol.bonds.push_back(RawBond{from, to, sym, pos});
  };
  auto close_ring = [&](int number, size_t pos) {
    if (prev < 0) throw SyntaxError("ring closure before any atom", pos);
    char sym = 0;
    if (bond_pending) {
      sym = pending_bond;
      bond_pending = false;
    }
    auto it = open_rings.find(number);
    if (it == open_rings.end()) {
      open_rings.emplace(number, RingSlot{prev, sym, pos});
      return;
    }
    RingSlot slot = it->second;
    open_rings.erase(it);
    if (slot.atom == prev) throw SyntaxError("ring closure to the same atom", pos);
    char merged = slot.sym;
    if (sym != 0) {
      if (merged != 0 && merged != sym)
        throw SyntaxError("conflicting ring closure bond", pos);
      merged = sym;
    }
    link(slot.atom, prev, merged, slot.pos);
  };

  while (!c.done()) {
    char ch = c.peek();
    if (ch == '-' || ch == '=' || ch == '#' || ch == ':' || ch == '/' ||
        ch == '\\' || ch == '~') {
      if (ch == '~' && mode != ParseMode::Pattern)
        throw SyntaxError("'~' is not a SMILES bond", c.p);
      if (bond_pending) throw SyntaxError("two consecutive bond symbols", c.p);
      if (prev < 0) throw SyntaxError("bond symbol before any atom", c.p);
      if (ch == '/' || ch == '\\') {
        mol.stereo_seen = true;
        ch = '-';
      }
      pending_bond = ch;
      pending_pos = c.p;
      bond_pending = true;
      c.take();
      continue;
    }
    if (ch == '(') {
      if (prev < 0) throw SyntaxError("branch before any atom", c.p);
      if (bond_pending) throw SyntaxError("bond symbol before '('", c.p);
      branch_stack.push_back(prev);
      c.take();
      continue;
    }
    if (ch == ')') {
      if (branch_stack.empty()) throw SyntaxError("unmatched ')'", c.p);
      if (bond_pending) throw SyntaxError("dangling bond before ')'", c.p);
      prev = branch_stack.back();
      branch_stack.pop_back();
      c.take();
      continue;
    }
    if (ch == '.') {
      if (bond_pending) throw SyntaxError("bond symbol before '.'", c.p);
      prev = -1;
      c.take();
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      size_t pos = c.p;
      close_ring(c.take() - '0', pos);
      continue;
    }
    if (ch == '%') {
      size_t pos = c.p;
      c.take();
      int num = parse_digits(c, 2);
      if (num < 0 || c.p - pos != 3)
        throw SyntaxError("'%' ring closure expects two digits", pos);
      close_ring(num, pos);
      continue;
    }
    if (ch == '[' || std::isalpha(static_cast<unsigned char>(ch)) || ch == '*') {
      RawAtom atom;
      if (ch == '[') {
        atom = parse_bracket_atom(c, mode, mol.stereo_seen);
      } else {
        if (!parse_bare_atom(c, mode, atom))
          throw SyntaxError("unrecognized atom symbol '" + std::string(1, ch) + "'",
                            c.p);
      }
      int idx = static_cast<int>(mol.atoms.size());
      mol.atoms.push_back(atom);
      if (prev >= 0) {
        char sym = 0;
        if (bond_pending) {
          sym = pending_bond;
          bond_pending = false;
        }
        link(prev, idx, sym, atom.pos);
      } else if (bond_pending) {
        throw SyntaxError("bond with no preceding atom", pending_pos);
      }
      prev = idx;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch)))
      throw SyntaxError("whitespace inside SMILES", c.p);
    if (mode == ParseMode::Pattern && (ch == ',' || ch == '&' || ch == '$'))
      throw UnsupportedPrimitive("unsupported pattern primitive '" +
                                 std::string(1, ch) + "'");
    throw SyntaxError("unexpected character '" + std::string(1, ch) + "'", c.p);
  }
  if (bond_pending) throw SyntaxError("dangling bond at end of input", pending_pos);
  if (!branch_stack.empty()) throw SyntaxError("unclosed branch", text.size());
  if (!open_rings.empty())
    throw SyntaxError("unclosed ring closure " +
                          std::to_string(open_rings.begin()->first),
                      open_rings.begin()->second.pos);
  if (mol.atoms.empty()) throw SyntaxError("empty input", 0);
  return mol;
}

Molecule raw_to_molecule(const RawMol& raw, bool strict_bracket_h) {
  Molecule m;
  for (const RawAtom& ra : raw.atoms) {
    Atom a;
    a.atomic_num = ra.wildcard ? int16_t{kDummyAtom} : ra.atomic_num;
    a.aromatic = ra.aromatic != 0;
    a.charge = static_cast<int8_t>(ra.charge);
    a.isotope = static_cast<int16_t>(ra.isotope);
    a.map_num = ra.map;
    if (ra.wildcard)
      a.explicit_h = 0;
    else if (ra.bracket && ra.hcount < 0)
      a.explicit_h = strict_bracket_h ? int16_t{0} : int16_t{-1};
    else
      a.explicit_h = ra.bracket ? static_cast<int16_t>(ra.hcount) : int16_t{-1};
    m.add_atom(a);
  }
  for (const RawBond& rb : raw.bonds) {
    BondOrder order;
    switch (rb.sym) {
      case 0: order = BondOrder::Unspecified; break;
      case '-': order = BondOrder::Single; break;
      case '=': order = BondOrder::Double; break;
      case '#': order = BondOrder::Triple; break;
      case ':': order = BondOrder::Aromatic; break;
      default:
        throw SyntaxError("bond symbol not valid in a molecule", rb.pos);
    }
    m.add_bond(rb.a, rb.b, order);
  }
  m.stereo_stripped = raw.stereo_seen;
  return m;
}

std::vector<int8_t> ring_constraints(const RawMol& raw) {
  std::vector<int8_t> out(raw.atoms.size(), -1);
  for (size_t i = 0; i < raw.atoms.size(); ++i)
    out[i] = raw.atoms[i].ring_constraint;
  return out;
}

}  // namespace detail

Molecule parse_smiles(const std::string& text) {
  detail::RawMol raw = detail::parse_raw(text, detail::ParseMode::Molecule);
  return perceive(detail::raw_to_molecule(raw));
}

SmiReadResult read_smi(std::istream& in) {
  SmiReadResult out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream fields(line);
    SmiRecord rec;
    fields >> rec.smiles >> rec.id;
    rec.line = line_no;
    try {
      rec.mol = parse_smiles(rec.smiles);
    } catch (const Error& e) {
      ++out.skipped;
      out.errors.push_back({line_no, e.what()});
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace moledit
