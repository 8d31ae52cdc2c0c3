#pragma once

#include <stdexcept>
#include <string>

namespace moledit {

// Base for every error thrown by the library.  CLI maps these to exit code 1;
// anything else escaping is a bug.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input text that does not lex/parse.  `pos` is a byte offset into the
// offending string, or npos when the location is unknown.
class SyntaxError : public Error {
public:
  static constexpr size_t npos = static_cast<size_t>(-1);

  SyntaxError(const std::string& msg, size_t pos = npos)
      : Error(pos == npos ? msg : msg + " (at position " + std::to_string(pos) + ")"),
        pos_(pos) {}

  size_t pos() const noexcept { return pos_; }

private:
  size_t pos_;
};

// Structurally valid molecule whose bonding exceeds what the element allows.
class ValenceError : public Error {
public:
  using Error::Error;
};

// Aromatic subgraph that admits no alternating single/double assignment.
class KekulizationError : public Error {
public:
  using Error::Error;
};

// Pattern text using primitives outside the supported subset.
class UnsupportedPrimitive : public Error {
public:
  using Error::Error;
};

// Edit action text that does not follow the replace-grammar.
class ActionSyntaxError : public Error {
public:
  using Error::Error;
};

// Original and replacement fragments disagree on attachment count.
class ArityMismatch : public Error {
public:
  using Error::Error;
};

// Edit whose original fragment matches nowhere in the molecule.
class GroupNotFound : public Error {
public:
  using Error::Error;
};

// Atom numbering requested on a molecule that already carries map numbers.
class MapCollision : public Error {
public:
  using Error::Error;
};

// Malformed JSON payload, or JSON missing a required field.
class JsonError : public Error {
public:
  using Error::Error;
};

// Reaction SMILES that cannot be split or whose sides do not parse.
class ReactionParseError : public Error {
public:
  using Error::Error;
};

// Reaction diff where a changed region has no mapped anchor into the core.
class UnmappedAtoms : public Error {
public:
  using Error::Error;
};

// Fingerprints of different widths compared.
class WidthMismatch : public Error {
public:
  using Error::Error;
};

// Evaluation goal naming an oracle that is not registered.
class UnknownOracle : public Error {
public:
  using Error::Error;
};

// Operation on an empty record set where at least one record is required.
class EmptyInput : public Error {
public:
  using Error::Error;
};

}  // namespace moledit
