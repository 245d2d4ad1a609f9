#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace smtbridge {

struct SourceLoc {
  int line = 1;
  int column = 1;
};

// Raw s-expression as read from text. Goal files and solver output share this
// reader; only the goal side folds symbol case.
struct SExpr {
  enum class Kind { kAtom, kString, kList };

  Kind kind = Kind::kList;
  std::string text;  // atom spelling or string contents
  std::vector<SExpr> items;
  SourceLoc loc;

  bool is_atom() const { return kind == Kind::kAtom; }
  bool is_atom(std::string_view s) const { return kind == Kind::kAtom && text == s; }
  bool is_string() const { return kind == Kind::kString; }
  bool is_list() const { return kind == Kind::kList; }

  // Canonical single-line rendering.
  std::string str() const;
};

struct ReadOptions {
  bool fold_case = true;     // lower-case atoms (strings untouched)
  bool block_comments = true;  // accept #| ... |#
};

// Reads every top-level form. `'x` becomes (quote x). Throws Error(kParse) with
// line/column on unbalanced parentheses or an unterminated string.
std::vector<SExpr> read_sexprs(std::string_view source, const ReadOptions& options = {});

std::string location_string(const SourceLoc& loc);

}  // namespace smtbridge
