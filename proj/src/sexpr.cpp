#include "smtbridge/sexpr.hpp"

#include <cctype>

#include "smtbridge/error.hpp"

namespace smtbridge {

std::string location_string(const SourceLoc& loc) {
  return "line " + std::to_string(loc.line) + ", column " + std::to_string(loc.column);
}

std::string SExpr::str() const {
  switch (kind) {
    case Kind::kAtom:
      return text;
    case Kind::kString: {
      std::string out = "\"";
      for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case Kind::kList: {
      std::string out = "(";
      for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ' ';
        out += items[i].str();
      }
      return out + ")";
    }
  }
  return {};
}

namespace {

class Reader {
 public:
  Reader(std::string_view src, const ReadOptions& options) : src_(src), opt_(options) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> forms;
    skip_space();
    while (!at_end()) {
      forms.push_back(read());
      skip_space();
    }
    return forms;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++loc_.line;
      loc_.column = 1;
    } else {
      ++loc_.column;
    }
    return c;
  }

  [[noreturn]] void fail(const SourceLoc& at, const std::string& what) const {
    throw Error(ErrorKind::kParse, what + " at " + location_string(at));
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (opt_.block_comments && c == '#' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '|') {
        SourceLoc start = loc_;
        advance();
        advance();
        while (true) {
          if (at_end()) fail(start, "unterminated block comment");
          if (peek() == '|' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '#') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        break;
      }
    }
  }

  static bool is_delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '"' ||
           c == ';' || c == '\'';
  }

  SExpr read() {
    skip_space();
    if (at_end()) fail(loc_, "unexpected end of input");
    SourceLoc start = loc_;
    char c = peek();
    if (c == ')') fail(start, "unbalanced ')'");
    if (c == '(') {
      advance();
      SExpr list;
      list.kind = SExpr::Kind::kList;
      list.loc = start;
      while (true) {
        skip_space();
        if (at_end()) fail(start, "unbalanced '(' (no matching ')')");
        if (peek() == ')') {
          advance();
          break;
        }
        list.items.push_back(read());
      }
      return list;
    }
    if (c == '\'') {
      advance();
      SExpr quoted;
      quoted.kind = SExpr::Kind::kList;
      quoted.loc = start;
      SExpr head;
      head.kind = SExpr::Kind::kAtom;
      head.text = "quote";
      head.loc = start;
      quoted.items.push_back(std::move(head));
      skip_space();
      if (at_end()) fail(start, "quote with nothing after it");
      quoted.items.push_back(read());
      return quoted;
    }
    if (c == '"') {
      advance();
      SExpr s;
      s.kind = SExpr::Kind::kString;
      s.loc = start;
      while (true) {
        if (at_end()) fail(start, "unterminated string");
        char d = advance();
        if (d == '"') break;
        if (d == '\\') {
          if (at_end()) fail(start, "unterminated string");
          d = advance();
        }
        s.text += d;
      }
      return s;
    }
    SExpr atom;
    atom.kind = SExpr::Kind::kAtom;
    atom.loc = start;
    bool in_bars = false;  // |quoted symbol| as printed by solvers
    while (!at_end() && (in_bars || !is_delimiter(peek()))) {
      char d = advance();
      if (d == '|') in_bars = !in_bars;
      atom.text += opt_.fold_case && !in_bars
                       ? static_cast<char>(std::tolower(static_cast<unsigned char>(d)))
                       : d;
    }
    if (in_bars) fail(start, "unterminated |symbol|");
    return atom;
  }

  std::string_view src_;
  ReadOptions opt_;
  size_t pos_ = 0;
  SourceLoc loc_;
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view source, const ReadOptions& options) {
  return Reader(source, options).read_all();
}

}  // namespace smtbridge
