#include "smtbridge/goal_file.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "smtbridge/error.hpp"

namespace smtbridge {

namespace {

[[noreturn]] void fail_at(const SExpr& form, const std::string& what) {
  throw Error(ErrorKind::kParse, what + " at " + location_string(form.loc));
}

bool is_name(const SExpr& s) {
  return s.is_atom() && !s.text.empty() && s.text != "t" && s.text != "nil" &&
         !std::isdigit(static_cast<unsigned char>(s.text[0]));
}

Defun parse_defun(const SExpr& form) {
  // (defun name (formals) [doc-string | (declare ...)]* body)
  if (form.items.size() < 4 || !is_name(form.items[1]) || !form.items[2].is_list()) {
    fail_at(form, "malformed defun, expected (defun name (formals) body)");
  }
  Defun def;
  def.name = form.items[1].text;
  for (const auto& f : form.items[2].items) {
    if (!is_name(f)) fail_at(f, "defun formal must be a symbol");
    def.formals.push_back(f.text);
  }
  std::set<std::string> seen(def.formals.begin(), def.formals.end());
  if (seen.size() != def.formals.size()) fail_at(form, "duplicate formal in defun " + def.name);
  def.body = expand_macros(term_from_sexpr(form.items.back()));
  VarSet stray;
  for (const auto& v : free_vars(def.body)) {
    if (!seen.count(v)) stray.insert(v);
  }
  if (!stray.empty()) {
    fail_at(form, "body of " + def.name + " mentions non-formal variable '" + *stray.begin() + "'");
  }
  return def;
}

}  // namespace

GoalFile parse_goal_file(std::string_view source, std::string id) {
  GoalFile file;
  file.id = std::move(id);
  bool have_goal = false;
  for (const auto& form : read_sexprs(source)) {
    if (!form.is_list() || form.items.empty() || !form.items[0].is_atom()) {
      fail_at(form, "expected (defun ...), (hints ...) or (goal ...)");
    }
    const std::string& head = form.items[0].text;
    if (head == "defun") {
      Defun def = parse_defun(form);
      if (file.defs.count(def.name)) fail_at(form, "duplicate defun " + def.name);
      file.def_order.push_back(def.name);
      file.defs.emplace(def.name, std::move(def));
    } else if (head == "hints") {
      if (file.hints_form) fail_at(form, "more than one (hints ...) form");
      file.hints_form = form;
    } else if (head == "goal") {
      if (have_goal) fail_at(form, "more than one (goal ...) form");
      if (form.items.size() != 2) fail_at(form, "(goal ...) takes exactly one term");
      file.goal = Goal::from_clause(expand_macros(term_from_sexpr(form.items[1])));
      have_goal = true;
    } else {
      fail_at(form, "unknown top-level form '" + head + "'");
    }
  }
  if (!have_goal) throw Error(ErrorKind::kParse, "goal file '" + file.id + "' has no (goal ...) form");
  return file;
}

GoalFile load_goal_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open goal file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_goal_file(buf.str(), path.stem().string());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

}  // namespace smtbridge
