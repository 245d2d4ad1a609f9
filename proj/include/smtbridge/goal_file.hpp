#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smtbridge/sexpr.hpp"
#include "smtbridge/term.hpp"

namespace smtbridge {

struct Defun {
  std::string name;
  std::vector<std::string> formals;
  Term body;  // macro-expanded
};

using Definitions = std::map<std::string, Defun>;

// Contents of one goal file: defuns, an optional (hints ...) form and exactly
// one (goal <term>) form.
struct GoalFile {
  std::string id;
  Definitions defs;
  std::vector<std::string> def_order;
  std::optional<SExpr> hints_form;
  Goal goal;
};

GoalFile parse_goal_file(std::string_view source, std::string id = "goal");
GoalFile load_goal_file(const std::filesystem::path& path);

}  // namespace smtbridge
