#pragma once

#include "wmdp/model.hpp"

#include <string>

namespace wmdp {

// Line format:
//   state <name>
//   <state> <action> <weight> : <target> <p/q> [,] <target> <p/q> ...
//   # comment
Mdp parse_model_text(const std::string& text);
Mdp parse_model(const std::string& path);

std::string write_model(const Mdp& m);

}  // namespace wmdp
