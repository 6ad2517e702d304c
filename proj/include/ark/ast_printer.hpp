#pragma once

#include <string>

#include <json.hpp>

#include "ark/ast.hpp"

namespace ark {

using ordered_json = nlohmann::ordered_json;

/// Canonical source form; reparses to a structurally identical AST.
std::string pretty_print(const SourceProgram& prog);
std::string pretty_print(const ExprPtr& expr);
std::string pretty_print(const BoolExprPtr& expr);

/// Structural dump with stable field order; spans omitted so dumps compare
/// across reformatting.
ordered_json to_json(const SourceProgram& prog);
ordered_json to_json(const ExprPtr& expr);

}  // namespace ark
