#pragma once

#include <string_view>

#include "ark/ast.hpp"
#include "ark/diag.hpp"

namespace ark {

/// Parses a full Ark program (language + function definitions). Never throws;
/// syntax errors are recorded in `diags` and parsing resumes at the next
/// top-level statement. An empty input yields an empty program.
SourceProgram parse(std::string_view source, DiagnosticList& diags);

/// Parses a standalone expression (used to rehydrate lambda bodies from JSON
/// graph dumps). Returns nullptr and records a diagnostic on failure.
ExprPtr parse_expression(std::string_view source, DiagnosticList& diags);

}  // namespace ark
