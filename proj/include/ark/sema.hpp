#pragma once

#include "ark/ast.hpp"
#include "ark/lang.hpp"

namespace ark {

/// Static checks for a parsed program: resolves and registers its language
/// definitions, then checks every function body against the resolved
/// languages without invoking it (no argument values needed). Errors go to
/// `diags`; returns true iff none were produced.
bool check_program(const SourceProgram& prog, LanguageRegistry& reg, DiagnosticList& diags);

/// The function-body half of check_program, usable on its own.
void check_function(const FuncDefAst& func, const LanguageRegistry& reg, DiagnosticList& diags);

}  // namespace ark
