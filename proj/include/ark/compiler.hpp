#pragma once

#include <string>
#include <vector>

#include "ark/builtins.hpp"
#include "ark/graph.hpp"
#include "ark/lang.hpp"

namespace ark {

/// Flattened runtime expression node; children referenced by pool index so
/// evaluation is allocation-free.
struct RtExpr {
    enum class Op {
        Const,   // cval
        State,   // state variable index
        Alg,     // algebraic node slot
        Time,
        Neg, Add, Sub, Mul, Div, Pow,
        Call,    // builtin over kids
        If,      // kids = {cond, then, else}; cond is a boolean-valued entry
        Cmp,     // cmp over kids[0], kids[1] -> 0/1
        And, Or, Not,
    };
    Op op = Op::Const;
    double cval = 0;
    int index = 0;          // State/Alg slot
    Builtin builtin = Builtin::Sin;
    CmpOp cmp = CmpOp::Eq;
    std::vector<int> kids;
};

struct StateVar {
    std::string node;
    int deriv = 0;
    [[nodiscard]] std::string display() const {
        return deriv == 0 ? node : node + "(" + std::to_string(deriv) + ")";
    }
};

/// Compiled form of Eq. 1: low-order chain equations plus one aggregated
/// equation per node, with order-0 nodes as pre-evaluated algebraic slots.
class OdeSystem {
public:
    std::vector<StateVar> vars;
    std::vector<double> initial;
    std::vector<std::string> alg_nodes;  // evaluation order (topologically sorted)

    struct Workspace {
        std::vector<double> alg;
    };
    [[nodiscard]] Workspace make_workspace() const { return {std::vector<double>(alg_nodes.size())}; }

    /// dy/dt at (state, t); throws ArkError naming the variable on a
    /// non-finite result.
    void eval_rhs(const double* state, double t, double* deriv, Workspace& ws) const;
    void eval_rhs(const std::vector<double>& state, double t, std::vector<double>& deriv,
                  Workspace& ws) const {
        deriv.resize(vars.size());
        eval_rhs(state.data(), t, deriv.data(), ws);
    }

    [[nodiscard]] int var_index(const std::string& node, int deriv = 0) const;  // -1 if absent

    // internal layout, exposed for printing/tests
    std::vector<RtExpr> pool;
    std::vector<int> rhs;       // per state var: pool root
    std::vector<int> alg_expr;  // per algebraic node: pool root

private:
    double eval(int idx, const double* state, double t, const Workspace& ws) const;
    friend std::string pretty_equations(const OdeSystem&);
};

/// Translates a validated graph into an OdeSystem (production-rule dispatch,
/// rewriting, attribute folding, reduction aggregation).
OdeSystem compile(const DynamicalGraph& g, const LanguageDef& lang);

/// One line per state variable plus one per algebraic node, canonical order.
std::string pretty_equations(const OdeSystem& sys);

/// JSON description: state-variable order, initial vector, equation text.
std::string system_json(const OdeSystem& sys);

}  // namespace ark
