#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ark/diag.hpp"

namespace ark {

struct Expr;
struct BoolExpr;
using ExprPtr = std::shared_ptr<const Expr>;
using BoolExprPtr = std::shared_ptr<const BoolExpr>;

enum class UnaryOp { Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

/// Real-valued expression tree. Identifiers are resolved later against the
/// enclosing scope (production-rule bindings, function arguments, lambda
/// parameters).
struct Expr {
    struct RealLit {
        double value;
    };
    struct IntLit {
        long long value;
    };
    struct Ident {
        std::string name;
    };
    struct AttrRef {
        std::string owner;
        std::string attr;
    };
    struct Time {};
    struct Var {
        std::string node;
    };
    struct Unary {
        UnaryOp op;
        ExprPtr operand;
    };
    struct Binary {
        BinaryOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    /// Builtin call `sin(x)` or lambda-attribute application `n.fn(time)`.
    struct Call {
        ExprPtr callee;  // Ident (builtin) or AttrRef (lambda attribute)
        std::vector<ExprPtr> args;
    };
    struct If {
        BoolExprPtr cond;
        ExprPtr then_e;
        ExprPtr else_e;
    };
    struct Lambda {
        std::vector<std::string> params;
        ExprPtr body;
    };

    std::variant<RealLit, IntLit, Ident, AttrRef, Time, Var, Unary, Binary, Call, If, Lambda> node;
    Span span;
};

struct BoolExpr {
    struct BoolLit {
        bool value;
    };
    struct Cmp {
        CmpOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct And {
        BoolExprPtr lhs;
        BoolExprPtr rhs;
    };
    struct Or {
        BoolExprPtr lhs;
        BoolExprPtr rhs;
    };
    struct Not {
        BoolExprPtr operand;
    };

    std::variant<BoolLit, Cmp, And, Or, Not> node;
    Span span;
};

inline ExprPtr make_expr(decltype(Expr::node) n, Span s = {}) {
    auto e = std::make_shared<Expr>();
    e->node = std::move(n);
    e->span = s;
    return e;
}
inline BoolExprPtr make_bool(decltype(BoolExpr::node) n, Span s = {}) {
    auto e = std::make_shared<BoolExpr>();
    e->node = std::move(n);
    e->span = s;
    return e;
}

/// Signal datatype: bounded real (optionally mismatch-annotated), bounded
/// integer, or lambda of fixed arity. `is_const` marks non-programmable slots.
struct SigTypeAst {
    enum class Kind { Real, Int, Lambda } kind = Kind::Real;
    double x0 = 0, x1 = 0;          // Real bounds
    long long i0 = 0, i1 = 0;       // Int bounds
    std::vector<std::string> params;  // Lambda parameter names
    bool has_mismatch = false;
    double s0 = 0, s1 = 0;
    bool is_const = false;
    Span span;
};

struct AttrDeclAst {
    std::string name;  // empty for init slots
    bool is_init = false;
    long long init_index = 0;
    SigTypeAst type;
    Span span;
};

enum class Reduction { Sum, Mul };

struct NodeTypeAst {
    std::string name;
    long long order = 0;
    Reduction reduction = Reduction::Sum;
    std::optional<std::string> parent;
    std::vector<AttrDeclAst> decls;
    Span span;
};

struct EdgeTypeAst {
    std::string name;
    bool fixed = false;
    std::optional<std::string> parent;
    std::vector<AttrDeclAst> decls;
    Span span;
};

/// prod(e:ET, s:ST -> t:DT) target <= expr [off]
struct ProdRuleAst {
    std::string edge_binding, edge_type;
    std::string src_binding, src_type;
    std::string dst_binding, dst_type;
    std::string target;  // must equal src_binding or dst_binding
    ExprPtr expr;
    bool off = false;
    Span span;
};

struct VAtom {
    bool infinite = false;
    long long value = 0;
};

enum class MatchDir { Outgoing, Incoming, Any };

struct MatchClauseAst {
    VAtom lo, hi;
    std::string edge_type;
    MatchDir dir = MatchDir::Any;
    std::vector<std::string> peer_types;  // empty for Any form
    std::string node_binding;             // for directed forms; must equal cstr binding
    Span span;
};

struct ValPatternAst {
    bool accept = true;  // acc vs rej
    std::vector<MatchClauseAst> clauses;
    Span span;
};

struct CstrRuleAst {
    std::string node_binding;
    std::string node_type;
    std::vector<ValPatternAst> patterns;
    Span span;
};

struct LangStAst {
    std::variant<NodeTypeAst, EdgeTypeAst, ProdRuleAst, CstrRuleAst,
                 std::string /* extern-func name */>
        node;
    Span span;
};

struct LangDefAst {
    std::string name;
    std::optional<std::string> parent;
    std::vector<LangStAst> statements;
    Span span;
};

/// Function-body statement forms. `FuncValAst` is a literal, a lambda literal,
/// or a reference to a function argument.
struct FuncValAst {
    std::variant<double, long long, Expr::Lambda, std::string> value;
    Span span;
};

struct FuncStAst {
    struct Node {
        std::string name, type;
    };
    struct Edge {
        std::string src, dst, name, type;
    };
    struct SetAttr {
        std::string owner, attr;
        FuncValAst value;
    };
    struct SetInit {
        std::string node;
        long long index;
        FuncValAst value;
    };
    struct SetSwitch {
        std::string edge;
        BoolExprPtr guard;
    };
    std::variant<Node, Edge, SetAttr, SetInit, SetSwitch> node;
    Span span;
};

struct FuncArgAst {
    std::string name;  // may be dotted per grammar
    SigTypeAst type;
    Span span;
};

struct FuncDefAst {
    std::string name;
    std::string language;
    std::vector<FuncArgAst> args;
    std::vector<FuncStAst> body;
    Span span;
};

struct StmtAst {
    std::variant<LangDefAst, FuncDefAst> node;
    Span span;
};

struct SourceProgram {
    std::vector<StmtAst> statements;
};

}  // namespace ark
