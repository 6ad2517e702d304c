#include "ark/sema.hpp"

#include <map>
#include <set>

#include "ark/builtins.hpp"

namespace ark {

namespace {

const char* kind_name(SigTypeAst::Kind k) {
    switch (k) {
        case SigTypeAst::Kind::Real: return "real";
        case SigTypeAst::Kind::Int: return "int";
        case SigTypeAst::Kind::Lambda: return "lambd";
    }
    return "?";
}

struct FuncChecker {
    const FuncDefAst& func;
    const LanguageRegistry& reg;
    DiagnosticList& diags;
    LanguagePtr lang;

    std::map<std::string, std::string> node_types;  // declared node -> type
    std::map<std::string, std::string> edge_types;  // declared edge -> type
    // completeness bookkeeping
    std::map<std::string, std::set<std::string>> attrs_set;
    std::map<std::string, std::set<long long>> inits_set;

    void err(Span s, std::string msg) {
        diags.error(s, "function '" + func.name + "': " + std::move(msg));
    }

    const SigTypeAst* arg_decl(const std::string& name) {
        for (const auto& a : func.args)
            if (a.name == name) return &a.type;
        return nullptr;
    }

    /// Checks a literal/argument value against a declared slot type.
    void check_value(const FuncValAst& v, const SigTypeAst& decl, const std::string& where,
                     Span span) {
        if (const auto* arg = std::get_if<std::string>(&v.value)) {
            const auto* at = arg_decl(*arg);
            if (!at) {
                err(span, where + " references unknown argument '" + *arg + "'");
                return;
            }
            if (decl.is_const) {
                err(span, where + " is a const slot and cannot be set from argument '" + *arg +
                              "' (an argument value is not const)");
                return;
            }
            const bool numeric_ok = decl.kind == SigTypeAst::Kind::Real &&
                                    at->kind == SigTypeAst::Kind::Int;
            if (at->kind != decl.kind && !numeric_ok)
                err(span, where + " expects " + std::string(kind_name(decl.kind)) +
                              " but argument '" + *arg + "' is " + kind_name(at->kind));
            return;
        }
        switch (decl.kind) {
            case SigTypeAst::Kind::Real:
                if (!std::holds_alternative<double>(v.value) &&
                    !std::holds_alternative<long long>(v.value))
                    err(span, where + " expects a real value");
                break;
            case SigTypeAst::Kind::Int:
                if (!std::holds_alternative<long long>(v.value))
                    err(span, where + " expects an integer value");
                break;
            case SigTypeAst::Kind::Lambda: {
                const auto* lam = std::get_if<Expr::Lambda>(&v.value);
                if (!lam) {
                    err(span, where + " expects a lambda value");
                } else if (lam->params.size() != decl.params.size()) {
                    err(span, where + " expects a lambda of arity " +
                                  std::to_string(decl.params.size()));
                }
                break;
            }
        }
    }

    void check_guard_expr(const ExprPtr& e, Span span);

    void check_guard(const BoolExprPtr& b, Span span) {
        if (!b) return;
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
                    check_guard_expr(n.lhs, span);
                    check_guard_expr(n.rhs, span);
                } else if constexpr (std::is_same_v<T, BoolExpr::And> ||
                                     std::is_same_v<T, BoolExpr::Or>) {
                    check_guard(n.lhs, span);
                    check_guard(n.rhs, span);
                } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
                    check_guard(n.operand, span);
                }
            },
            b->node);
    }

    void declare(const FuncStAst::Node& n, Span span) {
        if (node_types.count(n.name) || edge_types.count(n.name)) {
            err(span, "duplicate name '" + n.name + "'");
            return;
        }
        if (!lang->has_node_type(n.type)) {
            err(span, "unknown node type '" + n.type + "'");
            return;
        }
        node_types[n.name] = n.type;
    }

    void declare(const FuncStAst::Edge& e, Span span) {
        if (node_types.count(e.name) || edge_types.count(e.name)) {
            err(span, "duplicate name '" + e.name + "'");
            return;
        }
        if (!lang->has_edge_type(e.type)) {
            err(span, "unknown edge type '" + e.type + "'");
            return;
        }
        for (const auto* ep : {&e.src, &e.dst})
            if (!node_types.count(*ep)) err(span, "edge endpoint '" + *ep + "' is not a node");
        edge_types[e.name] = e.type;
    }

    void apply(const FuncStAst::SetAttr& s, Span span) {
        const std::map<std::string, SigTypeAst>* attrs = nullptr;
        std::string type_name;
        if (auto it = node_types.find(s.owner); it != node_types.end()) {
            attrs = &lang->node_types.at(it->second).attributes;
            type_name = it->second;
        } else if (auto jt = edge_types.find(s.owner); jt != edge_types.end()) {
            attrs = &lang->edge_types.at(jt->second).attributes;
            type_name = jt->second;
        } else {
            err(span, "unknown node or edge '" + s.owner + "'");
            return;
        }
        auto at = attrs->find(s.attr);
        if (at == attrs->end()) {
            err(span, "type '" + type_name + "' has no attribute '" + s.attr + "'");
            return;
        }
        check_value(s.value, at->second, "attribute '" + s.owner + "." + s.attr + "'", span);
        attrs_set[s.owner].insert(s.attr);
    }

    void apply(const FuncStAst::SetInit& s, Span span) {
        auto it = node_types.find(s.node);
        if (it == node_types.end()) {
            err(span, "unknown node '" + s.node + "'");
            return;
        }
        const auto& def = lang->node_types.at(it->second);
        if (s.index < 0 || s.index >= static_cast<long long>(def.init_slots.size())) {
            err(span, "init index " + std::to_string(s.index) + " outside [0, " +
                          std::to_string(def.order) + ") for node '" + s.node + "'");
            return;
        }
        check_value(s.value, def.init_slots[static_cast<size_t>(s.index)],
                    "initial value '" + s.node + "(" + std::to_string(s.index) + ")'", span);
        inits_set[s.node].insert(s.index);
    }

    void apply(const FuncStAst::SetSwitch& s, Span span) {
        auto it = edge_types.find(s.edge);
        if (it == edge_types.end()) {
            err(span, "unknown edge '" + s.edge + "'");
            return;
        }
        if (lang->edge_types.at(it->second).fixed)
            err(span, "edge '" + s.edge + "' has a fixed type and admits no switch statement");
        check_guard(s.guard, span);
    }

    void check_completeness() {
        for (const auto& [name, type] : node_types) {
            const auto& def = lang->node_types.at(type);
            for (const auto& [aname, decl] : def.attributes) {
                (void)decl;
                if (!attrs_set[name].count(aname))
                    err(func.span, "node '" + name + "' leaves attribute '" + aname + "' unset");
            }
            for (long long i = 0; i < static_cast<long long>(def.init_slots.size()); ++i)
                if (!inits_set[name].count(i))
                    err(func.span, "node '" + name + "' leaves initial value " +
                                       std::to_string(i) + " unset");
        }
        for (const auto& [name, type] : edge_types) {
            for (const auto& [aname, decl] : lang->edge_types.at(type).attributes) {
                (void)decl;
                if (!attrs_set[name].count(aname))
                    err(func.span, "edge '" + name + "' leaves attribute '" + aname + "' unset");
            }
        }
    }

    void run() {
        lang = reg.find(func.language);
        if (!lang) {
            err(func.span, "uses unknown language '" + func.language + "'");
            return;
        }
        std::set<std::string> seen_args;
        for (const auto& a : func.args) {
            if (!seen_args.insert(a.name).second)
                err(a.span, "duplicate argument '" + a.name + "'");
            if (a.type.kind == SigTypeAst::Kind::Real && a.type.x0 > a.type.x1)
                err(a.span, "argument '" + a.name + "' has an empty range");
            if (a.type.kind == SigTypeAst::Kind::Int && a.type.i0 > a.type.i1)
                err(a.span, "argument '" + a.name + "' has an empty range");
        }
        for (const auto& st : func.body)
            std::visit([&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, FuncStAst::Node> ||
                              std::is_same_v<T, FuncStAst::Edge>)
                    declare(n, st.span);
                else
                    apply(n, st.span);
            }, st.node);
        check_completeness();
    }
};

void FuncChecker::check_guard_expr(const ExprPtr& e, Span span) {
    if (!e) return;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Ident>) {
                if (!arg_decl(n.name))
                    err(span, "switch guards may only reference function arguments; '" + n.name +
                                  "' is not one");
            } else if constexpr (std::is_same_v<T, Expr::AttrRef>) {
                // dotted argument names arrive as attribute references
                if (!arg_decl(n.owner + "." + n.attr))
                    err(span, "switch guards may only reference function arguments; '" + n.owner +
                                  "." + n.attr + "' is not one");
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                err(span, "switch guards cannot reference node state");
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                check_guard_expr(n.operand, span);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                check_guard_expr(n.lhs, span);
                check_guard_expr(n.rhs, span);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                const auto* id = std::get_if<Expr::Ident>(&n.callee->node);
                if (!id || !builtin_by_name(id->name))
                    err(span, "switch guards may only call builtin functions");
                for (const auto& a : n.args) check_guard_expr(a, span);
            } else if constexpr (std::is_same_v<T, Expr::If>) {
                check_guard(n.cond, span);
                check_guard_expr(n.then_e, span);
                check_guard_expr(n.else_e, span);
            } else if constexpr (std::is_same_v<T, Expr::Lambda>) {
                err(span, "switch guards cannot contain lambdas");
            }
        },
        e->node);
}

}  // namespace

void check_function(const FuncDefAst& func, const LanguageRegistry& reg, DiagnosticList& diags) {
    FuncChecker{func, reg, diags, nullptr, {}, {}, {}, {}}.run();
}

bool check_program(const SourceProgram& prog, LanguageRegistry& reg, DiagnosticList& diags) {
    const size_t before = diags.items().size();
    for (const auto& st : prog.statements) {
        if (const auto* l = std::get_if<LangDefAst>(&st.node)) {
            if (reg.find(l->name)) {
                diags.error(st.span, "language '" + l->name + "' is already defined");
                continue;
            }
            if (auto lang = resolve_language(*l, reg, diags)) reg.add(lang);
        }
    }
    for (const auto& st : prog.statements)
        if (const auto* f = std::get_if<FuncDefAst>(&st.node)) check_function(*f, reg, diags);
    for (size_t i = before; i < diags.items().size(); ++i)
        if (diags.items()[i].severity == Severity::Error) return false;
    return true;
}

}  // namespace ark
