#include "ark/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include <json.hpp>

namespace ark {

int OdeSystem::var_index(const std::string& node, int deriv) const {
    for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i].node == node && vars[i].deriv == deriv) return static_cast<int>(i);
    return -1;
}

double OdeSystem::eval(int idx, const double* state, double t, const Workspace& ws) const {
    const RtExpr& e = pool[static_cast<size_t>(idx)];
    switch (e.op) {
        case RtExpr::Op::Const: return e.cval;
        case RtExpr::Op::State: return state[e.index];
        case RtExpr::Op::Alg: return ws.alg[static_cast<size_t>(e.index)];
        case RtExpr::Op::Time: return t;
        case RtExpr::Op::Neg: return -eval(e.kids[0], state, t, ws);
        case RtExpr::Op::Add: return eval(e.kids[0], state, t, ws) + eval(e.kids[1], state, t, ws);
        case RtExpr::Op::Sub: return eval(e.kids[0], state, t, ws) - eval(e.kids[1], state, t, ws);
        case RtExpr::Op::Mul: return eval(e.kids[0], state, t, ws) * eval(e.kids[1], state, t, ws);
        case RtExpr::Op::Div: return eval(e.kids[0], state, t, ws) / eval(e.kids[1], state, t, ws);
        case RtExpr::Op::Pow:
            return std::pow(eval(e.kids[0], state, t, ws), eval(e.kids[1], state, t, ws));
        case RtExpr::Op::Call: {
            double args[3] = {0, 0, 0};
            for (size_t i = 0; i < e.kids.size() && i < 3; ++i)
                args[i] = eval(e.kids[i], state, t, ws);
            return eval_builtin(e.builtin, args);
        }
        case RtExpr::Op::If:
            return eval(e.kids[0], state, t, ws) != 0.0 ? eval(e.kids[1], state, t, ws)
                                                        : eval(e.kids[2], state, t, ws);
        case RtExpr::Op::Cmp: {
            double a = eval(e.kids[0], state, t, ws), b = eval(e.kids[1], state, t, ws);
            bool r = false;
            switch (e.cmp) {
                case CmpOp::Eq: r = a == b; break;
                case CmpOp::Ne: r = a != b; break;
                case CmpOp::Lt: r = a < b; break;
                case CmpOp::Le: r = a <= b; break;
                case CmpOp::Gt: r = a > b; break;
                case CmpOp::Ge: r = a >= b; break;
            }
            return r ? 1.0 : 0.0;
        }
        case RtExpr::Op::And:
            return (eval(e.kids[0], state, t, ws) != 0.0 && eval(e.kids[1], state, t, ws) != 0.0)
                       ? 1.0 : 0.0;
        case RtExpr::Op::Or:
            return (eval(e.kids[0], state, t, ws) != 0.0 || eval(e.kids[1], state, t, ws) != 0.0)
                       ? 1.0 : 0.0;
        case RtExpr::Op::Not: return eval(e.kids[0], state, t, ws) == 0.0 ? 1.0 : 0.0;
    }
    return 0;
}

void OdeSystem::eval_rhs(const double* state, double t, double* deriv, Workspace& ws) const {
    for (size_t i = 0; i < alg_nodes.size(); ++i)
        ws.alg[i] = eval(alg_expr[i], state, t, ws);
    for (size_t i = 0; i < vars.size(); ++i) {
        deriv[i] = eval(rhs[i], state, t, ws);
        if (!std::isfinite(deriv[i]))
            throw ArkError("non-finite derivative for state variable '" + vars[i].display() +
                           "' at t=" + std::to_string(t));
    }
}

namespace {

/// Compiles production-rule expressions against one concrete edge: binding
/// substitution, attribute folding, var() mapping, lambda inlining.
class Lowering {
public:
    Lowering(OdeSystem& sys, const DynamicalGraph& g) : sys_(sys), g_(g) {}

    std::map<std::string, int> alg_slot;  // algebraic node -> slot

    int add(RtExpr e) {
        sys_.pool.push_back(std::move(e));
        return static_cast<int>(sys_.pool.size() - 1);
    }
    int constant(double v) {
        RtExpr e;
        e.op = RtExpr::Op::Const;
        e.cval = v;
        return add(std::move(e));
    }
    int binary(RtExpr::Op op, int a, int b) {
        RtExpr e;
        e.op = op;
        e.kids = {a, b};
        return add(std::move(e));
    }

    struct Scope {
        // production-rule bindings: name -> concrete graph element
        std::map<std::string, const GraphNode*> nodes;
        std::map<std::string, const GraphEdge*> edges;
        // lambda parameters inlined to already-lowered expressions
        std::map<std::string, int> params;
    };

    int lower(const ExprPtr& ex, const Scope& sc) {
        return std::visit(
            [&](const auto& n) -> int {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Expr::RealLit>) {
                    return constant(n.value);
                } else if constexpr (std::is_same_v<T, Expr::IntLit>) {
                    return constant(static_cast<double>(n.value));
                } else if constexpr (std::is_same_v<T, Expr::Ident>) {
                    auto it = sc.params.find(n.name);
                    if (it == sc.params.end())
                        throw ArkError("unbound identifier '" + n.name +
                                       "' during compilation");
                    return it->second;
                } else if constexpr (std::is_same_v<T, Expr::AttrRef>) {
                    return constant(attr_value(n.owner, n.attr, sc).as_real());
                } else if constexpr (std::is_same_v<T, Expr::Time>) {
                    RtExpr e;
                    e.op = RtExpr::Op::Time;
                    return add(std::move(e));
                } else if constexpr (std::is_same_v<T, Expr::Var>) {
                    auto it = sc.nodes.find(n.node);
                    if (it == sc.nodes.end())
                        throw ArkError("var(" + n.node + ") does not name a bound node");
                    return node_value(it->second->name);
                } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                    RtExpr e;
                    e.op = RtExpr::Op::Neg;
                    e.kids = {lower(n.operand, sc)};
                    return add(std::move(e));
                } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                    RtExpr::Op op = RtExpr::Op::Add;
                    switch (n.op) {
                        case BinaryOp::Add: op = RtExpr::Op::Add; break;
                        case BinaryOp::Sub: op = RtExpr::Op::Sub; break;
                        case BinaryOp::Mul: op = RtExpr::Op::Mul; break;
                        case BinaryOp::Div: op = RtExpr::Op::Div; break;
                        case BinaryOp::Pow: op = RtExpr::Op::Pow; break;
                    }
                    int a = lower(n.lhs, sc);
                    int b = lower(n.rhs, sc);
                    return binary(op, a, b);
                } else if constexpr (std::is_same_v<T, Expr::Call>) {
                    if (const auto* id = std::get_if<Expr::Ident>(&n.callee->node)) {
                        auto bi = builtin_by_name(id->name);
                        if (!bi) throw ArkError("unknown function '" + id->name + "'");
                        RtExpr e;
                        e.op = RtExpr::Op::Call;
                        e.builtin = *bi;
                        for (const auto& a : n.args) e.kids.push_back(lower(a, sc));
                        return add(std::move(e));
                    }
                    const auto& ar = std::get<Expr::AttrRef>(n.callee->node);
                    const Value& v = attr_value(ar.owner, ar.attr, sc);
                    if (v.kind != Value::Kind::Lambda)
                        throw ArkError("attribute '" + ar.attr + "' is not a lambda");
                    if (v.lambda_params.size() != n.args.size())
                        throw ArkError("lambda arity mismatch for '" + ar.attr + "'");
                    Scope inner = sc;
                    for (size_t i = 0; i < n.args.size(); ++i)
                        inner.params[v.lambda_params[i]] = lower(n.args[i], sc);
                    return lower(v.lambda_body, inner);
                } else if constexpr (std::is_same_v<T, Expr::If>) {
                    RtExpr e;
                    e.op = RtExpr::Op::If;
                    e.kids = {lower_bool(n.cond, sc), lower(n.then_e, sc),
                              lower(n.else_e, sc)};
                    return add(std::move(e));
                } else {
                    throw ArkError("bare lambda literal cannot appear in a compiled term");
                }
            },
            ex->node);
    }

    int lower_bool(const BoolExprPtr& ex, const Scope& sc) {
        return std::visit(
            [&](const auto& n) -> int {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, BoolExpr::BoolLit>) {
                    return constant(n.value ? 1.0 : 0.0);
                } else if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
                    RtExpr e;
                    e.op = RtExpr::Op::Cmp;
                    e.cmp = n.op;
                    e.kids = {lower(n.lhs, sc), lower(n.rhs, sc)};
                    return add(std::move(e));
                } else if constexpr (std::is_same_v<T, BoolExpr::And>) {
                    int a = lower_bool(n.lhs, sc);
                    int b = lower_bool(n.rhs, sc);
                    return binary(RtExpr::Op::And, a, b);
                } else if constexpr (std::is_same_v<T, BoolExpr::Or>) {
                    int a = lower_bool(n.lhs, sc);
                    int b = lower_bool(n.rhs, sc);
                    return binary(RtExpr::Op::Or, a, b);
                } else {
                    RtExpr e;
                    e.op = RtExpr::Op::Not;
                    e.kids = {lower_bool(n.operand, sc)};
                    return add(std::move(e));
                }
            },
            ex->node);
    }

    /// var(x) for a concrete node: 0th-derivative state variable, or the
    /// algebraic slot for order-0 nodes.
    int node_value(const std::string& node) {
        if (auto it = alg_slot.find(node); it != alg_slot.end()) {
            RtExpr e;
            e.op = RtExpr::Op::Alg;
            e.index = it->second;
            return add(std::move(e));
        }
        int idx = sys_.var_index(node, 0);
        if (idx < 0) throw ArkError("no state variable for node '" + node + "'");
        RtExpr e;
        e.op = RtExpr::Op::State;
        e.index = idx;
        return add(std::move(e));
    }

private:
    OdeSystem& sys_;
    const DynamicalGraph& g_;

    const Value& attr_value(const std::string& binding, const std::string& attr,
                            const Scope& sc) {
        if (auto it = sc.nodes.find(binding); it != sc.nodes.end()) {
            auto ait = it->second->attrs.find(attr);
            if (ait == it->second->attrs.end())
                throw ArkError("node '" + it->second->name + "' has no attribute '" + attr +
                               "'");
            return ait->second;
        }
        if (auto it = sc.edges.find(binding); it != sc.edges.end()) {
            auto ait = it->second->attrs.find(attr);
            if (ait == it->second->attrs.end())
                throw ArkError("edge '" + it->second->name + "' has no attribute '" + attr +
                               "'");
            return ait->second;
        }
        throw ArkError("unbound identifier '" + binding + "' during compilation");
    }
};

struct Term {
    std::string edge_name;  // canonical ordering key
    int expr;
};

void collect_var_bindings(const ExprPtr& e, std::set<std::string>& out);

void collect_var_bindings(const BoolExprPtr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
                collect_var_bindings(n.lhs, out);
                collect_var_bindings(n.rhs, out);
            } else if constexpr (std::is_same_v<T, BoolExpr::And> ||
                                 std::is_same_v<T, BoolExpr::Or>) {
                collect_var_bindings(n.lhs, out);
                collect_var_bindings(n.rhs, out);
            } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
                collect_var_bindings(n.operand, out);
            }
        },
        e->node);
}

void collect_var_bindings(const ExprPtr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Var>) {
                out.insert(n.node);
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                collect_var_bindings(n.operand, out);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                collect_var_bindings(n.lhs, out);
                collect_var_bindings(n.rhs, out);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                for (const auto& a : n.args) collect_var_bindings(a, out);
            } else if constexpr (std::is_same_v<T, Expr::If>) {
                collect_var_bindings(n.cond, out);
                collect_var_bindings(n.then_e, out);
                collect_var_bindings(n.else_e, out);
            } else if constexpr (std::is_same_v<T, Expr::Lambda>) {
                collect_var_bindings(n.body, out);
            }
        },
        e->node);
}

/// Dispatches every edge of the graph once, reporting each applicable rule
/// together with its concrete target node.
template <typename Fn>
void for_each_dispatch(const DynamicalGraph& g, const LanguageDef& lang, Fn&& fn) {
    for (const auto& [ename, e] : g.edges) {
        const auto& st = g.nodes.at(e.src).type;
        const auto& dt = g.nodes.at(e.dst).type;
        const bool off = !e.on;
        auto apply = [&](const ProductionRule* r) {
            if (!r) return;
            const std::string& target =
                r->self ? e.src : (r->target == RuleTarget::Source ? e.src : e.dst);
            fn(e, *r, target);
        };
        if (e.src == e.dst) {
            apply(lookup_self_production(lang, e.type, st, off));
        } else {
            apply(lookup_production(lang, e.type, st, dt, RuleTarget::Source, off));
            apply(lookup_production(lang, e.type, st, dt, RuleTarget::Destination, off));
        }
    }
}

}  // namespace

OdeSystem compile(const DynamicalGraph& g, const LanguageDef& lang) {
    OdeSystem sys;
    Lowering lo(sys, g);

    // state variables for order >= 1 nodes, name-ordered
    for (const auto& [name, n] : g.nodes) {
        const auto& ty = lang.node_types.at(n.type);
        for (int d = 0; d < ty.order; ++d) {
            sys.vars.push_back({name, d});
            sys.initial.push_back(n.inits[static_cast<size_t>(d)].as_real());
        }
    }

    // order-0 nodes: allot algebraic slots in topological order of their
    // var() dependencies before lowering anything that references them
    std::set<std::string> algs;
    for (const auto& [name, n] : g.nodes)
        if (lang.node_types.at(n.type).order == 0) algs.insert(name);
    {
        std::map<std::string, std::set<std::string>> deps;
        for (const auto& n : algs) deps[n] = {};
        for_each_dispatch(g, lang, [&](const GraphEdge& e, const ProductionRule& r,
                                       const std::string& target) {
            if (!algs.count(target)) return;
            std::set<std::string> bindings;
            collect_var_bindings(r.expr, bindings);
            for (const auto& b : bindings) {
                const std::string& concrete = b == r.src_binding ? e.src : e.dst;
                if (algs.count(concrete) && concrete != target) deps[target].insert(concrete);
            }
        });
        std::map<std::string, int> mark;  // 0 new, 1 visiting, 2 done
        std::function<void(const std::string&)> visit = [&](const std::string& n) {
            int& m = mark[n];
            if (m == 2) return;
            if (m == 1)
                throw ArkError("algebraic cycle among order-0 nodes involving '" + n + "'");
            m = 1;
            for (const auto& d : deps[n]) visit(d);
            m = 2;
            lo.alg_slot[n] = static_cast<int>(sys.alg_nodes.size());
            sys.alg_nodes.push_back(n);
        };
        for (const auto& n : algs) visit(n);
    }

    // collect per-node contributed terms by dispatching each edge once
    std::map<std::string, std::vector<Term>> terms;
    for_each_dispatch(g, lang, [&](const GraphEdge& e, const ProductionRule& r,
                                   const std::string& target) {
        Lowering::Scope sc;
        sc.edges[r.edge_binding] = &e;
        sc.nodes[r.src_binding] = &g.nodes.at(e.src);
        sc.nodes[r.dst_binding] = &g.nodes.at(e.dst);
        terms[target].push_back({e.name, lo.lower(r.expr, sc)});
    });

    auto aggregate = [&](const std::string& node) -> int {
        auto it = terms.find(node);
        if (it == terms.end() || it->second.empty()) return lo.constant(0.0);
        auto& ts = it->second;
        std::stable_sort(ts.begin(), ts.end(),
                         [](const Term& a, const Term& b) { return a.edge_name < b.edge_name; });
        const auto red = lang.node_types.at(g.nodes.at(node).type).reduction;
        int acc = ts[0].expr;
        for (size_t i = 1; i < ts.size(); ++i)
            acc = lo.binary(red == Reduction::Sum ? RtExpr::Op::Add : RtExpr::Op::Mul, acc,
                            ts[i].expr);
        return acc;
    };

    sys.alg_expr.resize(sys.alg_nodes.size());
    for (size_t i = 0; i < sys.alg_nodes.size(); ++i)
        sys.alg_expr[i] = aggregate(sys.alg_nodes[i]);

    // differential equations: low-order chains then the aggregated top order
    sys.rhs.resize(sys.vars.size());
    for (size_t i = 0; i < sys.vars.size(); ++i) {
        const auto& v = sys.vars[i];
        const int order = lang.node_types.at(g.nodes.at(v.node).type).order;
        if (v.deriv < order - 1) {
            RtExpr e;
            e.op = RtExpr::Op::State;
            e.index = sys.var_index(v.node, v.deriv + 1);
            sys.rhs[i] = lo.add(std::move(e));
        } else {
            sys.rhs[i] = aggregate(v.node);
        }
    }
    return sys;
}

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string print_rt(const OdeSystem& sys, int idx) {
    const RtExpr& e = sys.pool[static_cast<size_t>(idx)];
    auto kid = [&](size_t i) { return print_rt(sys, e.kids[i]); };
    switch (e.op) {
        case RtExpr::Op::Const: return fmt_num(e.cval);
        case RtExpr::Op::State: return sys.vars[static_cast<size_t>(e.index)].display();
        case RtExpr::Op::Alg: return sys.alg_nodes[static_cast<size_t>(e.index)];
        case RtExpr::Op::Time: return "t";
        case RtExpr::Op::Neg: return "-" + kid(0);
        case RtExpr::Op::Add: return "(" + kid(0) + " + " + kid(1) + ")";
        case RtExpr::Op::Sub: return "(" + kid(0) + " - " + kid(1) + ")";
        case RtExpr::Op::Mul: return "(" + kid(0) + " * " + kid(1) + ")";
        case RtExpr::Op::Div: return "(" + kid(0) + " / " + kid(1) + ")";
        case RtExpr::Op::Pow: return "(" + kid(0) + " ^ " + kid(1) + ")";
        case RtExpr::Op::Call: {
            static const char* names[] = {"sin", "cos", "exp", "abs", "min", "max", "pulse"};
            std::string s = std::string(names[static_cast<int>(e.builtin)]) + "(";
            for (size_t i = 0; i < e.kids.size(); ++i) s += (i ? ", " : "") + kid(i);
            return s + ")";
        }
        case RtExpr::Op::If: return "if(" + kid(0) + ", " + kid(1) + ", " + kid(2) + ")";
        case RtExpr::Op::Cmp: {
            static const char* ops[] = {"==", "!=", "<", "<=", ">", ">="};
            return "(" + kid(0) + " " + ops[static_cast<int>(e.cmp)] + " " + kid(1) + ")";
        }
        case RtExpr::Op::And: return "(" + kid(0) + " and " + kid(1) + ")";
        case RtExpr::Op::Or: return "(" + kid(0) + " or " + kid(1) + ")";
        case RtExpr::Op::Not: return "not " + kid(0);
    }
    return "?";
}

}  // namespace

std::string pretty_equations(const OdeSystem& sys) {
    std::string out;
    for (size_t i = 0; i < sys.alg_nodes.size(); ++i)
        out += sys.alg_nodes[i] + " = " + print_rt(sys, sys.alg_expr[i]) + "\n";
    for (size_t i = 0; i < sys.vars.size(); ++i)
        out += "d " + sys.vars[i].display() + "/dt = " + print_rt(sys, sys.rhs[i]) + "\n";
    return out;
}

std::string system_json(const OdeSystem& sys) {
    nlohmann::ordered_json j;
    j["state"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < sys.vars.size(); ++i)
        j["state"].push_back(
            {{"name", sys.vars[i].display()}, {"initial", sys.initial[i]}});
    j["algebraic"] = sys.alg_nodes;
    j["equations"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < sys.vars.size(); ++i)
        j["equations"].push_back("d " + sys.vars[i].display() + "/dt = " +
                                 print_rt(sys, sys.rhs[i]));
    return j.dump(2) + "\n";
}

}  // namespace ark
