#include "ark/ast_printer.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ark {

namespace {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // force a real-literal spelling so the round trip stays a RealLit
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 3;
    }
    return 0;
}

void print_expr(std::ostream& os, const Expr& e, int parent_prec);
void print_bool(std::ostream& os, const BoolExpr& e, int parent_prec);

void print_expr(std::ostream& os, const Expr& e, int parent_prec) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::RealLit>) {
                os << fmt_real(n.value);
            } else if constexpr (std::is_same_v<T, Expr::IntLit>) {
                os << n.value;
            } else if constexpr (std::is_same_v<T, Expr::Ident>) {
                os << n.name;
            } else if constexpr (std::is_same_v<T, Expr::AttrRef>) {
                os << n.owner << "." << n.attr;
            } else if constexpr (std::is_same_v<T, Expr::Time>) {
                os << "time";
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                os << "var(" << n.node << ")";
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                bool paren = parent_prec > 2;
                if (paren) os << "(";
                os << "-";
                print_expr(os, *n.operand, 4);
                if (paren) os << ")";
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                int prec = precedence(n.op);
                bool paren = prec < parent_prec;
                if (paren) os << "(";
                print_expr(os, *n.lhs, prec);
                switch (n.op) {
                    case BinaryOp::Add: os << " + "; break;
                    case BinaryOp::Sub: os << " - "; break;
                    case BinaryOp::Mul: os << " * "; break;
                    case BinaryOp::Div: os << " / "; break;
                    case BinaryOp::Pow: os << " ^ "; break;
                }
                print_expr(os, *n.rhs, prec + 1);
                if (paren) os << ")";
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                print_expr(os, *n.callee, 4);
                os << "(";
                for (size_t i = 0; i < n.args.size(); ++i) {
                    if (i) os << ", ";
                    print_expr(os, *n.args[i], 0);
                }
                os << ")";
            } else if constexpr (std::is_same_v<T, Expr::If>) {
                bool paren = parent_prec > 0;
                if (paren) os << "(";
                os << "if ";
                print_bool(os, *n.cond, 0);
                os << " then ";
                print_expr(os, *n.then_e, 1);
                os << " else ";
                print_expr(os, *n.else_e, 1);
                if (paren) os << ")";
            } else if constexpr (std::is_same_v<T, Expr::Lambda>) {
                os << "lambd(";
                for (size_t i = 0; i < n.params.size(); ++i) {
                    if (i) os << ", ";
                    os << n.params[i];
                }
                os << "): ";
                print_expr(os, *n.body, 1);
            }
        },
        e.node);
}

void print_bool(std::ostream& os, const BoolExpr& e, int parent_prec) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolExpr::BoolLit>) {
                os << (n.value ? "true" : "false");
            } else if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
                print_expr(os, *n.lhs, 1);
                switch (n.op) {
                    case CmpOp::Eq: os << " == "; break;
                    case CmpOp::Ne: os << " != "; break;
                    case CmpOp::Lt: os << " < "; break;
                    case CmpOp::Le: os << " <= "; break;
                    case CmpOp::Gt: os << " > "; break;
                    case CmpOp::Ge: os << " >= "; break;
                }
                print_expr(os, *n.rhs, 1);
            } else if constexpr (std::is_same_v<T, BoolExpr::And>) {
                bool paren = parent_prec > 2;
                if (paren) os << "(";
                print_bool(os, *n.lhs, 2);
                os << " and ";
                print_bool(os, *n.rhs, 2);
                if (paren) os << ")";
            } else if constexpr (std::is_same_v<T, BoolExpr::Or>) {
                bool paren = parent_prec > 1;
                if (paren) os << "(";
                print_bool(os, *n.lhs, 1);
                os << " or ";
                print_bool(os, *n.rhs, 1);
                if (paren) os << ")";
            } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
                os << "not (";
                print_bool(os, *n.operand, 0);
                os << ")";
            }
        },
        e.node);
}

std::string sigtype_str(const SigTypeAst& t) {
    std::ostringstream os;
    switch (t.kind) {
        case SigTypeAst::Kind::Real:
            os << "real[" << fmt_real(t.x0) << ", " << fmt_real(t.x1) << "]";
            if (t.has_mismatch)
                os << " mm(" << fmt_real(t.s0) << ", " << fmt_real(t.s1) << ")";
            break;
        case SigTypeAst::Kind::Int:
            os << "int[" << t.i0 << ", " << t.i1 << "]";
            break;
        case SigTypeAst::Kind::Lambda:
            os << "lambd(";
            for (size_t i = 0; i < t.params.size(); ++i) {
                if (i) os << ", ";
                os << t.params[i];
            }
            os << ")";
            break;
    }
    if (t.is_const) os << " const";
    return os.str();
}

std::string vatom_str(const VAtom& a) {
    return a.infinite ? std::string("inf") : std::to_string(a.value);
}

std::string clause_str(const MatchClauseAst& m) {
    std::ostringstream os;
    os << "match(" << vatom_str(m.lo) << ", " << vatom_str(m.hi) << ", " << m.edge_type;
    auto types = [&] {
        std::string s = "[";
        for (size_t i = 0; i < m.peer_types.size(); ++i) {
            if (i) s += ", ";
            s += m.peer_types[i];
        }
        return s + "]";
    };
    if (m.dir == MatchDir::Outgoing)
        os << ", " << m.node_binding << " -> " << types();
    else if (m.dir == MatchDir::Incoming)
        os << ", " << types() << " -> " << m.node_binding;
    os << ")";
    return os.str();
}

void print_attr_block(std::ostream& os, const std::vector<AttrDeclAst>& decls,
                      const std::string& indent) {
    os << "{\n";
    for (const auto& d : decls) {
        os << indent << "  ";
        if (d.is_init)
            os << "init(" << d.init_index << ") " << sigtype_str(d.type);
        else
            os << "attr " << d.name << " = " << sigtype_str(d.type);
        os << "\n";
    }
    os << indent << "}";
}

void print_func_val(std::ostream& os, const FuncValAst& v) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                os << fmt_real(x);
            } else if constexpr (std::is_same_v<T, long long>) {
                os << x;
            } else if constexpr (std::is_same_v<T, Expr::Lambda>) {
                Expr e;
                e.node = x;
                print_expr(os, e, 0);
            } else {
                os << x;
            }
        },
        v.value);
}

}  // namespace

std::string pretty_print(const ExprPtr& expr) {
    std::ostringstream os;
    print_expr(os, *expr, 0);
    return os.str();
}

std::string pretty_print(const BoolExprPtr& expr) {
    std::ostringstream os;
    print_bool(os, *expr, 0);
    return os.str();
}

std::string pretty_print(const SourceProgram& prog) {
    std::ostringstream os;
    for (const auto& stmt : prog.statements) {
        if (const auto* lang = std::get_if<LangDefAst>(&stmt.node)) {
            os << "lang " << lang->name;
            if (lang->parent) os << " inherits " << *lang->parent;
            os << " {\n";
            for (const auto& st : lang->statements) {
                os << "  ";
                std::visit(
                    [&](const auto& n) {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, NodeTypeAst>) {
                            os << "ntyp " << n.name << "(" << n.order << ", "
                               << (n.reduction == Reduction::Sum ? "sum" : "mul") << ")";
                            if (n.parent) os << " inherits " << *n.parent;
                            os << " ";
                            print_attr_block(os, n.decls, "  ");
                        } else if constexpr (std::is_same_v<T, EdgeTypeAst>) {
                            os << "etyp " << (n.fixed ? "fixed " : "") << n.name;
                            if (n.parent) os << " inherits " << *n.parent;
                            os << " ";
                            print_attr_block(os, n.decls, "  ");
                        } else if constexpr (std::is_same_v<T, ProdRuleAst>) {
                            os << "prod(" << n.edge_binding << ":" << n.edge_type << ", "
                               << n.src_binding << ":" << n.src_type << " -> " << n.dst_binding
                               << ":" << n.dst_type << ") " << n.target << " <= ";
                            print_expr(os, *n.expr, 0);
                            if (n.off) os << " off";
                        } else if constexpr (std::is_same_v<T, CstrRuleAst>) {
                            os << "cstr " << n.node_binding << ":" << n.node_type << " {\n";
                            for (const auto& pat : n.patterns) {
                                os << "    " << (pat.accept ? "acc" : "rej");
                                for (const auto& m : pat.clauses) os << " " << clause_str(m);
                                os << "\n";
                            }
                            os << "  }";
                        } else {
                            os << "extern-func " << n;
                        }
                    },
                    st.node);
                os << "\n";
            }
            os << "}\n";
        } else {
            const auto& fn = std::get<FuncDefAst>(stmt.node);
            os << "func " << fn.name << "(";
            for (size_t i = 0; i < fn.args.size(); ++i) {
                if (i) os << ", ";
                os << fn.args[i].name << ": " << sigtype_str(fn.args[i].type);
            }
            os << ") uses " << fn.language << " {\n";
            for (const auto& st : fn.body) {
                os << "  ";
                std::visit(
                    [&](const auto& n) {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, FuncStAst::Node>) {
                            os << "node " << n.name << " : " << n.type;
                        } else if constexpr (std::is_same_v<T, FuncStAst::Edge>) {
                            os << "edge<" << n.src << ", " << n.dst << "> " << n.name << " : "
                               << n.type;
                        } else if constexpr (std::is_same_v<T, FuncStAst::SetAttr>) {
                            os << "set-attr " << n.owner << "." << n.attr << " = ";
                            print_func_val(os, n.value);
                        } else if constexpr (std::is_same_v<T, FuncStAst::SetInit>) {
                            os << "set-init " << n.node << "(" << n.index << ") = ";
                            print_func_val(os, n.value);
                        } else {
                            os << "set-edge " << n.edge << " when ";
                            print_bool(os, *n.guard, 0);
                        }
                    },
                    st.node);
                os << "\n";
            }
            os << "}\n";
        }
    }
    return os.str();
}

// ---- JSON dump ----------------------------------------------------------

namespace {

ordered_json expr_json(const Expr& e);
ordered_json bool_json(const BoolExpr& e);

ordered_json expr_json(const Expr& e) {
    ordered_json j;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::RealLit>) {
                j["kind"] = "real";
                j["value"] = n.value;
            } else if constexpr (std::is_same_v<T, Expr::IntLit>) {
                j["kind"] = "int";
                j["value"] = n.value;
            } else if constexpr (std::is_same_v<T, Expr::Ident>) {
                j["kind"] = "ident";
                j["name"] = n.name;
            } else if constexpr (std::is_same_v<T, Expr::AttrRef>) {
                j["kind"] = "attr";
                j["owner"] = n.owner;
                j["name"] = n.attr;
            } else if constexpr (std::is_same_v<T, Expr::Time>) {
                j["kind"] = "time";
            } else if constexpr (std::is_same_v<T, Expr::Var>) {
                j["kind"] = "var";
                j["node"] = n.node;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                j["kind"] = "neg";
                j["operand"] = expr_json(*n.operand);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                static const char* names[] = {"add", "sub", "mul", "div", "pow"};
                j["kind"] = names[static_cast<int>(n.op)];
                j["lhs"] = expr_json(*n.lhs);
                j["rhs"] = expr_json(*n.rhs);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                j["kind"] = "call";
                j["callee"] = expr_json(*n.callee);
                auto& args = j["args"] = ordered_json::array();
                for (const auto& a : n.args) args.push_back(expr_json(*a));
            } else if constexpr (std::is_same_v<T, Expr::If>) {
                j["kind"] = "if";
                j["cond"] = bool_json(*n.cond);
                j["then"] = expr_json(*n.then_e);
                j["else"] = expr_json(*n.else_e);
            } else if constexpr (std::is_same_v<T, Expr::Lambda>) {
                j["kind"] = "lambda";
                j["params"] = n.params;
                j["body"] = expr_json(*n.body);
            }
        },
        e.node);
    return j;
}

ordered_json bool_json(const BoolExpr& e) {
    ordered_json j;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolExpr::BoolLit>) {
                j["kind"] = "bool";
                j["value"] = n.value;
            } else if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
                static const char* names[] = {"eq", "ne", "lt", "le", "gt", "ge"};
                j["kind"] = names[static_cast<int>(n.op)];
                j["lhs"] = expr_json(*n.lhs);
                j["rhs"] = expr_json(*n.rhs);
            } else if constexpr (std::is_same_v<T, BoolExpr::And>) {
                j["kind"] = "and";
                j["lhs"] = bool_json(*n.lhs);
                j["rhs"] = bool_json(*n.rhs);
            } else if constexpr (std::is_same_v<T, BoolExpr::Or>) {
                j["kind"] = "or";
                j["lhs"] = bool_json(*n.lhs);
                j["rhs"] = bool_json(*n.rhs);
            } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
                j["kind"] = "not";
                j["operand"] = bool_json(*n.operand);
            }
        },
        e.node);
    return j;
}

ordered_json sigtype_json(const SigTypeAst& t) {
    ordered_json j;
    switch (t.kind) {
        case SigTypeAst::Kind::Real:
            j["kind"] = "real";
            j["lo"] = t.x0;
            j["hi"] = t.x1;
            if (t.has_mismatch) {
                j["mm"] = {{"s0", t.s0}, {"s1", t.s1}};
            }
            break;
        case SigTypeAst::Kind::Int:
            j["kind"] = "int";
            j["lo"] = t.i0;
            j["hi"] = t.i1;
            break;
        case SigTypeAst::Kind::Lambda:
            j["kind"] = "lambda";
            j["params"] = t.params;
            break;
    }
    if (t.is_const) j["const"] = true;
    return j;
}

ordered_json decls_json(const std::vector<AttrDeclAst>& decls) {
    ordered_json arr = ordered_json::array();
    for (const auto& d : decls) {
        ordered_json j;
        if (d.is_init) {
            j["init"] = d.init_index;
        } else {
            j["attr"] = d.name;
        }
        j["type"] = sigtype_json(d.type);
        arr.push_back(std::move(j));
    }
    return arr;
}

ordered_json func_val_json(const FuncValAst& v) {
    ordered_json j;
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                j["real"] = x;
            } else if constexpr (std::is_same_v<T, long long>) {
                j["int"] = x;
            } else if constexpr (std::is_same_v<T, Expr::Lambda>) {
                Expr e;
                e.node = x;
                j["lambda"] = expr_json(e);
            } else {
                j["arg"] = x;
            }
        },
        v.value);
    return j;
}

}  // namespace

ordered_json to_json(const ExprPtr& expr) { return expr_json(*expr); }

ordered_json to_json(const SourceProgram& prog) {
    ordered_json out = ordered_json::array();
    for (const auto& stmt : prog.statements) {
        ordered_json j;
        if (const auto* lang = std::get_if<LangDefAst>(&stmt.node)) {
            j["lang"] = lang->name;
            if (lang->parent) j["inherits"] = *lang->parent;
            auto& sts = j["statements"] = ordered_json::array();
            for (const auto& st : lang->statements) {
                ordered_json s;
                std::visit(
                    [&](const auto& n) {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, NodeTypeAst>) {
                            s["ntyp"] = n.name;
                            s["order"] = n.order;
                            s["reduction"] = n.reduction == Reduction::Sum ? "sum" : "mul";
                            if (n.parent) s["inherits"] = *n.parent;
                            s["decls"] = decls_json(n.decls);
                        } else if constexpr (std::is_same_v<T, EdgeTypeAst>) {
                            s["etyp"] = n.name;
                            if (n.fixed) s["fixed"] = true;
                            if (n.parent) s["inherits"] = *n.parent;
                            s["decls"] = decls_json(n.decls);
                        } else if constexpr (std::is_same_v<T, ProdRuleAst>) {
                            s["prod"] = {{"edge", {n.edge_binding, n.edge_type}},
                                         {"src", {n.src_binding, n.src_type}},
                                         {"dst", {n.dst_binding, n.dst_type}},
                                         {"target", n.target},
                                         {"off", n.off}};
                            s["expr"] = expr_json(*n.expr);
                        } else if constexpr (std::is_same_v<T, CstrRuleAst>) {
                            s["cstr"] = {{"binding", n.node_binding}, {"type", n.node_type}};
                            auto& pats = s["patterns"] = ordered_json::array();
                            for (const auto& pat : n.patterns) {
                                ordered_json p;
                                p["accept"] = pat.accept;
                                auto& cls = p["clauses"] = ordered_json::array();
                                for (const auto& m : pat.clauses) {
                                    ordered_json c;
                                    c["lo"] = m.lo.value;
                                    if (m.hi.infinite)
                                        c["hi"] = "inf";
                                    else
                                        c["hi"] = m.hi.value;
                                    c["edge_type"] = m.edge_type;
                                    c["dir"] = m.dir == MatchDir::Outgoing  ? "out"
                                               : m.dir == MatchDir::Incoming ? "in"
                                                                             : "any";
                                    c["peers"] = m.peer_types;
                                    cls.push_back(std::move(c));
                                }
                                pats.push_back(std::move(p));
                            }
                        } else {
                            s["extern-func"] = n;
                        }
                    },
                    st.node);
                sts.push_back(std::move(s));
            }
        } else {
            const auto& fn = std::get<FuncDefAst>(stmt.node);
            j["func"] = fn.name;
            j["uses"] = fn.language;
            auto& args = j["args"] = ordered_json::array();
            for (const auto& a : fn.args)
                args.push_back({{"name", a.name}, {"type", sigtype_json(a.type)}});
            auto& body = j["body"] = ordered_json::array();
            for (const auto& st : fn.body) {
                ordered_json s;
                std::visit(
                    [&](const auto& n) {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, FuncStAst::Node>) {
                            s["node"] = n.name;
                            s["type"] = n.type;
                        } else if constexpr (std::is_same_v<T, FuncStAst::Edge>) {
                            s["edge"] = n.name;
                            s["type"] = n.type;
                            s["src"] = n.src;
                            s["dst"] = n.dst;
                        } else if constexpr (std::is_same_v<T, FuncStAst::SetAttr>) {
                            s["set-attr"] = n.owner + "." + n.attr;
                            s["value"] = func_val_json(n.value);
                        } else if constexpr (std::is_same_v<T, FuncStAst::SetInit>) {
                            s["set-init"] = n.node;
                            s["index"] = n.index;
                            s["value"] = func_val_json(n.value);
                        } else {
                            s["set-edge"] = n.edge;
                            s["when"] = bool_json(*n.guard);
                        }
                    },
                    st.node);
                body.push_back(std::move(s));
            }
        }
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace ark
