#include "ark/parser.hpp"

#include <set>

#include "ark/lexer.hpp"

namespace ark {

namespace {

struct ParseBail {};

class Parser {
public:
    Parser(std::vector<Token> tokens, DiagnosticList& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    SourceProgram parse_program() {
        SourceProgram prog;
        std::set<std::string> lang_names, func_names;
        while (!at(Tok::End)) {
            try {
                if (at_kw("lang")) {
                    StmtAst stmt;
                    auto def = parse_lang_def();
                    stmt.span = def.span;
                    if (!lang_names.insert(def.name).second)
                        diags_.error(def.span, "duplicate language name '" + def.name + "'");
                    stmt.node = std::move(def);
                    prog.statements.push_back(std::move(stmt));
                } else if (at_kw("func")) {
                    StmtAst stmt;
                    auto def = parse_func_def();
                    stmt.span = def.span;
                    if (!func_names.insert(def.name).second)
                        diags_.error(def.span, "duplicate function name '" + def.name + "'");
                    stmt.node = std::move(def);
                    prog.statements.push_back(std::move(stmt));
                } else {
                    error_here("expected 'lang' or 'func'");
                }
            } catch (const ParseBail&) {
                recover_to_toplevel();
            }
        }
        return prog;
    }

    ExprPtr parse_expression_only() {
        try {
            auto e = parse_expr();
            if (!at(Tok::End)) error_here("expected end of expression");
            return e;
        } catch (const ParseBail&) {
            return nullptr;
        }
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    DiagnosticList& diags_;

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(size_t k = 1) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_kw(std::string_view kw) const { return at(Tok::Ident) && cur().text == kw; }
    Token take() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

    [[noreturn]] void error_here(const std::string& expected) {
        std::string got = at(Tok::End) ? "end of input" : "'" + cur().text + "'";
        diags_.error(cur().span, expected + ", got " + got);
        throw ParseBail{};
    }
    Token expect(Tok k, const std::string& what) {
        if (!at(k)) error_here("expected " + what);
        return take();
    }
    void expect_kw(std::string_view kw) {
        if (!at_kw(kw)) error_here("expected '" + std::string(kw) + "'");
        take();
    }
    std::string expect_name() {
        if (!at(Tok::Ident)) error_here("expected identifier");
        return take().text;
    }

    void recover_to_toplevel() {
        int depth = 0;
        while (!at(Tok::End)) {
            if (at(Tok::LBrace)) ++depth;
            if (at(Tok::RBrace) && depth > 0) --depth;
            else if (depth == 0 && (at_kw("lang") || at_kw("func"))) return;
            take();
        }
    }

    // ---- numbers ------------------------------------------------------

    double parse_signed_real() {
        bool neg = false;
        if (at(Tok::Minus)) {
            neg = true;
            take();
        }
        if (!at(Tok::Real) && !at(Tok::Int)) error_here("expected number");
        double v = take().real_value;
        return neg ? -v : v;
    }
    long long parse_signed_int() {
        bool neg = false;
        if (at(Tok::Minus)) {
            neg = true;
            take();
        }
        auto t = expect(Tok::Int, "integer");
        return neg ? -t.int_value : t.int_value;
    }

    // ---- datatypes ----------------------------------------------------

    SigTypeAst parse_sigtype(bool allow_const) {
        SigTypeAst ty;
        ty.span = cur().span;
        if (at_kw("real")) {
            take();
            ty.kind = SigTypeAst::Kind::Real;
            expect(Tok::LBracket, "'['");
            ty.x0 = parse_signed_real();
            expect(Tok::Comma, "','");
            ty.x1 = parse_signed_real();
            expect(Tok::RBracket, "']'");
            if (ty.x0 > ty.x1)
                diags_.error(ty.span, "real range lower bound exceeds upper bound");
            if (at_kw("mm")) {
                take();
                ty.has_mismatch = true;
                expect(Tok::LParen, "'('");
                ty.s0 = parse_signed_real();
                expect(Tok::Comma, "','");
                ty.s1 = parse_signed_real();
                expect(Tok::RParen, "')'");
                if (ty.s0 < 0 || ty.s1 < 0)
                    diags_.error(ty.span, "mismatch deviations must be non-negative");
            }
        } else if (at_kw("int")) {
            take();
            ty.kind = SigTypeAst::Kind::Int;
            expect(Tok::LBracket, "'['");
            ty.i0 = parse_signed_int();
            expect(Tok::Comma, "','");
            ty.i1 = parse_signed_int();
            expect(Tok::RBracket, "']'");
            if (ty.i0 > ty.i1)
                diags_.error(ty.span, "int range lower bound exceeds upper bound");
        } else if (at_kw("lambd")) {
            take();
            ty.kind = SigTypeAst::Kind::Lambda;
            expect(Tok::LParen, "'('");
            if (!at(Tok::RParen)) {
                ty.params.push_back(expect_name());
                while (at(Tok::Comma)) {
                    take();
                    ty.params.push_back(expect_name());
                }
            }
            expect(Tok::RParen, "')'");
        } else {
            error_here("expected datatype ('real', 'int', or 'lambd')");
        }
        if (allow_const && at_kw("const")) {
            take();
            ty.is_const = true;
        }
        return ty;
    }

    // ---- expressions --------------------------------------------------

    ExprPtr parse_expr() {
        if (at_kw("if")) return parse_if_expr();
        return parse_addsub();
    }

    ExprPtr parse_if_expr() {
        Span s = cur().span;
        expect_kw("if");
        auto cond = parse_bool_expr();
        expect_kw("then");
        auto then_e = parse_expr();
        expect_kw("else");
        auto else_e = parse_expr();
        return make_expr(Expr::If{cond, then_e, else_e}, Span::join(s, else_e->span));
    }

    ExprPtr parse_addsub() {
        auto lhs = parse_muldiv();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinaryOp op = at(Tok::Plus) ? BinaryOp::Add : BinaryOp::Sub;
            take();
            auto rhs = parse_muldiv();
            lhs = make_expr(Expr::Binary{op, lhs, rhs}, Span::join(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr parse_muldiv() {
        auto lhs = parse_power();
        while (at(Tok::Star) || at(Tok::Slash)) {
            BinaryOp op = at(Tok::Star) ? BinaryOp::Mul : BinaryOp::Div;
            take();
            auto rhs = parse_power();
            lhs = make_expr(Expr::Binary{op, lhs, rhs}, Span::join(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr parse_power() {
        auto base = parse_unary();
        if (at(Tok::Caret)) {
            take();
            auto exp = parse_power();  // right-associative
            return make_expr(Expr::Binary{BinaryOp::Pow, base, exp},
                             Span::join(base->span, exp->span));
        }
        return base;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            Span s = take().span;
            auto e = parse_unary();
            return make_expr(Expr::Unary{UnaryOp::Neg, e}, Span::join(s, e->span));
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        Span s = cur().span;
        if (at(Tok::Real) || at(Tok::Int)) {
            auto t = take();
            if (t.kind == Tok::Real) return make_expr(Expr::RealLit{t.real_value}, s);
            return make_expr(Expr::IntLit{t.int_value}, s);
        }
        if (at(Tok::LParen)) {
            take();
            auto e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (at_kw("time")) {
            take();
            return make_expr(Expr::Time{}, s);
        }
        if (at_kw("var")) {
            take();
            expect(Tok::LParen, "'('");
            auto name = expect_name();
            expect(Tok::RParen, "')'");
            return make_expr(Expr::Var{name}, s);
        }
        if (at_kw("lambd")) return parse_lambda_expr();
        if (at(Tok::Ident)) {
            auto name = take().text;
            ExprPtr base;
            if (at(Tok::Dot)) {
                take();
                auto attr = expect_name();
                base = make_expr(Expr::AttrRef{name, attr}, s);
            } else {
                base = make_expr(Expr::Ident{name}, s);
            }
            if (at(Tok::LParen)) {
                take();
                std::vector<ExprPtr> args;
                if (!at(Tok::RParen)) {
                    args.push_back(parse_expr());
                    while (at(Tok::Comma)) {
                        take();
                        args.push_back(parse_expr());
                    }
                }
                Span e = expect(Tok::RParen, "')'").span;
                return make_expr(Expr::Call{base, std::move(args)}, Span::join(s, e));
            }
            return base;
        }
        error_here("expected expression");
    }

    ExprPtr parse_lambda_expr() {
        Span s = cur().span;
        expect_kw("lambd");
        expect(Tok::LParen, "'('");
        std::vector<std::string> params;
        if (!at(Tok::RParen)) {
            params.push_back(expect_name());
            while (at(Tok::Comma)) {
                take();
                params.push_back(expect_name());
            }
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Colon, "':'");
        auto body = parse_expr();
        return make_expr(Expr::Lambda{std::move(params), body}, Span::join(s, body->span));
    }

    BoolExprPtr parse_bool_expr() { return parse_bool_or(); }

    BoolExprPtr parse_bool_or() {
        auto lhs = parse_bool_and();
        while (at_kw("or")) {
            take();
            auto rhs = parse_bool_and();
            lhs = make_bool(BoolExpr::Or{lhs, rhs}, Span::join(lhs->span, rhs->span));
        }
        return lhs;
    }

    BoolExprPtr parse_bool_and() {
        auto lhs = parse_bool_not();
        while (at_kw("and")) {
            take();
            auto rhs = parse_bool_not();
            lhs = make_bool(BoolExpr::And{lhs, rhs}, Span::join(lhs->span, rhs->span));
        }
        return lhs;
    }

    BoolExprPtr parse_bool_not() {
        if (at_kw("not")) {
            Span s = take().span;
            auto e = parse_bool_not();
            return make_bool(BoolExpr::Not{e}, Span::join(s, e->span));
        }
        return parse_bool_primary();
    }

    BoolExprPtr parse_bool_primary() {
        Span s = cur().span;
        if (at_kw("true") || at_kw("false")) {
            bool v = take().text == "true";
            return make_bool(BoolExpr::BoolLit{v}, s);
        }
        // '(' may open a parenthesized boolean or the left operand of a
        // comparison; try the boolean reading first and backtrack.
        if (at(Tok::LParen)) {
            size_t mark = pos_;
            size_t ndiags = diags_.items().size();
            take();
            try {
                auto inner = parse_bool_expr();
                expect(Tok::RParen, "')'");
                if (is_cmp_op()) throw ParseBail{};  // actually a comparison LHS
                return inner;
            } catch (const ParseBail&) {
                if (diags_.items().size() > ndiags) {
                    // drop speculative diagnostics; reparse as comparison
                    // (DiagnosticList has no pop; tolerate the extra entry only
                    // if the comparison reparse also fails)
                }
                pos_ = mark;
            }
        }
        auto lhs = parse_expr();
        if (!is_cmp_op()) error_here("expected comparison operator");
        CmpOp op = take_cmp_op();
        auto rhs = parse_expr();
        return make_bool(BoolExpr::Cmp{op, lhs, rhs}, Span::join(lhs->span, rhs->span));
    }

    bool is_cmp_op() const {
        return at(Tok::EqEq) || at(Tok::NotEq) || at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) ||
               at(Tok::Ge);
    }
    CmpOp take_cmp_op() {
        switch (take().kind) {
            case Tok::EqEq: return CmpOp::Eq;
            case Tok::NotEq: return CmpOp::Ne;
            case Tok::Lt: return CmpOp::Lt;
            case Tok::Le: return CmpOp::Le;
            case Tok::Gt: return CmpOp::Gt;
            default: return CmpOp::Ge;
        }
    }

    // ---- language definitions -----------------------------------------

    LangDefAst parse_lang_def() {
        LangDefAst def;
        def.span = cur().span;
        expect_kw("lang");
        def.name = expect_name();
        if (at_kw("inherits")) {
            take();
            def.parent = expect_name();
        }
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            if (at(Tok::End)) error_here("expected '}'");
            def.statements.push_back(parse_lang_statement());
        }
        Span e = take().span;
        def.span = Span::join(def.span, e);
        return def;
    }

    LangStAst parse_lang_statement() {
        LangStAst st;
        st.span = cur().span;
        if (at_kw("ntyp") || at_kw("node-type")) {
            st.node = parse_node_type();
        } else if (at_kw("etyp") || at_kw("edge-type")) {
            st.node = parse_edge_type();
        } else if (at_kw("prod")) {
            st.node = parse_prod_rule();
        } else if (at_kw("cstr")) {
            st.node = parse_cstr_rule();
        } else if (at_kw("extern-func")) {
            take();
            st.node = expect_name();
        } else {
            error_here("expected language statement");
        }
        return st;
    }

    std::vector<AttrDeclAst> parse_attr_block() {
        std::vector<AttrDeclAst> decls;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            AttrDeclAst d;
            d.span = cur().span;
            if (at_kw("attr")) {
                take();
                d.name = expect_name();
                expect(Tok::Assign, "'='");
                d.type = parse_sigtype(/*allow_const=*/true);
            } else if (at_kw("init") || at_kw("init-val")) {
                take();
                d.is_init = true;
                expect(Tok::LParen, "'('");
                d.init_index = parse_signed_int();
                expect(Tok::RParen, "')'");
                d.type = parse_sigtype(/*allow_const=*/true);
            } else {
                error_here("expected 'attr' or 'init' declaration");
            }
            decls.push_back(std::move(d));
        }
        take();  // }
        return decls;
    }

    NodeTypeAst parse_node_type() {
        NodeTypeAst nt;
        nt.span = take().span;  // ntyp
        nt.name = expect_name();
        expect(Tok::LParen, "'('");
        nt.order = parse_signed_int();
        expect(Tok::Comma, "','");
        if (at_kw("sum")) {
            nt.reduction = Reduction::Sum;
        } else if (at_kw("mul")) {
            nt.reduction = Reduction::Mul;
        } else {
            error_here("expected 'sum' or 'mul'");
        }
        take();
        expect(Tok::RParen, "')'");
        if (nt.order < 0) diags_.error(nt.span, "node order must be non-negative");
        if (at_kw("inherits")) {
            take();
            nt.parent = expect_name();
        }
        nt.decls = parse_attr_block();
        return nt;
    }

    EdgeTypeAst parse_edge_type() {
        EdgeTypeAst et;
        et.span = take().span;  // etyp
        if (at_kw("fixed")) {
            take();
            et.fixed = true;
        }
        et.name = expect_name();
        if (at_kw("inherits")) {
            take();
            et.parent = expect_name();
        }
        et.decls = parse_attr_block();
        for (const auto& d : et.decls)
            if (d.is_init)
                diags_.error(d.span, "edge types contain only attribute statements");
        return et;
    }

    ProdRuleAst parse_prod_rule() {
        ProdRuleAst r;
        r.span = take().span;  // prod
        expect(Tok::LParen, "'('");
        r.edge_binding = expect_name();
        expect(Tok::Colon, "':'");
        r.edge_type = expect_name();
        expect(Tok::Comma, "','");
        r.src_binding = expect_name();
        expect(Tok::Colon, "':'");
        r.src_type = expect_name();
        expect(Tok::Arrow, "'->'");
        r.dst_binding = expect_name();
        expect(Tok::Colon, "':'");
        r.dst_type = expect_name();
        expect(Tok::RParen, "')'");
        r.target = expect_name();
        expect(Tok::Le, "'<='");
        r.expr = parse_expr();
        if (at_kw("off")) {
            take();
            r.off = true;
        }
        if (r.target != r.src_binding && r.target != r.dst_binding)
            diags_.error(r.span, "production target '" + r.target +
                                     "' must be the source or destination binding");
        return r;
    }

    VAtom parse_vatom() {
        VAtom a;
        if (at_kw("inf")) {
            take();
            a.infinite = true;
        } else {
            a.value = parse_signed_int();
            if (a.value < 0) diags_.error(cur().span, "cardinality bound must be non-negative");
        }
        return a;
    }

    MatchClauseAst parse_match_clause() {
        MatchClauseAst m;
        m.span = cur().span;
        expect_kw("match");
        expect(Tok::LParen, "'('");
        m.lo = parse_vatom();
        expect(Tok::Comma, "','");
        m.hi = parse_vatom();
        expect(Tok::Comma, "','");
        m.edge_type = expect_name();
        if (at(Tok::Comma)) {
            take();
            if (at(Tok::LBracket)) {
                // match(a, b, E, [T,...] -> n): incoming
                m.dir = MatchDir::Incoming;
                m.peer_types = parse_type_list();
                expect(Tok::Arrow, "'->'");
                m.node_binding = expect_name();
            } else {
                // match(a, b, E, n -> [T,...]): outgoing
                m.dir = MatchDir::Outgoing;
                m.node_binding = expect_name();
                expect(Tok::Arrow, "'->'");
                m.peer_types = parse_type_list();
            }
        } else {
            m.dir = MatchDir::Any;
        }
        expect(Tok::RParen, "')'");
        if (!m.lo.infinite && !m.hi.infinite && m.lo.value > m.hi.value)
            diags_.error(m.span, "match lower bound exceeds upper bound");
        if (m.lo.infinite) diags_.error(m.span, "match lower bound cannot be 'inf'");
        return m;
    }

    std::vector<std::string> parse_type_list() {
        std::vector<std::string> out;
        expect(Tok::LBracket, "'['");
        if (!at(Tok::RBracket)) {
            out.push_back(expect_name());
            while (at(Tok::Comma)) {
                take();
                out.push_back(expect_name());
            }
        }
        expect(Tok::RBracket, "']'");
        return out;
    }

    CstrRuleAst parse_cstr_rule() {
        CstrRuleAst c;
        c.span = take().span;  // cstr
        c.node_binding = expect_name();
        expect(Tok::Colon, "':'");
        c.node_type = expect_name();
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            ValPatternAst pat;
            pat.span = cur().span;
            if (at_kw("acc")) {
                pat.accept = true;
            } else if (at_kw("rej")) {
                pat.accept = false;
            } else {
                error_here("expected 'acc' or 'rej'");
            }
            take();
            while (at_kw("match")) {
                auto m = parse_match_clause();
                if (!m.node_binding.empty() && m.node_binding != c.node_binding)
                    diags_.error(m.span, "match clause must reference the target node '" +
                                             c.node_binding + "'");
                pat.clauses.push_back(std::move(m));
            }
            c.patterns.push_back(std::move(pat));
        }
        take();  // }
        return c;
    }

    // ---- function definitions -----------------------------------------

    FuncValAst parse_func_val() {
        FuncValAst v;
        v.span = cur().span;
        if (at_kw("lambd")) {
            auto e = parse_lambda_expr();
            v.value = std::get<Expr::Lambda>(e->node);
        } else if (at(Tok::Real) || (at(Tok::Minus) && peek().kind == Tok::Real)) {
            v.value = parse_signed_real();
        } else if (at(Tok::Int) || (at(Tok::Minus) && peek().kind == Tok::Int)) {
            v.value = parse_signed_int();
        } else if (at(Tok::Ident)) {
            v.value = take().text;
        } else {
            error_here("expected value, lambda, or argument name");
        }
        return v;
    }

    FuncDefAst parse_func_def() {
        FuncDefAst def;
        def.span = cur().span;
        expect_kw("func");
        def.name = expect_name();
        expect(Tok::LParen, "'('");
        while (!at(Tok::RParen)) {
            FuncArgAst arg;
            arg.span = cur().span;
            arg.name = expect_name();
            if (at(Tok::Dot)) {  // dotted argument form v0.v1
                take();
                arg.name += "." + expect_name();
            }
            expect(Tok::Colon, "':'");
            arg.type = parse_sigtype(/*allow_const=*/false);
            def.args.push_back(std::move(arg));
            if (at(Tok::Comma)) take();
        }
        take();  // )
        expect_kw("uses");
        def.language = expect_name();
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            if (at(Tok::End)) error_here("expected '}'");
            def.body.push_back(parse_func_statement());
        }
        Span e = take().span;
        def.span = Span::join(def.span, e);
        return def;
    }

    FuncStAst parse_func_statement() {
        FuncStAst st;
        st.span = cur().span;
        if (at_kw("node")) {
            take();
            FuncStAst::Node n;
            n.name = expect_name();
            expect(Tok::Colon, "':'");
            n.type = expect_name();
            st.node = std::move(n);
        } else if (at_kw("edge")) {
            take();
            FuncStAst::Edge e;
            expect(Tok::Lt, "'<'");
            e.src = expect_name();
            expect(Tok::Comma, "','");
            e.dst = expect_name();
            expect(Tok::Gt, "'>'");
            e.name = expect_name();
            expect(Tok::Colon, "':'");
            e.type = expect_name();
            st.node = std::move(e);
        } else if (at_kw("set-attr")) {
            take();
            FuncStAst::SetAttr s;
            s.owner = expect_name();
            expect(Tok::Dot, "'.'");
            s.attr = expect_name();
            expect(Tok::Assign, "'='");
            s.value = parse_func_val();
            st.node = std::move(s);
        } else if (at_kw("set-init")) {
            take();
            FuncStAst::SetInit s;
            s.node = expect_name();
            expect(Tok::LParen, "'('");
            s.index = parse_signed_int();
            expect(Tok::RParen, "')'");
            expect(Tok::Assign, "'='");
            s.value = parse_func_val();
            st.node = std::move(s);
        } else if (at_kw("set-edge") || at_kw("set-switch")) {
            // both spellings accepted; canonical form is set-edge
            take();
            FuncStAst::SetSwitch s;
            s.edge = expect_name();
            expect_kw("when");
            s.guard = parse_bool_expr();
            st.node = std::move(s);
        } else {
            error_here("expected function statement");
        }
        return st;
    }
};

}  // namespace

SourceProgram parse(std::string_view source, DiagnosticList& diags) {
    auto tokens = lex(source, diags);
    Parser p(std::move(tokens), diags);
    return p.parse_program();
}

ExprPtr parse_expression(std::string_view source, DiagnosticList& diags) {
    auto tokens = lex(source, diags);
    Parser p(std::move(tokens), diags);
    return p.parse_expression_only();
}

}  // namespace ark
