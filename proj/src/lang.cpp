#include "ark/lang.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "ark/builtins.hpp"

namespace ark {

void LanguageRegistry::add(LanguagePtr lang) {
    if (!lang) return;
    if (langs_.count(lang->name))
        throw ArkError("language '" + lang->name + "' already registered");
    langs_.emplace(lang->name, std::move(lang));
}

LanguagePtr LanguageRegistry::find(const std::string& name) const {
    auto it = langs_.find(name);
    return it == langs_.end() ? nullptr : it->second;
}

std::vector<std::string> LanguageRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : langs_) out.push_back(k);
    return out;
}

namespace {

/// Hops from `type_name` up to `ancestor`; nullopt if unrelated.
template <typename TypeMap>
std::optional<int> distance_in(const TypeMap& types, const std::string& type_name,
                               const std::string& ancestor) {
    int d = 0;
    std::string cur = type_name;
    while (true) {
        if (cur == ancestor) return d;
        auto it = types.find(cur);
        if (it == types.end() || !it->second.parent) return std::nullopt;
        cur = *it->second.parent;
        ++d;
    }
}

bool range_within(const SigTypeAst& child, const SigTypeAst& parent) {
    switch (child.kind) {
        case SigTypeAst::Kind::Real: return child.x0 >= parent.x0 && child.x1 <= parent.x1;
        case SigTypeAst::Kind::Int: return child.i0 >= parent.i0 && child.i1 <= parent.i1;
        case SigTypeAst::Kind::Lambda: return child.params.size() == parent.params.size();
    }
    return false;
}

const char* kind_name(SigTypeAst::Kind k) {
    switch (k) {
        case SigTypeAst::Kind::Real: return "real";
        case SigTypeAst::Kind::Int: return "int";
        case SigTypeAst::Kind::Lambda: return "lambd";
    }
    return "?";
}

struct RuleSignature {
    std::string edge_type, src_type, dst_type;
    bool self;
    RuleTarget target;
    bool off;
    bool operator<(const RuleSignature& o) const {
        return std::tie(edge_type, src_type, dst_type, self, target, off) <
               std::tie(o.edge_type, o.src_type, o.dst_type, o.self, o.target, o.off);
    }
};

RuleSignature signature_of(const ProductionRule& r) {
    return {r.edge_type, r.src_type, r.dst_type, r.self, r.target, r.off};
}

bool clause_equal(const MatchClause& a, const MatchClause& b) {
    return a.lo == b.lo && a.hi == b.hi && a.edge_type == b.edge_type && a.dir == b.dir &&
           a.peer_types == b.peer_types;
}

bool validity_equal(const ValidityRule& a, const ValidityRule& b) {
    if (a.node_type != b.node_type || a.accept != b.accept ||
        a.clauses.size() != b.clauses.size())
        return false;
    for (size_t i = 0; i < a.clauses.size(); ++i)
        if (!clause_equal(a.clauses[i], b.clauses[i])) return false;
    return true;
}

/// Scope/type checks for a production-rule expression: identifiers must be
/// clause bindings (or lambda parameters), attributes must exist on the bound
/// type, builtin and lambda-attribute calls must have matching arity.
class ProdExprChecker {
public:
    ProdExprChecker(const LanguageDef& lang, const ProdRuleAst& rule, DiagnosticList& diags)
        : lang_(lang), rule_(rule), diags_(diags) {}

    void check(const ExprPtr& e) { visit(e, {}); }

private:
    const LanguageDef& lang_;
    const ProdRuleAst& rule_;
    DiagnosticList& diags_;

    const SigTypeAst* attr_type(const std::string& owner, const std::string& attr) {
        const std::map<std::string, SigTypeAst>* attrs = nullptr;
        if (owner == rule_.edge_binding) {
            auto it = lang_.edge_types.find(rule_.edge_type);
            if (it != lang_.edge_types.end()) attrs = &it->second.attributes;
        } else if (owner == rule_.src_binding || owner == rule_.dst_binding) {
            const auto& tn = owner == rule_.src_binding ? rule_.src_type : rule_.dst_type;
            auto it = lang_.node_types.find(tn);
            if (it != lang_.node_types.end()) attrs = &it->second.attributes;
        }
        if (!attrs) return nullptr;
        auto it = attrs->find(attr);
        return it == attrs->end() ? nullptr : &it->second;
    }

    void visit(const ExprPtr& e, std::vector<std::string> lambda_params) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Expr::Ident>) {
                    bool bound =
                        std::find(lambda_params.begin(), lambda_params.end(), n.name) !=
                        lambda_params.end();
                    if (!bound)
                        diags_.error(e->span, "unbound identifier '" + n.name +
                                                  "' in production expression");
                } else if constexpr (std::is_same_v<T, Expr::AttrRef>) {
                    if (n.owner != rule_.edge_binding && n.owner != rule_.src_binding &&
                        n.owner != rule_.dst_binding) {
                        diags_.error(e->span,
                                     "unbound identifier '" + n.owner + "' in attribute access");
                    } else if (!attr_type(n.owner, n.attr)) {
                        diags_.error(e->span, "type bound to '" + n.owner +
                                                  "' has no attribute '" + n.attr + "'");
                    }
                } else if constexpr (std::is_same_v<T, Expr::Var>) {
                    if (n.node != rule_.src_binding && n.node != rule_.dst_binding)
                        diags_.error(e->span,
                                     "var(.) must reference the source or destination binding");
                } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                    visit(n.operand, lambda_params);
                } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                    visit(n.lhs, lambda_params);
                    visit(n.rhs, lambda_params);
                } else if constexpr (std::is_same_v<T, Expr::Call>) {
                    if (const auto* id = std::get_if<Expr::Ident>(&n.callee->node)) {
                        auto b = builtin_by_name(id->name);
                        if (!b) {
                            diags_.error(e->span, "unknown function '" + id->name + "'");
                        } else if (static_cast<int>(n.args.size()) != builtin_arity(*b)) {
                            diags_.error(e->span, "'" + id->name + "' expects " +
                                                      std::to_string(builtin_arity(*b)) +
                                                      " argument(s)");
                        }
                    } else if (const auto* ar = std::get_if<Expr::AttrRef>(&n.callee->node)) {
                        const auto* ty = attr_type(ar->owner, ar->attr);
                        if (!ty) {
                            diags_.error(e->span, "unknown attribute '" + ar->owner + "." +
                                                      ar->attr + "' in call");
                        } else if (ty->kind != SigTypeAst::Kind::Lambda) {
                            diags_.error(e->span,
                                         "attribute '" + ar->attr + "' is not a lambda");
                        } else if (ty->params.size() != n.args.size()) {
                            diags_.error(e->span, "lambda arity mismatch: '" + ar->attr +
                                                      "' expects " +
                                                      std::to_string(ty->params.size()) +
                                                      " argument(s)");
                        }
                    } else {
                        diags_.error(e->span, "expression is not callable");
                    }
                    for (const auto& a : n.args) visit(a, lambda_params);
                } else if constexpr (std::is_same_v<T, Expr::If>) {
                    visit_bool(n.cond, lambda_params);
                    visit(n.then_e, lambda_params);
                    visit(n.else_e, lambda_params);
                } else if constexpr (std::is_same_v<T, Expr::Lambda>) {
                    auto inner = lambda_params;
                    inner.insert(inner.end(), n.params.begin(), n.params.end());
                    visit(n.body, std::move(inner));
                }
            },
            e->node);
    }

    void visit_bool(const BoolExprPtr& e, const std::vector<std::string>& lambda_params) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
                    visit(n.lhs, lambda_params);
                    visit(n.rhs, lambda_params);
                } else if constexpr (std::is_same_v<T, BoolExpr::And> ||
                                     std::is_same_v<T, BoolExpr::Or>) {
                    visit_bool(n.lhs, lambda_params);
                    visit_bool(n.rhs, lambda_params);
                } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
                    visit_bool(n.operand, lambda_params);
                }
            },
            e->node);
    }
};

}  // namespace

bool subtype_of(const LanguageDef& lang, const std::string& type_name,
                const std::string& ancestor_name) {
    if (lang.has_node_type(type_name)) {
        if (!lang.has_node_type(ancestor_name) && !lang.has_edge_type(ancestor_name))
            throw ArkError("unknown type '" + ancestor_name + "' in language '" + lang.name +
                           "'");
        return distance_in(lang.node_types, type_name, ancestor_name).has_value();
    }
    if (lang.has_edge_type(type_name)) {
        if (!lang.has_node_type(ancestor_name) && !lang.has_edge_type(ancestor_name))
            throw ArkError("unknown type '" + ancestor_name + "' in language '" + lang.name +
                           "'");
        return distance_in(lang.edge_types, type_name, ancestor_name).has_value();
    }
    throw ArkError("unknown type '" + type_name + "' in language '" + lang.name + "'");
}

const ProductionRule* lookup_production(const LanguageDef& lang, const std::string& edge_type,
                                        const std::string& src_type, const std::string& dst_type,
                                        RuleTarget target, bool off) {
    const ProductionRule* best = nullptr;
    int best_dist = 0;
    bool ambiguous = false;
    for (const auto& r : lang.production_rules) {
        if (r.self || r.off != off || r.target != target) continue;
        auto de = distance_in(lang.edge_types, edge_type, r.edge_type);
        auto ds = distance_in(lang.node_types, src_type, r.src_type);
        auto dd = distance_in(lang.node_types, dst_type, r.dst_type);
        if (!de || !ds || !dd) continue;
        int dist = *de + *ds + *dd;
        if (!best || dist < best_dist) {
            best = &r;
            best_dist = dist;
            ambiguous = false;
        } else if (dist == best_dist) {
            ambiguous = true;
        }
    }
    if (ambiguous)
        throw ArkError("ambiguous production rule dispatch for (" + edge_type + ", " + src_type +
                       " -> " + dst_type + ") in language '" + lang.name + "'");
    return best;
}

const ProductionRule* lookup_self_production(const LanguageDef& lang,
                                             const std::string& edge_type,
                                             const std::string& node_type, bool off) {
    const ProductionRule* best = nullptr;
    int best_dist = 0;
    bool ambiguous = false;
    for (const auto& r : lang.production_rules) {
        if (!r.self || r.off != off) continue;
        auto de = distance_in(lang.edge_types, edge_type, r.edge_type);
        auto dn = distance_in(lang.node_types, node_type, r.src_type);
        if (!de || !dn) continue;
        int dist = *de + *dn;
        if (!best || dist < best_dist) {
            best = &r;
            best_dist = dist;
            ambiguous = false;
        } else if (dist == best_dist) {
            ambiguous = true;
        }
    }
    if (ambiguous)
        throw ArkError("ambiguous self production rule dispatch for (" + edge_type + ", " +
                       node_type + ") in language '" + lang.name + "'");
    return best;
}

std::vector<const ValidityRule*> collect_validity_rules(const LanguageDef& lang,
                                                        const std::string& type_name) {
    std::vector<const ValidityRule*> out;
    std::set<std::string> ancestry;
    std::string cur = type_name;
    while (true) {
        ancestry.insert(cur);
        auto it = lang.node_types.find(cur);
        if (it == lang.node_types.end() || !it->second.parent) break;
        cur = *it->second.parent;
    }
    for (const auto& r : lang.validity_rules)
        if (ancestry.count(r.node_type)) out.push_back(&r);
    return out;
}

LanguagePtr resolve_language(const LangDefAst& ast, const LanguageRegistry& registry,
                             DiagnosticList& diags) {
    size_t errors_before = 0;
    for (const auto& d : diags.items())
        if (d.severity == Severity::Error) ++errors_before;

    auto lang = std::make_shared<LanguageDef>();
    lang->name = ast.name;
    lang->parent = ast.parent;

    std::set<std::string> inherited_types;
    if (ast.parent) {
        auto parent = registry.find(*ast.parent);
        if (!parent) {
            diags.error(ast.span, "unknown parent language '" + *ast.parent + "'");
            return nullptr;
        }
        lang->node_types = parent->node_types;
        lang->edge_types = parent->edge_types;
        lang->production_rules = parent->production_rules;
        lang->validity_rules = parent->validity_rules;
        lang->extern_check = parent->extern_check;
        for (const auto& [k, v] : parent->node_types) inherited_types.insert(k);
        for (const auto& [k, v] : parent->edge_types) inherited_types.insert(k);
    }

    std::set<std::string> new_types;
    std::set<RuleSignature> rule_signatures;
    for (const auto& r : lang->production_rules) rule_signatures.insert(signature_of(r));

    auto is_new_type = [&](const std::string& t) { return new_types.count(t) != 0; };

    // Merges a redefinition against the inherited declaration.
    auto check_override = [&](const SigTypeAst& child, const SigTypeAst& parent,
                              const std::string& what, Span span) {
        if (child.kind != parent.kind) {
            diags.error(span, what + " must retain the inherited datatype (" +
                                  kind_name(parent.kind) + ")");
            return;
        }
        if (!range_within(child, parent))
            diags.error(span, what + (child.kind == SigTypeAst::Kind::Lambda
                                          ? " must keep the inherited lambda arity"
                                          : " must narrow the inherited value range"));
    };

    for (const auto& st : ast.statements) {
        if (const auto* nt = std::get_if<NodeTypeAst>(&st.node)) {
            if (lang->has_node_type(nt->name) || lang->has_edge_type(nt->name)) {
                diags.error(nt->span, "duplicate type name '" + nt->name + "'");
                continue;
            }
            NodeTypeDef def;
            def.name = nt->name;
            def.order = static_cast<int>(nt->order);
            def.reduction = nt->reduction;
            def.parent = nt->parent;
            if (nt->parent) {
                auto pit = lang->node_types.find(*nt->parent);
                if (pit == lang->node_types.end()) {
                    diags.error(nt->span, "unknown parent node type '" + *nt->parent + "'");
                    continue;
                }
                const auto& p = pit->second;
                if (def.order != p.order)
                    diags.error(nt->span, "derived node type '" + nt->name +
                                              "' must keep the parent order " +
                                              std::to_string(p.order));
                if (def.reduction != p.reduction)
                    diags.error(nt->span, "derived node type '" + nt->name +
                                              "' must keep the parent reduction operator");
                def.attributes = p.attributes;
                def.init_slots = p.init_slots;
            } else {
                def.init_slots.resize(static_cast<size_t>(std::max(def.order, 0)));
            }
            std::vector<bool> init_seen(def.init_slots.size(),
                                        nt->parent.has_value());  // inherited slots count
            for (const auto& d : nt->decls) {
                if (d.is_init) {
                    if (d.init_index < 0 || d.init_index >= def.order ||
                        static_cast<size_t>(d.init_index) >= def.init_slots.size()) {
                        diags.error(d.span, "init index " + std::to_string(d.init_index) +
                                                " outside derivative range [0, " +
                                                std::to_string(def.order) + ")");
                        continue;
                    }
                    auto idx = static_cast<size_t>(d.init_index);
                    if (!nt->parent && init_seen[idx]) {
                        diags.error(d.span, "duplicate init slot " + std::to_string(d.init_index));
                        continue;
                    }
                    if (nt->parent) check_override(d.type, def.init_slots[idx],
                                                   "redefined init slot", d.span);
                    def.init_slots[idx] = d.type;
                    init_seen[idx] = true;
                } else {
                    auto it = def.attributes.find(d.name);
                    if (it != def.attributes.end()) {
                        if (nt->parent) {
                            check_override(d.type, it->second, "redefined attribute '" + d.name +
                                                                   "'", d.span);
                            it->second = d.type;
                        } else {
                            diags.error(d.span, "duplicate attribute '" + d.name + "'");
                        }
                    } else {
                        def.attributes.emplace(d.name, d.type);
                    }
                }
            }
            for (size_t i = 0; i < init_seen.size(); ++i)
                if (!init_seen[i])
                    diags.error(nt->span, "node type '" + nt->name +
                                              "' is missing an init declaration for derivative " +
                                              std::to_string(i));
            new_types.insert(def.name);
            lang->node_types.emplace(def.name, std::move(def));
        } else if (const auto* et = std::get_if<EdgeTypeAst>(&st.node)) {
            if (lang->has_node_type(et->name) || lang->has_edge_type(et->name)) {
                diags.error(et->span, "duplicate type name '" + et->name + "'");
                continue;
            }
            EdgeTypeDef def;
            def.name = et->name;
            def.fixed = et->fixed;
            def.parent = et->parent;
            if (et->parent) {
                auto pit = lang->edge_types.find(*et->parent);
                if (pit == lang->edge_types.end()) {
                    diags.error(et->span, "unknown parent edge type '" + *et->parent + "'");
                    continue;
                }
                def.fixed = def.fixed || pit->second.fixed;
                def.attributes = pit->second.attributes;
            }
            for (const auto& d : et->decls) {
                auto it = def.attributes.find(d.name);
                if (it != def.attributes.end()) {
                    if (et->parent) {
                        check_override(d.type, it->second,
                                       "redefined attribute '" + d.name + "'", d.span);
                        it->second = d.type;
                    } else {
                        diags.error(d.span, "duplicate attribute '" + d.name + "'");
                    }
                } else {
                    def.attributes.emplace(d.name, d.type);
                }
            }
            new_types.insert(def.name);
            lang->edge_types.emplace(def.name, std::move(def));
        } else if (const auto* pr = std::get_if<ProdRuleAst>(&st.node)) {
            ProductionRule rule;
            rule.edge_type = pr->edge_type;
            rule.src_type = pr->src_type;
            rule.dst_type = pr->dst_type;
            rule.self = pr->src_binding == pr->dst_binding;
            rule.target = pr->target == pr->src_binding ? RuleTarget::Source
                                                        : RuleTarget::Destination;
            rule.off = pr->off;
            rule.edge_binding = pr->edge_binding;
            rule.src_binding = pr->src_binding;
            rule.dst_binding = pr->dst_binding;
            rule.expr = pr->expr;
            rule.declared_in = lang->name;
            if (!lang->has_edge_type(rule.edge_type)) {
                diags.error(pr->span, "unknown edge type '" + rule.edge_type + "'");
                continue;
            }
            if (!lang->has_node_type(rule.src_type) || !lang->has_node_type(rule.dst_type)) {
                diags.error(pr->span, "unknown node type in production rule");
                continue;
            }
            if (rule.self && rule.src_type != rule.dst_type) {
                diags.error(pr->span,
                            "self-referencing rule must bind one node type on both sides");
                continue;
            }
            ProdExprChecker(*lang, *pr, diags).check(rule.expr);
            auto sig = signature_of(rule);
            if (!rule_signatures.insert(sig).second) {
                diags.error(pr->span,
                            "production rule duplicates an existing rule for these types "
                            "(inherited rules cannot be overridden)");
                continue;
            }
            if (ast.parent && !is_new_type(rule.edge_type) && !is_new_type(rule.src_type) &&
                !is_new_type(rule.dst_type)) {
                diags.error(pr->span,
                            "production rule in a derived language must reference at least one "
                            "type declared by the derived language");
                continue;
            }
            lang->production_rules.push_back(std::move(rule));
        } else if (const auto* cr = std::get_if<CstrRuleAst>(&st.node)) {
            if (!lang->has_node_type(cr->node_type)) {
                diags.error(cr->span, "unknown node type '" + cr->node_type + "'");
                continue;
            }
            for (const auto& pat : cr->patterns) {
                ValidityRule rule;
                rule.node_type = cr->node_type;
                rule.accept = pat.accept;
                rule.declared_in = lang->name;
                bool references_new = is_new_type(cr->node_type);
                bool ok = true;
                for (const auto& m : pat.clauses) {
                    MatchClause c;
                    c.lo = m.lo.value;
                    if (!m.hi.infinite) c.hi = m.hi.value;
                    c.edge_type = m.edge_type;
                    c.dir = m.dir;
                    c.peer_types = m.peer_types;
                    if (!lang->has_edge_type(c.edge_type)) {
                        diags.error(m.span, "unknown edge type '" + c.edge_type + "'");
                        ok = false;
                    }
                    references_new = references_new || is_new_type(c.edge_type);
                    for (const auto& p : c.peer_types) {
                        if (!lang->has_node_type(p)) {
                            diags.error(m.span, "unknown node type '" + p + "'");
                            ok = false;
                        }
                        references_new = references_new || is_new_type(p);
                    }
                    rule.clauses.push_back(std::move(c));
                }
                if (!ok) continue;
                bool duplicate = false;
                for (const auto& existing : lang->validity_rules)
                    if (validity_equal(existing, rule)) duplicate = true;
                if (duplicate) {
                    diags.error(pat.span,
                                "validity rule duplicates an existing rule "
                                "(inherited rules cannot be overridden)");
                    continue;
                }
                if (ast.parent && !references_new) {
                    diags.error(pat.span,
                                "validity rule in a derived language must reference at least "
                                "one type declared by the derived language");
                    continue;
                }
                lang->validity_rules.push_back(std::move(rule));
            }
        } else {
            const auto& name = std::get<std::string>(st.node);
            if (lang->extern_check && *lang->extern_check != name) {
                diags.error(st.span, "global check already bound to '" + *lang->extern_check +
                                         "' (cannot be overridden)");
                continue;
            }
            lang->extern_check = name;
        }
    }

    size_t errors_after = 0;
    for (const auto& d : diags.items())
        if (d.severity == Severity::Error) ++errors_after;
    if (errors_after > errors_before) return nullptr;
    return lang;
}

}  // namespace ark
