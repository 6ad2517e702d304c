#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ark/ast.hpp"
#include "ark/diag.hpp"

namespace ark {

/// Resolved node type with inherited attributes/initial-value slots
/// materialized. `parent` keeps the inheritance chain for subtype queries and
/// production-rule dispatch distance.
struct NodeTypeDef {
    std::string name;
    int order = 0;
    Reduction reduction = Reduction::Sum;
    std::optional<std::string> parent;
    std::map<std::string, SigTypeAst> attributes;
    std::vector<SigTypeAst> init_slots;  // size == order
};

struct EdgeTypeDef {
    std::string name;
    bool fixed = false;
    std::optional<std::string> parent;
    std::map<std::string, SigTypeAst> attributes;
};

enum class RuleTarget { Source, Destination };

struct ProductionRule {
    std::string edge_type;
    std::string src_type;
    std::string dst_type;
    bool self = false;  // source and destination binding coincide
    RuleTarget target = RuleTarget::Source;
    bool off = false;
    std::string edge_binding, src_binding, dst_binding;
    ExprPtr expr;
    std::string declared_in;  // language that introduced this rule
};

struct MatchClause {
    long long lo = 0;
    std::optional<long long> hi;  // nullopt = unbounded
    std::string edge_type;
    MatchDir dir = MatchDir::Any;
    std::vector<std::string> peer_types;
};

struct ValidityRule {
    std::string node_type;
    bool accept = true;
    std::vector<MatchClause> clauses;
    std::string declared_in;
};

struct LanguageDef {
    std::string name;
    std::optional<std::string> parent;
    std::map<std::string, NodeTypeDef> node_types;
    std::map<std::string, EdgeTypeDef> edge_types;
    std::vector<ProductionRule> production_rules;
    std::vector<ValidityRule> validity_rules;
    std::optional<std::string> extern_check;

    [[nodiscard]] bool has_node_type(const std::string& n) const {
        return node_types.count(n) != 0;
    }
    [[nodiscard]] bool has_edge_type(const std::string& n) const {
        return edge_types.count(n) != 0;
    }
};

using LanguagePtr = std::shared_ptr<const LanguageDef>;

/// Immutable-after-load collection of resolved languages. Resolution of a
/// child language requires the parent to be registered first.
class LanguageRegistry {
public:
    void add(LanguagePtr lang);
    [[nodiscard]] LanguagePtr find(const std::string& name) const;
    [[nodiscard]] std::vector<std::string> names() const;

private:
    std::map<std::string, LanguagePtr> langs_;
};

/// Resolves a parsed language definition against the registry, materializing
/// inheritance and enforcing all language-level invariants. Errors go to
/// `diags`; returns nullptr if any were produced.
LanguagePtr resolve_language(const LangDefAst& ast, const LanguageRegistry& registry,
                             DiagnosticList& diags);

/// Reflexive-transitive subtype test over the node- or edge-type parent
/// relation. Throws ArkError on unknown names.
bool subtype_of(const LanguageDef& lang, const std::string& type_name,
                const std::string& ancestor_name);

/// Most specific production rule for the given concrete (edge, source,
/// destination) types, target side, and on/off table. Specificity is the total
/// inheritance distance across the three type slots; two distinct rules at
/// equal minimal distance raise an ambiguity error. Returns nullptr when no
/// rule matches at any ancestor level.
const ProductionRule* lookup_production(const LanguageDef& lang, const std::string& edge_type,
                                        const std::string& src_type, const std::string& dst_type,
                                        RuleTarget target, bool off);

/// Same dispatch for self-referencing edges (single node binding).
const ProductionRule* lookup_self_production(const LanguageDef& lang,
                                             const std::string& edge_type,
                                             const std::string& node_type, bool off);

/// ACCEPT/REJECT patterns applicable to a node of `type_name`: the rules
/// declared for the type and all its ancestors.
std::vector<const ValidityRule*> collect_validity_rules(const LanguageDef& lang,
                                                        const std::string& type_name);

}  // namespace ark
