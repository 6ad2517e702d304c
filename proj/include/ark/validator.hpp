#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ark/graph.hpp"
#include "ark/lang.hpp"

namespace ark {

/// Result of a whole-graph check registered by name (`extern-func`).
struct GlobalCheckResult {
    bool ok = true;
    std::string explanation;
};

using GlobalCheck = std::function<GlobalCheckResult(const DynamicalGraph&, const LanguageDef&)>;

/// Closed registry of global validity checks; the stdlib registers
/// `grid-topology` and `groups-respected`.
class GlobalCheckRegistry {
public:
    static GlobalCheckRegistry& instance();
    void add(const std::string& name, GlobalCheck check);
    [[nodiscard]] const GlobalCheck* find(const std::string& name) const;

private:
    std::map<std::string, GlobalCheck> checks_;
};

struct NodeVerdict {
    std::string node;
    bool ok = true;
    std::string reason;  // empty when ok
};

struct ValidationReport {
    bool ok = true;
    bool global_ok = true;
    std::string global_explanation;
    std::vector<NodeVerdict> nodes;  // name-ordered

    [[nodiscard]] std::string to_text() const;
    [[nodiscard]] std::string to_json_text() const;
};

/// Clause matching per the pattern-matching algorithm: subtype-aware on edge
/// and peer types; directed forms exclude self-loops, the ANY form includes
/// them.
bool matches_clause(const std::string& node, const IncidentEdge& edge, const MatchClause& clause,
                    const DynamicalGraph& g, const LanguageDef& lang);

/// Exact feasibility of the cardinality-constrained assignment: every on-edge
/// incident to the node assigned to exactly one eligible clause, every
/// clause's count within [lo, hi].
bool is_described(const std::string& node, const ValidityRule& pattern, const DynamicalGraph& g,
                  const LanguageDef& lang);

/// Brute-force reference for is_described (test oracle; exponential).
bool is_described_bruteforce(const std::string& node, const ValidityRule& pattern,
                             const DynamicalGraph& g, const LanguageDef& lang);

/// Global check first, then per-node accept/reject pattern evaluation and
/// dangling-connection detection.
ValidationReport validate(const DynamicalGraph& g, const LanguageDef& lang);

}  // namespace ark
