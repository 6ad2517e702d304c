#include "ark/validator.hpp"

#include <algorithm>

#include <json.hpp>

namespace ark {

GlobalCheckRegistry& GlobalCheckRegistry::instance() {
    static GlobalCheckRegistry reg;
    return reg;
}

void GlobalCheckRegistry::add(const std::string& name, GlobalCheck check) {
    checks_[name] = std::move(check);
}

const GlobalCheck* GlobalCheckRegistry::find(const std::string& name) const {
    auto it = checks_.find(name);
    return it == checks_.end() ? nullptr : &it->second;
}

bool matches_clause(const std::string& node, const IncidentEdge& edge, const MatchClause& clause,
                    const DynamicalGraph& g, const LanguageDef& lang) {
    if (!subtype_of(lang, edge.edge->type, clause.edge_type)) return false;
    switch (clause.dir) {
        case MatchDir::Any:
            return true;
        case MatchDir::Outgoing:
            if (edge.self || !edge.outgoing) return false;
            break;
        case MatchDir::Incoming:
            if (edge.self || edge.outgoing) return false;
            break;
    }
    if (clause.peer_types.empty()) return true;
    const std::string& peer = edge.outgoing ? edge.edge->dst : edge.edge->src;
    const std::string& peer_type = g.nodes.at(peer).type;
    for (const auto& t : clause.peer_types)
        if (subtype_of(lang, peer_type, t)) return true;
    return false;
}

namespace {

/// Rows are the node's incident on-edges; columns the pattern's clauses.
struct Assignment {
    std::vector<std::vector<int>> eligible;  // per row: eligible column indices
    std::vector<long long> lo;
    std::vector<long long> hi;  // -1 = unbounded
};

Assignment build_problem(const std::string& node, const ValidityRule& pattern,
                         const DynamicalGraph& g, const LanguageDef& lang) {
    Assignment p;
    for (const auto& c : pattern.clauses) {
        p.lo.push_back(c.lo);
        p.hi.push_back(c.hi ? *c.hi : -1);
    }
    for (const auto& ie : incident_edges(g, node)) {
        if (!ie.edge->on) continue;  // off edges are excluded from patterns
        std::vector<int> cols;
        for (size_t j = 0; j < pattern.clauses.size(); ++j)
            if (matches_clause(node, ie, pattern.clauses[j], g, lang))
                cols.push_back(static_cast<int>(j));
        p.eligible.push_back(std::move(cols));
    }
    return p;
}

bool solve(const Assignment& p) {
    const size_t rows = p.eligible.size(), cols = p.lo.size();
    std::vector<long long> count(cols, 0);
    // memo key: (row, counts) with counts capped where further increase is
    // irrelevant (hi for bounded columns, lo for unbounded ones)
    std::vector<long long> cap(cols);
    for (size_t j = 0; j < cols; ++j)
        cap[j] = p.hi[j] >= 0 ? p.hi[j] : p.lo[j];
    std::map<std::vector<long long>, bool> memo;

    std::function<bool(size_t)> rec = [&](size_t row) -> bool {
        long long deficit = 0;
        for (size_t j = 0; j < cols; ++j) deficit += std::max<long long>(0, p.lo[j] - count[j]);
        if (deficit > static_cast<long long>(rows - row)) return false;
        if (row == rows) return true;  // deficit is 0 here
        std::vector<long long> key(cols + 1);
        key[0] = static_cast<long long>(row);
        for (size_t j = 0; j < cols; ++j) key[j + 1] = std::min(count[j], cap[j]);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool ok = false;
        for (int j : p.eligible[row]) {
            if (p.hi[j] >= 0 && count[j] >= p.hi[j]) continue;
            ++count[j];
            ok = rec(row + 1);
            --count[j];
            if (ok) break;
        }
        memo.emplace(std::move(key), ok);
        return ok;
    };
    return rec(0);
}

}  // namespace

bool is_described(const std::string& node, const ValidityRule& pattern, const DynamicalGraph& g,
                  const LanguageDef& lang) {
    return solve(build_problem(node, pattern, g, lang));
}

bool is_described_bruteforce(const std::string& node, const ValidityRule& pattern,
                             const DynamicalGraph& g, const LanguageDef& lang) {
    auto p = build_problem(node, pattern, g, lang);
    const size_t rows = p.eligible.size(), cols = p.lo.size();
    std::vector<size_t> choice(rows, 0);
    while (true) {
        std::vector<long long> count(cols, 0);
        bool assignable = true;
        for (size_t i = 0; i < rows && assignable; ++i) {
            if (choice[i] >= p.eligible[i].size())
                assignable = false;
            else
                ++count[p.eligible[i][choice[i]]];
        }
        if (assignable) {
            bool ok = true;
            for (size_t j = 0; j < cols; ++j)
                ok = ok && count[j] >= p.lo[j] && (p.hi[j] < 0 || count[j] <= p.hi[j]);
            if (ok) return true;
        }
        // next assignment vector (row i ranges over eligible[i] or the single
        // "stuck" state when a row has no eligible column)
        size_t i = 0;
        for (; i < rows; ++i) {
            size_t limit = std::max<size_t>(p.eligible[i].size(), 1);
            if (++choice[i] < limit) break;
            choice[i] = 0;
        }
        if (i == rows) return false;
    }
}

ValidationReport validate(const DynamicalGraph& g, const LanguageDef& lang) {
    ValidationReport report;
    if (lang.extern_check) {
        const auto* check = GlobalCheckRegistry::instance().find(*lang.extern_check);
        if (!check) throw ArkError("unknown global check '" + *lang.extern_check + "'");
        auto res = (*check)(g, lang);
        report.global_ok = res.ok;
        report.global_explanation = res.explanation;
    }

    std::map<std::string, NodeVerdict> verdicts;
    for (const auto& [name, n] : g.nodes) verdicts[name] = {name, true, ""};

    auto fail = [&](const std::string& node, const std::string& why) {
        auto& v = verdicts[node];
        v.ok = false;
        if (!v.reason.empty()) v.reason += "; ";
        v.reason += why;
    };

    // dangling-connection check: every on-edge must dispatch at least one
    // on-production rule at some ancestor level
    for (const auto& [name, e] : g.edges) {
        if (!e.on) continue;
        const auto& st = g.nodes.at(e.src).type;
        const auto& dt = g.nodes.at(e.dst).type;
        bool has_rule = false;
        try {
            if (e.src == e.dst) {
                has_rule = lookup_self_production(lang, e.type, st, false) != nullptr;
            } else {
                has_rule =
                    lookup_production(lang, e.type, st, dt, RuleTarget::Source, false) ||
                    lookup_production(lang, e.type, st, dt, RuleTarget::Destination, false);
            }
        } catch (const ArkError&) {
            has_rule = true;  // ambiguous dispatch is a compile error, not dangling
        }
        if (!has_rule)
            fail(e.src, "edge '" + name + "' (" + e.type + ", " + st + " -> " + dt +
                            ") has no production rule at any ancestor level");
    }

    for (const auto& [name, n] : g.nodes) {
        auto rules = collect_validity_rules(lang, n.type);
        bool has_accept = false, accepted = false;
        for (const auto* r : rules) {
            if (r->accept) {
                has_accept = true;
                if (!accepted && is_described(name, *r, g, lang)) accepted = true;
            } else if (is_described(name, *r, g, lang)) {
                fail(name, "matches a rejected pattern for type " + r->node_type);
            }
        }
        if (has_accept && !accepted)
            fail(name, "matches no accepted pattern for type " + n.type);
    }

    report.ok = report.global_ok;
    for (auto& [name, v] : verdicts) {
        report.ok = report.ok && v.ok;
        report.nodes.push_back(std::move(v));
    }
    return report;
}

std::string ValidationReport::to_text() const {
    std::string out = std::string("graph: ") + (ok ? "valid" : "INVALID") + "\n";
    if (!global_explanation.empty() || !global_ok)
        out += std::string("global check: ") + (global_ok ? "pass" : "FAIL") +
               (global_explanation.empty() ? "" : " (" + global_explanation + ")") + "\n";
    for (const auto& v : nodes)
        if (!v.ok) out += "node " + v.node + ": FAIL (" + v.reason + ")\n";
    return out;
}

std::string ValidationReport::to_json_text() const {
    nlohmann::ordered_json j;
    j["valid"] = ok;
    j["global"] = {{"ok", global_ok}, {"explanation", global_explanation}};
    j["nodes"] = nlohmann::ordered_json::object();
    for (const auto& v : nodes)
        j["nodes"][v.node] = {{"ok", v.ok}, {"reason", v.reason}};
    return j.dump(2) + "\n";
}

}  // namespace ark
