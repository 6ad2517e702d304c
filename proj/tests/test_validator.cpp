#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ark/parser.hpp"
#include "ark/validator.hpp"

using namespace ark;

namespace {

LanguagePtr resolve_text(const std::string& src, LanguageRegistry& reg) {
    DiagnosticList diags;
    auto prog = parse(src, diags);
    REQUIRE(!diags.has_errors());
    LanguagePtr last;
    for (const auto& st : prog.statements)
        if (const auto* l = std::get_if<LangDefAst>(&st.node)) {
            last = resolve_language(*l, reg, diags);
            INFO(diags.to_string());
            REQUIRE(last);
            reg.add(last);
        }
    return last;
}

// Type lattice for the matching tests: B <: A, C standalone; Fe <: E.
const char* kVl = R"(
lang vl {
  ntyp A(1, sum) { init(0) real[-10.0, 10.0] }
  ntyp B(1, sum) inherits A {}
  ntyp C(1, sum) { init(0) real[-10.0, 10.0] }
  etyp E {}
  etyp Fe inherits E {}
}
)";

DynamicalGraph& vl_add_node(DynamicalGraph& g, const std::string& name, const std::string& type) {
    GraphNode n;
    n.name = name;
    n.type = type;
    g.nodes[name] = n;
    return g;
}

DynamicalGraph& vl_add_edge(DynamicalGraph& g, const std::string& name, const std::string& src,
                            const std::string& dst, const std::string& type, bool on = true) {
    GraphEdge e;
    e.name = name;
    e.src = src;
    e.dst = dst;
    e.type = type;
    e.on = on;
    g.edges[name] = e;
    return g;
}

MatchClause clause(long long lo, std::optional<long long> hi, const std::string& et,
                   MatchDir dir = MatchDir::Any, std::vector<std::string> peers = {}) {
    MatchClause c;
    c.lo = lo;
    c.hi = hi;
    c.edge_type = et;
    c.dir = dir;
    c.peer_types = std::move(peers);
    return c;
}

ValidityRule pattern(std::vector<MatchClause> clauses) {
    ValidityRule r;
    r.node_type = "A";
    r.clauses = std::move(clauses);
    return r;
}

}  // namespace

TEST_CASE("clause matching is subtype-aware and direction-sensitive") {
    LanguageRegistry reg;
    auto lang = resolve_text(kVl, reg);
    DynamicalGraph g;
    vl_add_node(g, "F", "A");
    vl_add_node(g, "p", "B");
    vl_add_edge(g, "out", "F", "p", "Fe");
    vl_add_edge(g, "in", "p", "F", "E");
    vl_add_edge(g, "loop", "F", "F", "E");

    auto inc = incident_edges(g, "F");
    REQUIRE(inc.size() == 3);
    auto find = [&](const std::string& name) -> const IncidentEdge& {
        for (const auto& ie : inc)
            if (ie.edge->name == name) return ie;
        throw std::runtime_error("missing " + name);
    };

    // Fe is an E; the converse fails
    CHECK(matches_clause("F", find("out"), clause(0, 1, "E"), g, *lang));
    CHECK(matches_clause("F", find("out"), clause(0, 1, "Fe"), g, *lang));
    CHECK_FALSE(matches_clause("F", find("in"), clause(0, 1, "Fe"), g, *lang));

    // direction relative to the focal node
    CHECK(matches_clause("F", find("out"), clause(0, 1, "E", MatchDir::Outgoing), g, *lang));
    CHECK_FALSE(matches_clause("F", find("out"), clause(0, 1, "E", MatchDir::Incoming), g, *lang));
    CHECK(matches_clause("F", find("in"), clause(0, 1, "E", MatchDir::Incoming), g, *lang));

    // peer type filters respect subtyping: B peer against [A]
    CHECK(matches_clause("F", find("out"), clause(0, 1, "E", MatchDir::Outgoing, {"A"}), g, *lang));
    CHECK_FALSE(
        matches_clause("F", find("out"), clause(0, 1, "E", MatchDir::Outgoing, {"C"}), g, *lang));

    // directed forms never match a self-loop; the undirected form does
    CHECK_FALSE(matches_clause("F", find("loop"), clause(0, 9, "E", MatchDir::Outgoing), g, *lang));
    CHECK_FALSE(matches_clause("F", find("loop"), clause(0, 9, "E", MatchDir::Incoming), g, *lang));
    CHECK(matches_clause("F", find("loop"), clause(0, 9, "E", MatchDir::Any), g, *lang));
}

TEST_CASE("is_described handles bounds, unbounded clauses, and off edges") {
    LanguageRegistry reg;
    auto lang = resolve_text(kVl, reg);
    DynamicalGraph g;
    vl_add_node(g, "F", "A");
    vl_add_node(g, "p", "B");
    vl_add_node(g, "q", "C");
    vl_add_edge(g, "e1", "F", "p", "E");
    vl_add_edge(g, "e2", "F", "p", "E");
    vl_add_edge(g, "e3", "F", "q", "Fe");
    vl_add_edge(g, "off1", "F", "q", "E", /*on=*/false);

    // two edges to B-peers plus exactly one Fe
    CHECK(is_described(
        "F",
        pattern({clause(2, 2, "E", MatchDir::Any, {"B"}), clause(1, 1, "Fe", MatchDir::Any)}), g,
        *lang));
    // every on-edge must land somewhere: dropping the Fe clause breaks it
    CHECK_FALSE(is_described("F", pattern({clause(2, 2, "E", MatchDir::Any, {"B"})}), g, *lang));
    // the catch-all picks up the remainder
    CHECK(is_described(
        "F", pattern({clause(2, 2, "E", MatchDir::Any, {"B"}), clause(0, std::nullopt, "E")}), g,
        *lang));
    // lower bounds above the edge supply fail
    CHECK_FALSE(is_described("F", pattern({clause(4, std::nullopt, "E")}), g, *lang));
    // off edges are invisible: three on-edges in total
    CHECK(is_described("F", pattern({clause(3, 3, "E")}), g, *lang));
    // a clause can be forced to overflow its upper bound
    CHECK_FALSE(
        is_described("F", pattern({clause(0, 1, "E", MatchDir::Any, {"B"}), clause(1, 1, "Fe")}),
                     g, *lang));
}

TEST_CASE("assignment solver agrees with brute force on random instances") {
    LanguageRegistry reg;
    auto lang = resolve_text(kVl, reg);
    std::mt19937_64 rng(2024);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    const char* ntypes[] = {"A", "B", "C"};
    const char* etypes[] = {"E", "Fe"};
    const MatchDir dirs[] = {MatchDir::Outgoing, MatchDir::Incoming, MatchDir::Any};

    int described = 0, rejected = 0;
    for (int trial = 0; trial < 800; ++trial) {
        DynamicalGraph g;
        vl_add_node(g, "F", ntypes[pick(3)]);
        for (int i = 0; i < 3; ++i) vl_add_node(g, "p" + std::to_string(i), ntypes[pick(3)]);
        const int n_edges = pick(8);
        for (int i = 0; i < n_edges; ++i) {
            std::string peer = "p" + std::to_string(pick(3));
            std::string a = "F", b = peer;
            if (pick(4) == 0) b = "F";  // occasional self-loop
            if (pick(2)) std::swap(a, b);
            vl_add_edge(g, "e" + std::to_string(i), a, b, etypes[pick(2)], pick(8) != 0);
        }
        std::vector<MatchClause> clauses;
        const int n_clauses = 1 + pick(4);
        for (int i = 0; i < n_clauses; ++i) {
            long long lo = pick(2);
            std::optional<long long> hi;
            if (pick(2) != 0) hi = lo + pick(4);
            std::vector<std::string> peers;
            for (int t = 0; t < 3; ++t)
                if (pick(3) != 0) peers.push_back(ntypes[t]);
            clauses.push_back(clause(lo, hi, etypes[pick(2)], dirs[pick(3)], peers));
        }
        auto pat = pattern(std::move(clauses));
        const bool fast = is_described("F", pat, g, *lang);
        const bool slow = is_described_bruteforce("F", pat, g, *lang);
        INFO("trial ", trial);
        REQUIRE(fast == slow);
        (fast ? described : rejected)++;
    }
    // the generator exercises both outcomes
    CHECK(described > 100);
    CHECK(rejected > 100);
}

TEST_CASE("validate combines patterns, dangling edges, and global checks") {
    const char* kWl = R"(
lang wl {
  ntyp A(1, sum) { init(0) real[-10.0, 10.0] }
  ntyp B(1, sum) { init(0) real[-10.0, 10.0] }
  etyp E {}
  prod(e:E, s:A -> t:B) t <= var(s)
  prod(e:E, n:A -> n:A) n <= var(n)
  prod(e:E, n:B -> n:B) n <= var(n)
  cstr n:A { acc match(0, 2, E) }
  cstr n:B { rej match(2, inf, E, [A] -> n) match(0, inf, E) }
}
)";
    LanguageRegistry reg;
    auto lang = resolve_text(kWl, reg);

    SUBCASE("conforming graph passes") {
        DynamicalGraph g;
        vl_add_node(g, "a", "A");
        vl_add_node(g, "b", "B");
        vl_add_edge(g, "e", "a", "b", "E");
        auto rep = validate(g, *lang);
        INFO(rep.to_text());
        CHECK(rep.ok);
        CHECK(rep.nodes.size() == 2);
    }
    SUBCASE("accept pattern fails on overflow") {
        DynamicalGraph g;
        vl_add_node(g, "a", "A");
        for (int i = 0; i < 3; ++i) {
            vl_add_node(g, "b" + std::to_string(i), "B");
            vl_add_edge(g, "e" + std::to_string(i), "a", "b" + std::to_string(i), "E");
        }
        auto rep = validate(g, *lang);
        CHECK_FALSE(rep.ok);
        bool a_failed = false;
        for (const auto& v : rep.nodes) a_failed |= (v.node == "a" && !v.ok);
        CHECK(a_failed);
    }
    SUBCASE("reject pattern fires") {
        DynamicalGraph g;
        vl_add_node(g, "a0", "A");
        vl_add_node(g, "a1", "A");
        vl_add_node(g, "b", "B");
        vl_add_edge(g, "e0", "a0", "b", "E");
        vl_add_edge(g, "e1", "a1", "b", "E");
        auto rep = validate(g, *lang);
        CHECK_FALSE(rep.ok);
        bool b_failed = false;
        for (const auto& v : rep.nodes) b_failed |= (v.node == "b" && !v.ok);
        CHECK(b_failed);
    }
    SUBCASE("dangling connection lands on the source node") {
        DynamicalGraph g;
        vl_add_node(g, "a", "A");
        vl_add_node(g, "b", "B");
        vl_add_edge(g, "back", "b", "a", "E");  // no rule for B -> A
        auto rep = validate(g, *lang);
        CHECK_FALSE(rep.ok);
        for (const auto& v : rep.nodes) {
            if (v.node == "b") {
                CHECK_FALSE(v.ok);
                CHECK(v.reason.find("back") != std::string::npos);
            }
        }
    }
    SUBCASE("off edges do not dangle") {
        DynamicalGraph g;
        vl_add_node(g, "a", "A");
        vl_add_node(g, "b", "B");
        vl_add_edge(g, "back", "b", "a", "E", /*on=*/false);
        auto rep = validate(g, *lang);
        INFO(rep.to_text());
        CHECK(rep.ok);
    }
    SUBCASE("report serializations carry the verdicts") {
        DynamicalGraph g;
        vl_add_node(g, "a", "A");
        auto rep = validate(g, *lang);
        CHECK(rep.to_text().find("a") != std::string::npos);
        CHECK(rep.to_json_text().find("\"ok\"") != std::string::npos);
    }
}

TEST_CASE("unknown global check names are an error") {
    const char* kXl = R"(
lang xl {
  ntyp A(1, sum) { init(0) real[-10.0, 10.0] }
  etyp E {}
  prod(e:E, n:A -> n:A) n <= var(n)
  extern-func no-such-check
}
)";
    LanguageRegistry reg;
    auto lang = resolve_text(kXl, reg);
    DynamicalGraph g;
    vl_add_node(g, "a", "A");
    CHECK_THROWS_AS(validate(g, *lang), ArkError);
}
