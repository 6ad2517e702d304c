#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ark/lang.hpp"
#include "ark/parser.hpp"

using namespace ark;

namespace {

/// Parses a program of language definitions and resolves them in order.
LanguageRegistry resolve_all(const std::string& src, DiagnosticList& diags) {
    LanguageRegistry reg;
    auto prog = parse(src, diags);
    REQUIRE(!diags.has_errors());
    for (const auto& st : prog.statements) {
        const auto& lang_ast = std::get<LangDefAst>(st.node);
        auto lang = resolve_language(lang_ast, reg, diags);
        if (lang) reg.add(lang);
    }
    return reg;
}

LanguageRegistry resolve_ok(const std::string& src) {
    DiagnosticList diags;
    auto reg = resolve_all(src, diags);
    INFO(diags.to_string());
    REQUIRE(!diags.has_errors());
    return reg;
}

void resolve_expect_error(const std::string& src, const std::string& needle) {
    DiagnosticList diags;
    resolve_all(src, diags);
    INFO("expected error containing: " << needle << "\n" << diags.to_string());
    CHECK(diags.has_errors());
    CHECK(diags.to_string().find(needle) != std::string::npos);
}

const char* kBase = R"(
lang base {
  ntyp V(1, sum) {
    attr c = real[0.0, 1e-8]
    init(0) real[-10.0, 10.0]
  }
  ntyp I(1, sum) {
    attr l = real[0.0, 1e-8]
    init(0) real[-10.0, 10.0]
  }
  etyp E {}
  prod(e:E, s:I -> t:V) t <= var(s) / t.c
  prod(e:E, s:V -> t:I) t <= var(s) / t.l
  cstr n:V {
    rej match(1, inf, E, n -> [V])
  }
}
)";

}  // namespace

TEST_CASE("resolve: inherited types are materialized") {
    auto reg = resolve_ok(std::string(kBase) + R"(
lang child inherits base {
  ntyp Vm(1, sum) inherits V {
    attr c = real[1e-10, 1e-8] mm(0.1, 0.0)
  }
  etyp Em inherits E {
    attr w = real[0.0, 2.0]
  }
  prod(e:Em, s:I -> t:Vm) t <= e.w * var(s) / t.c
}
)");
    auto child = reg.find("child");
    REQUIRE(child);
    CHECK(child->has_node_type("V"));
    CHECK(child->has_node_type("Vm"));
    const auto& vm = child->node_types.at("Vm");
    CHECK(vm.order == 1);
    CHECK(vm.attributes.at("c").has_mismatch);
    CHECK(vm.attributes.at("c").x0 == doctest::Approx(1e-10));
    REQUIRE(vm.init_slots.size() == 1);  // inherited
    CHECK(child->production_rules.size() == 3);
    CHECK(child->validity_rules.size() == 1);  // inherited rej pattern
}

TEST_CASE("subtype_of: reflexive, transitive, and error on unknown") {
    auto reg = resolve_ok(std::string(kBase) + R"(
lang child inherits base {
  ntyp Vm(1, sum) inherits V {}
  ntyp Vmm(1, sum) inherits Vm {}
  prod(e:E, s:I -> t:Vmm) t <= var(s)
}
)");
    auto child = reg.find("child");
    CHECK(subtype_of(*child, "V", "V"));
    CHECK(subtype_of(*child, "Vm", "V"));
    CHECK(subtype_of(*child, "Vmm", "V"));
    CHECK(!subtype_of(*child, "V", "Vm"));
    CHECK(!subtype_of(*child, "V", "I"));
    CHECK_THROWS_AS(subtype_of(*child, "nope", "V"), ArkError);
}

TEST_CASE("lookup_production: distance-based dispatch") {
    auto reg = resolve_ok(std::string(kBase) + R"(
lang child inherits base {
  ntyp Vm(1, sum) inherits V {}
  ntyp Im(1, sum) inherits I {}
  etyp Em inherits E {}
}
)");
    auto base = reg.find("base");
    auto child = reg.find("child");
    // exact match, distance 0
    const auto* r0 = lookup_production(*base, "E", "I", "V", RuleTarget::Destination, false);
    REQUIRE(r0);
    CHECK(r0->src_type == "I");
    // derived types fall back to the parent rule (distance 3)
    const auto* r1 = lookup_production(*child, "Em", "Im", "Vm", RuleTarget::Destination, false);
    CHECK(r1 == lookup_production(*child, "E", "I", "V", RuleTarget::Destination, false));
    // no source-targeted rule exists
    CHECK(lookup_production(*child, "E", "I", "V", RuleTarget::Source, false) == nullptr);
    // off-rules are a separate table
    CHECK(lookup_production(*child, "E", "I", "V", RuleTarget::Destination, true) == nullptr);
}

TEST_CASE("lookup_production: more specific rule wins; ties are ambiguous") {
    auto reg = resolve_ok(std::string(kBase) + R"(
lang a inherits base {
  ntyp Vm(1, sum) inherits V {}
  prod(e:E, s:I -> t:Vm) t <= 2.0 * var(s)
}
lang b inherits a {
  ntyp Im(1, sum) inherits I {}
  prod(e:E, s:Im -> t:V) t <= 3.0 * var(s)
}
)");
    auto a = reg.find("a");
    const auto* r = lookup_production(*a, "E", "I", "Vm", RuleTarget::Destination, false);
    REQUIRE(r);
    CHECK(r->declared_in == "a");  // distance 0 beats base's distance 1
    // in b, (E, Im, Vm) sees a's rule at distance 1 (src hop) and b's rule at
    // distance 1 (dst hop): ambiguous
    auto b = reg.find("b");
    CHECK_THROWS_AS(lookup_production(*b, "E", "Im", "Vm", RuleTarget::Destination, false),
                    ArkError);
    // unrelated lookup still fine
    CHECK(lookup_production(*b, "E", "Im", "V", RuleTarget::Destination, false)->declared_in ==
          "b");
}

TEST_CASE("collect_validity_rules walks the ancestor chain") {
    auto reg = resolve_ok(std::string(kBase) + R"(
lang child inherits base {
  ntyp Vm(1, sum) inherits V {}
  cstr n:Vm {
    acc match(0, 2, E)
  }
}
)");
    auto child = reg.find("child");
    CHECK(collect_validity_rules(*child, "V").size() == 1);   // base's rej only
    CHECK(collect_validity_rules(*child, "Vm").size() == 2);  // rej via V + own acc
    CHECK(collect_validity_rules(*child, "I").empty());
}

TEST_CASE("resolve: rejected language-level violations") {
    // unknown parent language
    resolve_expect_error("lang x inherits nope {}", "unknown parent language");
    // order mismatch in derived type
    resolve_expect_error(std::string(kBase) + R"(
lang x inherits base { ntyp Vm(2, sum) inherits V { init(1) real[0.0, 1.0] } }
)", "parent order");
    // widened attribute range
    resolve_expect_error(std::string(kBase) + R"(
lang x inherits base { ntyp Vm(1, sum) inherits V { attr c = real[-1.0, 1e-8] } }
)", "narrow");
    // datatype kind change
    resolve_expect_error(std::string(kBase) + R"(
lang x inherits base { ntyp Vm(1, sum) inherits V { attr c = int[0, 5] } }
)", "datatype");
    // verbatim restatement of a parent rule
    resolve_expect_error(std::string(kBase) + R"(
lang x inherits base {
  ntyp Vm(1, sum) inherits V {}
  prod(e:E, s:I -> t:V) t <= var(s) / t.c
}
)", "overridden");
    // new rule with no new type
    resolve_expect_error(std::string(kBase) + R"(
lang x inherits base {
  ntyp Vm(1, sum) inherits V {}
  prod(e:E, s:V -> t:V) t <= var(s)
}
)", "at least one");
    // missing init slot
    resolve_expect_error("lang x { ntyp V(2, sum) { init(0) real[0.0, 1.0] } }",
                         "missing an init");
    // duplicate type name
    resolve_expect_error("lang x { ntyp V(0, sum) {} etyp V {} }", "duplicate type");
    // unknown attribute in production expression
    resolve_expect_error(std::string(kBase) + R"(
lang x inherits base {
  ntyp Vm(1, sum) inherits V {}
  prod(e:E, s:I -> t:Vm) t <= var(s) / t.zz
}
)", "no attribute");
    // self rule with unequal types
    resolve_expect_error(R"(
lang x {
  ntyp A(1, sum) { init(0) real[0.0, 1.0] }
  ntyp B(1, sum) { init(0) real[0.0, 1.0] }
  etyp E {}
  prod(e:E, n:A -> n:B) n <= 1.0
}
)", "self");
}

TEST_CASE("casting soundness: parent-only lookups identical in child") {
    auto reg = resolve_ok(std::string(kBase) + R"(
lang child inherits base {
  ntyp Vm(1, sum) inherits V {}
  prod(e:E, s:I -> t:Vm) t <= 5.0
}
)");
    auto base = reg.find("base");
    auto child = reg.find("child");
    // for parent-language types only, the child dispatches the same rules
    for (bool off : {false, true}) {
        const auto* pb = lookup_production(*base, "E", "I", "V", RuleTarget::Destination, off);
        const auto* pc = lookup_production(*child, "E", "I", "V", RuleTarget::Destination, off);
        if (!pb) {
            CHECK(pc == nullptr);
        } else {
            REQUIRE(pc);
            CHECK(pb->declared_in == pc->declared_in);
        }
    }
}
