#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ark/compiler.hpp"
#include "ark/sim.hpp"
#include "ark/stdlib.hpp"
#include "ark/validator.hpp"

using namespace ark;

namespace {

LanguageRegistry& registry() {
    static LanguageRegistry reg = [] {
        LanguageRegistry r;
        stdlib::load(r);
        return r;
    }();
    return reg;
}

ValidationReport validate_in(const DynamicalGraph& g) {
    return validate(g, *registry().find(g.language));
}

Trajectory run(const DynamicalGraph& g, double t_end, int samples) {
    auto sys = compile(g, *registry().find(g.language));
    SimConfig cfg;
    cfg.t_end = t_end;
    cfg.samples = samples;
    return integrate(sys, cfg);
}

}  // namespace

TEST_CASE("bundle languages resolve and global checks register") {
    for (const char* name :
         {"tln", "gmc-tln", "cnn", "hw-cnn", "obc", "ofs-obc", "intercon-obc"}) {
        INFO(name);
        CHECK(registry().find(name));
    }
    CHECK(GlobalCheckRegistry::instance().find("grid-topology"));
    CHECK(GlobalCheckRegistry::instance().find("groups-respected"));
    CHECK(subtype_of(*registry().find("gmc-tln"), "Vm", "V"));
    CHECK(subtype_of(*registry().find("intercon-obc"), "Cpl_g", "Cpl"));
}

TEST_CASE("shipped example graphs validate in their languages") {
    for (const auto& f : stdlib::examples()) {
        std::map<std::string, Value> args;
        if (f.name == "br-func") args["br"] = Value::of_int(1);
        auto g = invoke(f, args, 1, registry());
        auto rep = validate_in(g);
        INFO(f.name, ": ", rep.to_text());
        CHECK(rep.ok);
    }
}

TEST_CASE("generated t-lines validate; the malformed one is rejected") {
    using stdlib::TlineVariant;
    for (auto variant :
         {TlineVariant::Plain, TlineVariant::MismatchNodes, TlineVariant::MismatchEdges}) {
        stdlib::TlineParams p;
        p.variant = variant;
        auto lin = stdlib::build_linear_tline(registry(), 9, p, 2);
        auto br = stdlib::build_branched_tline(registry(), 9, 3, p, 2);
        INFO(validate_in(lin).to_text());
        CHECK(validate_in(lin).ok);
        CHECK(validate_in(br).ok);
    }
    stdlib::TlineParams p;
    auto bad = stdlib::build_malformed_tline(registry(), 9, p, 2);
    auto rep = validate_in(bad);
    CHECK_FALSE(rep.ok);
    bool named = false;
    for (const auto& v : rep.nodes)
        if (!v.ok && (v.node == "V000" || v.node == "VX")) named = true;
    CHECK(named);
}

TEST_CASE("pulse travels down a matched line and reflects off a stub") {
    stdlib::TlineParams p;  // 1 ns per L-C section, 20 ns pulse
    const int segments = 53;
    auto lin = stdlib::build_linear_tline(registry(), segments, p, 1);
    auto traj = run(lin, 8e-8, 801);
    int out = traj.var_index("V052");
    REQUIRE(out >= 0);
    auto y = traj.column(out);
    auto peaks = find_peaks(y, 0.2, 0.2);
    REQUIRE(!peaks.empty());
    // matched termination: amplitude I/(G + Y0) = 0.5, no later echo
    CHECK(y[peaks[0]] == doctest::Approx(0.5).epsilon(0.15));
    CHECK(peaks.size() == 1);

    auto br = stdlib::build_branched_tline(registry(), segments, 10, p, 1);
    auto traj2 = run(br, 8e-8, 801);
    auto y2 = traj2.column(traj2.var_index("V052"));
    auto peaks2 = find_peaks(y2, 0.2, 0.2);
    REQUIRE(peaks2.size() >= 2);
    // three-way junction: transmitted amplitude drops to ~2/3 of the line's
    CHECK(y2[peaks2[0]] / y[peaks[0]] == doctest::Approx(2.0 / 3.0).epsilon(0.2));
    // the open stub returns an echo ~20 sections later
    double t_echo = traj2.times[peaks2[1]];
    CHECK(t_echo > traj2.times[peaks2[0]] + 1e-8);
    CHECK(t_echo < 7e-8);
}

TEST_CASE("cnn grid validates and reproduces the edge-detection oracle") {
    auto img = stdlib::random_image(8, 8, 11);
    auto g = stdlib::build_cnn_grid(registry(), img, /*hw=*/false, 1);
    auto rep = validate_in(g);
    INFO(rep.to_text());
    CHECK(rep.ok);
    auto out = stdlib::cnn_readout(g, registry(), 8, 8);
    CHECK(out == stdlib::cnn_edge_oracle(img));
}

TEST_CASE("grid-topology global check rejects long-range template edges") {
    auto img = stdlib::random_image(3, 3, 4);
    auto g = stdlib::build_cnn_grid(registry(), img, false, 1);
    // splice a non-neighbor template edge into the finished graph
    GraphEdge e;
    e.name = "zz_far";
    e.type = "iE";
    e.src = "U_00_00";
    e.dst = "V_02_02";
    e.attrs["g"] = Value::of_real(1.0);
    g.edges[e.name] = e;
    auto rep = validate_in(g);
    CHECK_FALSE(rep.ok);
    CHECK_FALSE(rep.global_ok);
    CHECK(rep.global_explanation.find("zz_far") != std::string::npos);
}

TEST_CASE("hw-cnn mismatch perturbs but rarely flips the output") {
    auto img = stdlib::random_image(8, 8, 21);
    auto g = stdlib::build_cnn_grid(registry(), img, /*hw=*/true, 7);
    CHECK(validate_in(g).ok);
    auto out = stdlib::cnn_readout(g, registry(), 8, 8);
    auto want = stdlib::cnn_edge_oracle(img);
    int agree = 0;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) agree += out[r][c] == want[r][c];
    CHECK(agree >= 58);  // >= 90% of 64 pixels
}

TEST_CASE("two coupled oscillators settle in anti-phase") {
    auto res = stdlib::maxcut_solve(registry(), {{0, 1}}, 2, false, 3, 0.35);
    CHECK(res.sync);
    CHECK(res.solved);
    CHECK(res.partition[0] != res.partition[1]);
    CHECK(res.cut == 1);
    CHECK(res.best_cut == 1);
}

TEST_CASE("oscillator networks solve small max-cut instances") {
    int solved = 0, sync = 0;
    const int trials = 20;
    for (std::uint64_t seed = 0; seed < trials; ++seed) {
        auto edges = stdlib::random_connected_graph(4, seed + 100);
        auto res = stdlib::maxcut_solve(registry(), edges, 4, false, seed, 0.35);
        sync += res.sync;
        solved += res.solved;
        if (res.sync) CHECK(res.cut <= res.best_cut);
    }
    CHECK(sync >= 15);
    CHECK(solved >= 13);
}

TEST_CASE("offset couplers carry sampled phase offsets") {
    auto g = stdlib::build_obc(registry(), 4, {{0, 1}, {1, 2}, {2, 3}}, /*offset=*/true, 6);
    CHECK(g.language == "ofs-obc");
    CHECK(validate_in(g).ok);
    const auto& ofs = g.edges.at("c000").attrs.at("ofs");
    CHECK(ofs.mismatched);
    CHECK(ofs.nominal == 0.0);
    CHECK(ofs.real != 0.0);  // s1 = 0.05 additive spread
}

TEST_CASE("groups-respected enforces global couplers across groups") {
    std::vector<int> groups = {0, 0, 1, 1};
    std::vector<stdlib::InterconEdge> good = {
        {0, 1, false, 1.0}, {2, 3, false, 1.0}, {1, 2, true, 7.5}};
    auto g = stdlib::build_intercon_obc(registry(), groups, good, 2);
    auto rep = validate_in(g);
    INFO(rep.to_text());
    CHECK(rep.ok);
    CHECK(rep.global_explanation.find("total-cost=9.5") != std::string::npos);

    std::vector<stdlib::InterconEdge> bad = good;
    bad[2].global = false;  // cross-group edge on a local coupler
    auto g2 = stdlib::build_intercon_obc(registry(), groups, bad, 2);
    auto rep2 = validate_in(g2);
    CHECK_FALSE(rep2.ok);
    CHECK(rep2.global_explanation.find("c002") != std::string::npos);
}

TEST_CASE("stdlib source text parses standalone") {
    CHECK(stdlib::source_text().find("lang tln") != std::string::npos);
    CHECK(stdlib::examples().size() >= 2);
    CHECK(stdlib::find_example("line5"));
    CHECK(!stdlib::find_example("missing"));
}
