// Acceptance suite: one test case per criterion, each printing a single
// ACCEPTANCE <n> ... PASS/FAIL line (with its runtime) in addition to the
// regular assertions.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "ark/cli.hpp"
#include "ark/compiler.hpp"
#include "ark/experiments.hpp"
#include "ark/parser.hpp"
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

class Criterion {
public:
    Criterion(int n, const char* title, double budget_s)
        : n_(n), title_(title), budget_s_(budget_s), start_(clock::now()) {}

    void finish(bool ok) {
        const double secs =
            std::chrono::duration<double>(clock::now() - start_).count();
        const bool in_budget = budget_s_ <= 0 || secs < budget_s_;
        std::printf("ACCEPTANCE %2d %-28s: %s (%.2f s)\n", n_, title_,
                    ok && in_budget ? "PASS" : "FAIL", secs);
        std::fflush(stdout);
        CHECK(ok);
        CHECK(in_budget);
    }

private:
    using clock = std::chrono::steady_clock;
    int n_;
    const char* title_;
    double budget_s_;
    clock::time_point start_;
};

Trajectory run(const DynamicalGraph& g, double t_end, int samples, double rtol = 1e-6) {
    auto sys = compile(g, *registry().find(g.language));
    SimConfig cfg;
    cfg.t_end = t_end;
    cfg.samples = samples;
    cfg.rtol = rtol;
    cfg.atol = rtol * 1e-3;
    return integrate(sys, cfg);
}

std::filesystem::path tmp_dir() {
    auto p = std::filesystem::temp_directory_path() / "ark_acceptance";
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("1 telegrapher oracle equivalence") {
    Criterion c(1, "telegrapher-oracle", 1.0);
    // 11-segment line at unit scales; independent hand-coded Eq. RHS
    stdlib::TlineParams p;
    p.c = 1.0;
    p.l = 1.0;
    const int segments = 11;
    auto g = stdlib::build_linear_tline(registry(), segments, p, 1);
    auto sys = compile(g, *registry().find("tln"));
    REQUIRE(static_cast<int>(sys.vars.size()) == segments);

    std::vector<int> idx(segments);
    for (int pos = 0; pos < segments; ++pos) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%c%03d", pos % 2 ? 'I' : 'V', pos);
        idx[pos] = sys.var_index(buf);
        REQUIRE(idx[pos] >= 0);
    }

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ud(-3.0, 3.0);
    auto ws = sys.make_workspace();
    std::vector<double> y(segments), dy, ref(segments);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        for (auto& v : y) v = ud(rng);
        const double t = trial * 1e-9;
        sys.eval_rhs(y, t, dy, ws);
        auto at = [&](int pos) { return y[static_cast<size_t>(idx[pos])]; };
        const double src = pulse_fn(t, 0.0, 2e-8);
        for (int pos = 0; pos < segments; ++pos) {
            const double prev = pos == 0 ? src : at(pos - 1);
            const double next = pos + 1 < segments ? at(pos + 1) : 0.0;
            if (pos % 2 == 0) {  // V node
                const double gcond = (pos == 0 || pos == segments - 1) ? 1.0 : 0.0;
                ref[pos] = (prev - next - gcond * at(pos)) / p.c;
            } else {  // I node
                ref[pos] = (prev - next - 0.0 * at(pos)) / p.l;
            }
        }
        for (int pos = 0; pos < segments; ++pos)
            worst = std::max(worst, std::fabs(dy[static_cast<size_t>(idx[pos])] - ref[pos]));
    }
    CHECK(worst <= 1e-12);
    c.finish(worst <= 1e-12);
}

TEST_CASE("2 branched-line echo") {
    Criterion c(2, "branched-line-echo", 10.0);
    stdlib::TlineParams p;  // L = C = 1e-9, pulse width 2e-8
    const int segments = 53;
    // tap after the mid-line junction, before the matched termination: the
    // first crest (propagation delay + dispersive rise) then lands inside the
    // observation window and the stub round trip is fully visible
    const char* probe = "V044";
    auto lin = stdlib::build_linear_tline(registry(), segments, p, 1);
    auto traj = run(lin, 8e-8, 1601);
    auto y = traj.column(traj.var_index(probe));
    auto peaks = find_peaks(y, 0.2, 0.25);

    REQUIRE(!peaks.empty());
    const double t_first = traj.times[peaks[0]];
    INFO("linear peaks=", peaks.size(), " t_first=", t_first);
    CHECK(t_first >= 1e-8);
    CHECK(t_first <= 3e-8);
    bool ok = peaks.size() == 1 && t_first >= 1e-8 && t_first <= 3e-8;

    auto br = stdlib::build_branched_tline(registry(), segments, 10, p, 1);
    auto traj2 = run(br, 8e-8, 1601);
    auto y2 = traj2.column(traj2.var_index(probe));
    auto peaks2 = find_peaks(y2, 0.2, 0.25);
    REQUIRE(!peaks.empty());
    REQUIRE(peaks2.size() >= 2);

    const double ratio = y2[peaks2[0]] / y[peaks[0]];
    const double t_echo = traj2.times[peaks2[1]];
    INFO("ratio=", ratio, " t_echo=", t_echo);
    // onset: first crossing of 10% of the echo peak after the initial pulse
    double onset = t_echo;
    for (size_t i = peaks2[0]; i < peaks2[1]; ++i) {
        double valley = *std::min_element(y2.begin() + static_cast<long>(peaks2[0]),
                                          y2.begin() + static_cast<long>(peaks2[1]));
        if (y2[i] <= valley + 0.1 * (y2[peaks2[1]] - valley)) onset = traj2.times[i];
        if (traj2.times[i] >= t_echo) break;
    }
    ok = ok && onset >= 3.5e-8 && onset <= 6e-8;
    ok = ok && std::fabs(ratio - 0.6) <= 0.15;
    CHECK(peaks.size() == 1);
    CHECK(onset >= 3.5e-8);
    CHECK(onset <= 6e-8);
    CHECK(ratio == doctest::Approx(0.6).epsilon(0.26));
    c.finish(ok);
}

TEST_CASE("3 inheritance faithfulness") {
    Criterion c(3, "inheritance-faithfulness", 0);
    auto lang_tln = registry().find("tln");
    auto lang_gmc = registry().find("gmc-tln");
    bool ok = true;

    auto rel_dev = [](const Trajectory& a, const Trajectory& b) {
        double scale = 1e-30, dev = 0;
        for (size_t i = 0; i < a.samples.size(); ++i)
            for (size_t j = 0; j < a.samples[i].size(); ++j) {
                scale = std::max(scale, std::fabs(a.samples[i][j]));
                dev = std::max(dev, std::fabs(a.samples[i][j] - b.samples[i][j]));
            }
        return dev / scale;
    };

    // every shipped tln example, recompiled under the derived language
    SimConfig cfg;
    cfg.t_end = 2e-8;
    cfg.samples = 101;
    for (const auto& f : stdlib::examples()) {
        if (f.language != "tln") continue;
        std::vector<std::map<std::string, Value>> arg_sets;
        if (f.name == "br-func")
            arg_sets = {{{"br", Value::of_int(0)}}, {{"br", Value::of_int(1)}}};
        else
            arg_sets = {{}};
        for (const auto& args : arg_sets) {
            auto g = invoke(f, args, 1, registry(), /*mismatch=*/false);
            auto a = integrate(compile(g, *lang_tln), cfg);
            auto b = integrate(compile(g, *lang_gmc), cfg);
            double dev = rel_dev(a, b);
            INFO(f.name, " dev=", dev);
            CHECK(dev <= 1e-6);
            ok = ok && dev <= 1e-6;
        }
    }

    // Em edges with ws = wt = 1 (mismatch off) behave as plain E edges
    stdlib::TlineParams plain, em;
    em.variant = stdlib::TlineVariant::MismatchEdges;
    auto ga = stdlib::build_linear_tline(registry(), 21, plain, 1, false);
    auto gb = stdlib::build_linear_tline(registry(), 21, em, 1, false);
    cfg.t_end = 4e-8;
    auto ta = integrate(compile(ga, *lang_tln), cfg);
    auto tb = integrate(compile(gb, *lang_gmc), cfg);
    double dev = rel_dev(ta, tb);
    CHECK(dev <= 1e-6);
    ok = ok && dev <= 1e-6;
    c.finish(ok);
}

TEST_CASE("4 mismatch statistics") {
    Criterion c(4, "mismatch-statistics", 5.0);
    const double nominal = 1e-9;
    double sum = 0, sumsq = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        double x = mismatch_sample(17, "slot" + std::to_string(i), "c", nominal, 0.1, 0.0);
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    bool ok = std::fabs(mean - nominal) <= 0.005 * nominal;
    ok = ok && std::fabs(sd - 0.1 * nominal) <= 0.05 * (0.1 * nominal);
    CHECK(mean == doctest::Approx(nominal).epsilon(0.005));
    CHECK(sd == doctest::Approx(0.1 * nominal).epsilon(0.05));

    stdlib::TlineParams p;
    p.variant = stdlib::TlineVariant::MismatchNodes;
    auto a = stdlib::build_linear_tline(registry(), 15, p, 123);
    auto b = stdlib::build_linear_tline(registry(), 15, p, 123);
    const bool identical = export_json(a) == export_json(b);
    CHECK(identical);
    c.finish(ok && identical);
}

TEST_CASE("5 validator oracle") {
    Criterion c(5, "validator-oracle", 0);
    LanguageRegistry reg;
    DiagnosticList diags;
    auto prog = parse(R"(
lang vl {
  ntyp A(1, sum) { init(0) real[-10.0, 10.0] }
  ntyp B(1, sum) inherits A {}
  ntyp C(1, sum) { init(0) real[-10.0, 10.0] }
  etyp E {}
  etyp Fe inherits E {}
}
)",
                      diags);
    REQUIRE(!diags.has_errors());
    auto lang = resolve_language(std::get<LangDefAst>(prog.statements[0].node), reg, diags);
    REQUIRE(lang);

    std::mt19937_64 rng(31337);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    const char* ntypes[] = {"A", "B", "C"};
    const char* etypes[] = {"E", "Fe"};
    const MatchDir dirs[] = {MatchDir::Outgoing, MatchDir::Incoming, MatchDir::Any};
    bool all_agree = true;
    for (int trial = 0; trial < 600; ++trial) {
        DynamicalGraph g;
        auto add_node = [&](const std::string& name, const std::string& type) {
            GraphNode n;
            n.name = name;
            n.type = type;
            g.nodes[name] = n;
        };
        add_node("F", ntypes[pick(3)]);
        for (int i = 0; i < 3; ++i) add_node("p" + std::to_string(i), ntypes[pick(3)]);
        const int n_edges = pick(9);  // <= 8 incident edges
        for (int i = 0; i < n_edges; ++i) {
            GraphEdge e;
            e.name = "e" + std::to_string(i);
            e.src = "F";
            e.dst = "p" + std::to_string(pick(3));
            if (pick(4) == 0) e.dst = "F";
            if (pick(2)) std::swap(e.src, e.dst);
            e.type = etypes[pick(2)];
            e.on = pick(8) != 0;
            g.edges[e.name] = e;
        }
        ValidityRule pat;
        pat.node_type = "A";
        const int n_clauses = 1 + pick(4);
        for (int i = 0; i < n_clauses; ++i) {
            MatchClause cl;
            cl.lo = pick(2);
            if (pick(2)) cl.hi = cl.lo + pick(4);
            cl.edge_type = etypes[pick(2)];
            cl.dir = dirs[pick(3)];
            for (int t = 0; t < 3; ++t)
                if (pick(3) != 0) cl.peer_types.push_back(ntypes[t]);
            pat.clauses.push_back(cl);
        }
        all_agree = all_agree &&
                    is_described("F", pat, g, *lang) == is_described_bruteforce("F", pat, g, *lang);
    }
    CHECK(all_agree);

    stdlib::TlineParams p;
    auto bad = stdlib::build_malformed_tline(registry(), 9, p, 2);
    const bool rejected = !validate(bad, *registry().find("tln")).ok;
    auto good = stdlib::build_linear_tline(registry(), 9, p, 2);
    auto branched = stdlib::build_branched_tline(registry(), 9, 3, p, 2);
    const bool accepted = validate(good, *registry().find("tln")).ok &&
                          validate(branched, *registry().find("tln")).ok;
    CHECK(rejected);
    CHECK(accepted);
    c.finish(all_agree && rejected && accepted);
}

TEST_CASE("6 cnn edge detection") {
    Criterion c(6, "cnn-edge-detection", 120.0);
    auto sum = experiments::cnn_edge(registry(), "", 20, 20, 16, 16);
    CHECK(sum.ideal_agreement_min >= 0.95);
    CHECK(sum.hw_error_rate > sum.ideal_error_rate);
    c.finish(sum.ideal_agreement_min >= 0.95 && sum.hw_error_rate > sum.ideal_error_rate);
}

TEST_CASE("7 obc max-cut") {
    Criterion c(7, "obc-maxcut", 120.0);
    auto sum = experiments::obc_maxcut(registry(), "", 200);
    INFO("ideal d1 solved=", sum.solved[0][0], " offset d1 solved=", sum.solved[1][0],
         " ideal d2 solved=", sum.solved[0][1], " offset d2 solved=", sum.solved[1][1]);
    const bool ideal_ok = sum.solved[0][0] >= 0.85;
    const bool gap_ok = sum.solved[1][0] <= sum.solved[0][0] - 0.10;
    const bool recover_ok = std::fabs(sum.solved[1][1] - sum.solved[0][1]) <= 0.05;
    CHECK(ideal_ok);
    CHECK(gap_ok);
    CHECK(recover_ok);
    c.finish(ideal_ok && gap_ok && recover_ok);
}

TEST_CASE("8 mismatch-source comparison") {
    Criterion c(8, "mismatch-source-comparison", 180.0);
    auto sum = experiments::tln_mismatch(registry(), "", 100);
    INFO("std_cint=", sum.std_cint, " std_gm=", sum.std_gm, " ratio=", sum.ratio);
    CHECK(sum.ratio >= 2.0);
    c.finish(sum.ratio >= 2.0);
}

TEST_CASE("9 integrator order and energy") {
    Criterion c(9, "integrator-order-energy", 0);
    // dphi/dt = -phi over [0, 5]
    LanguageRegistry reg;
    DiagnosticList diags;
    auto prog = parse(R"(
lang dec {
  ntyp N(1, sum) { init(0) real[-10.0, 10.0] }
  etyp E {}
  prod(e:E, n:N -> n:N) n <= -(var(n))
}
)",
                      diags);
    REQUIRE(!diags.has_errors());
    auto lang = resolve_language(std::get<LangDefAst>(prog.statements[0].node), reg, diags);
    reg.add(lang);
    GraphBuilder b(lang, 1);
    b.add_node("phi", "N");
    b.set_init("phi", 0, 1.0);
    b.add_edge("phi", "phi", "s", "E");
    auto sys = compile(b.finish(), *lang);

    auto final_error = [&](double rtol) {
        SimConfig cfg;
        cfg.t_end = 5.0;
        cfg.samples = 11;
        cfg.rtol = rtol;
        cfg.atol = 1e-16;
        cfg.max_step = 5.0;  // let tolerance, not the default step cap, govern
        auto traj = integrate(sys, cfg);
        return std::fabs(traj.samples.back()[0] - std::exp(-5.0));
    };
    const double e_loose = final_error(1e-4);
    const double e_tight = final_error(1e-5);
    const bool order_ok = e_loose / e_tight >= 8.0;
    INFO("e(1e-4)=", e_loose, " e(1e-5)=", e_tight);
    CHECK(order_ok);

    // lossless line: total LC energy constant once the input pulse ends
    stdlib::TlineParams p;
    p.g_term = 0.0;
    auto g = stdlib::build_linear_tline(registry(), 53, p, 1);
    auto traj = run(g, 6e-8, 301, 1e-9);
    auto energy_at = [&](double t) {
        size_t i = 0;
        while (i + 1 < traj.times.size() && traj.times[i] < t) ++i;
        double e = 0;
        for (size_t j = 0; j < traj.var_names.size(); ++j)
            e += 0.5 * 1e-9 * traj.samples[i][j] * traj.samples[i][j];
        return e;
    };
    const double e0 = energy_at(2.5e-8);
    const double e1 = energy_at(6e-8);
    const bool energy_ok = std::fabs(e1 - e0) <= 0.01 * e0;
    INFO("E(2.5e-8)=", e0, " E(6e-8)=", e1);
    CHECK(energy_ok);
    c.finish(order_ok && energy_ok);
}

TEST_CASE("10 intercon-obc routing rules") {
    Criterion c(10, "intercon-routing", 0);
    std::vector<int> groups = {0, 0, 1, 1};
    std::vector<stdlib::InterconEdge> good = {
        {0, 1, false, 1.0}, {2, 3, false, 1.0}, {1, 2, true, 7.5}};
    auto g_good = stdlib::build_intercon_obc(registry(), groups, good, 2);
    auto bad = good;
    bad[2].global = false;
    auto g_bad = stdlib::build_intercon_obc(registry(), groups, bad, 2);

    auto good_path = (tmp_dir() / "intercon_good.json").string();
    auto bad_path = (tmp_dir() / "intercon_bad.json").string();
    std::ofstream(good_path, std::ios::binary) << export_json(g_good);
    std::ofstream(bad_path, std::ios::binary) << export_json(g_bad);

    auto report_path = (tmp_dir() / "intercon_report.txt").string();
    const int rc_bad =
        cli_main({"validate", "--graph", bad_path, "--out", report_path});
    std::ifstream in(report_path, std::ios::binary);
    std::string report{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const bool named = report.find("c002") != std::string::npos;

    auto good_report_path = (tmp_dir() / "intercon_good_report.txt").string();
    const int rc_good =
        cli_main({"validate", "--graph", good_path, "--out", good_report_path});
    std::ifstream in2(good_report_path, std::ios::binary);
    std::string good_report{std::istreambuf_iterator<char>(in2),
                            std::istreambuf_iterator<char>()};
    const bool cost_ok = good_report.find("total-cost=9.5") != std::string::npos;

    CHECK(rc_bad == 2);
    CHECK(named);
    CHECK(rc_good == 0);
    CHECK(cost_ok);
    c.finish(rc_bad == 2 && named && rc_good == 0 && cost_ok);
}
