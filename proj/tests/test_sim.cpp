#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ark/parser.hpp"
#include "ark/sim.hpp"
#include "ark/stdlib.hpp"

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

// p'' = -p: exact solution cos(t) from (1, 0)
OdeSystem oscillator(LanguageRegistry& reg) {
    const char* kHl = R"(
lang hosc {
  ntyp P(2, sum) {
    init(0) real[-10.0, 10.0]
    init(1) real[-10.0, 10.0]
  }
  etyp E {}
  prod(e:E, n:P -> n:P) n <= -(var(n))
}
)";
    auto lang = reg.find("hosc") ? reg.find("hosc") : resolve_text(kHl, reg);
    GraphBuilder b(lang, 1);
    b.add_node("p", "P");
    b.set_init("p", 0, 1.0);
    b.set_init("p", 1, 0.0);
    b.add_edge("p", "p", "s", "E");
    return compile(b.finish(), *lang);
}

OdeSystem decay(LanguageRegistry& reg) {
    const char* kDl = R"(
lang dec {
  ntyp N(1, sum) { init(0) real[-10.0, 10.0] }
  etyp E {}
  prod(e:E, n:N -> n:N) n <= -(var(n))
}
)";
    auto lang = reg.find("dec") ? reg.find("dec") : resolve_text(kDl, reg);
    GraphBuilder b(lang, 1);
    b.add_node("x", "N");
    b.set_init("x", 0, 2.0);
    b.add_edge("x", "x", "s", "E");
    return compile(b.finish(), *lang);
}

double max_cos_error(const Trajectory& traj) {
    double worst = 0;
    for (size_t i = 0; i < traj.times.size(); ++i)
        worst = std::max(worst, std::fabs(traj.samples[i][0] - std::cos(traj.times[i])));
    return worst;
}

}  // namespace

TEST_CASE("adaptive integration tracks a known solution on the dense grid") {
    LanguageRegistry reg;
    auto sys = oscillator(reg);
    SimConfig cfg;
    cfg.t_end = 30.0;
    cfg.samples = 301;
    cfg.rtol = 1e-8;
    cfg.atol = 1e-10;
    auto traj = integrate(sys, cfg);
    REQUIRE(traj.times.size() == 301);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(30.0));
    CHECK(traj.samples[0][0] == 1.0);  // initial condition on the grid
    CHECK(max_cos_error(traj) < 1e-5);
    CHECK(traj.steps > 0);
}

TEST_CASE("tighter tolerances give smaller errors and more steps") {
    LanguageRegistry reg;
    auto sys = oscillator(reg);
    double prev_err = 1e9;
    long long prev_steps = 0;
    for (double rtol : {1e-3, 1e-6, 1e-9}) {
        SimConfig cfg;
        cfg.t_end = 30.0;
        cfg.samples = 301;
        cfg.rtol = rtol;
        cfg.atol = rtol * 1e-3;
        auto traj = integrate(sys, cfg);
        double err = max_cos_error(traj);
        CHECK(err < prev_err);
        CHECK(traj.steps > prev_steps);
        prev_err = err;
        prev_steps = traj.steps;
    }
    CHECK(prev_err < 1e-7);
}

TEST_CASE("exponential decay matches the closed form") {
    LanguageRegistry reg;
    auto sys = decay(reg);
    SimConfig cfg;
    cfg.t_end = 10.0;
    cfg.samples = 101;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-12;
    auto traj = integrate(sys, cfg);
    for (size_t i = 0; i < traj.times.size(); ++i)
        CHECK(traj.samples[i][0] ==
              doctest::Approx(2.0 * std::exp(-traj.times[i])).epsilon(1e-7));
}

TEST_CASE("oscillator energy stays constant at tight tolerance") {
    LanguageRegistry reg;
    auto sys = oscillator(reg);
    SimConfig cfg;
    cfg.t_end = 100.0;
    cfg.samples = 501;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-12;
    auto traj = integrate(sys, cfg);
    const int ip = traj.var_index("p");
    const int iv = traj.var_index("p(1)");
    REQUIRE(ip >= 0);
    REQUIRE(iv >= 0);
    for (const auto& s : traj.samples) {
        const double e = s[static_cast<size_t>(ip)] * s[static_cast<size_t>(ip)] +
                         s[static_cast<size_t>(iv)] * s[static_cast<size_t>(iv)];
        CHECK(e == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("integration is bitwise deterministic") {
    LanguageRegistry reg;
    auto sys = oscillator(reg);
    SimConfig cfg;
    cfg.t_end = 20.0;
    cfg.samples = 201;
    auto a = integrate(sys, cfg);
    auto b = integrate(sys, cfg);
    CHECK(a.to_csv() == b.to_csv());
    CHECK(a.steps == b.steps);
}

TEST_CASE("config invariants are enforced") {
    LanguageRegistry reg;
    auto sys = decay(reg);
    SimConfig cfg;
    cfg.t_end = 0.0;
    CHECK_THROWS_AS(integrate(sys, cfg), ArkError);
    cfg.t_end = 1.0;
    cfg.samples = 1;
    CHECK_THROWS_AS(integrate(sys, cfg), ArkError);
    cfg.samples = 10;
    cfg.rtol = -1.0;
    CHECK_THROWS_AS(integrate(sys, cfg), ArkError);
}

TEST_CASE("numeric blowups surface as errors") {
    const char* kBl = R"(
lang blow {
  ntyp N(1, sum) { init(0) real[-10.0, 10.0] }
  etyp E {}
  prod(e:E, n:N -> n:N) n <= var(n) * var(n)
}
)";
    LanguageRegistry reg;
    auto lang = resolve_text(kBl, reg);
    GraphBuilder b(lang, 1);
    b.add_node("x", "N");
    b.set_init("x", 0, 5.0);  // finite-time blowup at t = 1/5
    b.add_edge("x", "x", "s", "E");
    auto sys = compile(b.finish(), *lang);
    SimConfig cfg;
    cfg.t_end = 10.0;
    CHECK_THROWS_AS(integrate(sys, cfg), ArkError);
}

TEST_CASE("trajectory accessors and csv output") {
    LanguageRegistry reg;
    auto sys = decay(reg);
    SimConfig cfg;
    cfg.t_end = 1.0;
    cfg.samples = 11;
    auto traj = integrate(sys, cfg);
    CHECK(traj.var_index("x") == 0);
    CHECK(traj.var_index("nope") == -1);
    auto col = traj.column(0);
    CHECK(col.size() == 11);
    CHECK(col[0] == 2.0);
    auto csv = traj.to_csv();
    CHECK(csv.find("x") != std::string::npos);
    CHECK(csv.substr(0, 1) == "t");
}

TEST_CASE("steady_state reports convergence and windowed means") {
    LanguageRegistry reg;
    auto sysd = decay(reg);
    SimConfig cfg;
    cfg.t_end = 40.0;
    cfg.samples = 401;
    auto traj = integrate(sysd, cfg);
    auto ss = steady_state(traj, 30.0, 40.0);
    REQUIRE(ss.value.size() == 1);
    CHECK(ss.converged[0]);
    CHECK(ss.value[0] == doctest::Approx(0.0).epsilon(1e-6));

    auto syso = oscillator(reg);
    cfg.rtol = 1e-8;
    auto traj2 = integrate(syso, cfg);
    auto ss2 = steady_state(traj2, 30.0, 40.0);
    CHECK_FALSE(ss2.converged[0]);  // still swinging
}

TEST_CASE("find_peaks locates prominent maxima") {
    std::vector<double> y;
    for (int i = 0; i <= 400; ++i) {
        const double t = i * 0.05;
        y.push_back(std::exp(-0.1 * t) * std::max(0.0, std::sin(t)));
    }
    auto peaks = find_peaks(y, 0.1, 0.1);
    REQUIRE(peaks.size() >= 3);
    // peaks near t = pi/2 + 2 pi k (shifted slightly left by the decay)
    for (size_t k = 0; k < 3; ++k) {
        const double t = peaks[k] * 0.05;
        double d = std::fmod(t - M_PI / 2.0 + 20.0 * M_PI, 2.0 * M_PI);
        if (d > M_PI) d -= 2.0 * M_PI;
        CHECK(std::fabs(d) < 0.15);
    }
    // plateaus produce a single peak
    std::vector<double> flat = {0, 1, 2, 2, 2, 1, 0};
    CHECK(find_peaks(flat, 0.1, 0.1).size() == 1);
    // a shallow ripple below the prominence threshold is ignored
    std::vector<double> ripple = {0, 10, 9.9, 9.95, 0};
    CHECK(find_peaks(ripple, 0.1, 0.1).size() == 1);
}

TEST_CASE("sweep aggregates trajectories across seeds") {
    const auto* f = stdlib::find_example("br-func");
    REQUIRE(f);
    SimConfig cfg;
    cfg.t_end = 2e-8;
    cfg.samples = 51;
    auto res = sweep(*f, {{"br", Value::of_int(0)}}, 1, 4, cfg, registry(), "V2");
    REQUIRE(res.trajectories.size() == 4);
    REQUIRE(res.mean.size() == 51);
    // tln carries no mismatch: all seeds coincide and the spread is zero
    for (size_t i = 0; i < res.mean.size(); ++i) {
        CHECK(res.stddev[i] == doctest::Approx(0.0));
        CHECK(res.lo[i] == res.hi[i]);
    }
    auto csv = res.summary_csv();
    CHECK(csv.find("time,mean") != std::string::npos);
}
