#include "ark/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ark/validator.hpp"

namespace ark {

void SimConfig::check() const {
    if (!(t_end > 0)) throw ArkError("t_end must be positive");
    if (samples < 2) throw ArkError("sample count must be at least 2");
    if (!(rtol > 0) || !(atol > 0)) throw ArkError("tolerances must be positive");
}

int Trajectory::var_index(const std::string& name) const {
    for (size_t i = 0; i < var_names.size(); ++i)
        if (var_names[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> Trajectory::column(int var) const {
    std::vector<double> out(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) out[i] = samples[i][static_cast<size_t>(var)];
    return out;
}

namespace {

std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17e", v);
    return buf;
}

}  // namespace

std::string Trajectory::to_csv() const {
    std::string out = "time";
    for (const auto& n : var_names) out += "," + n;
    out += "\n";
    for (size_t i = 0; i < times.size(); ++i) {
        out += fmt_sci(times[i]);
        for (double v : samples[i]) out += "," + fmt_sci(v);
        out += "\n";
    }
    return out;
}

// ---- Dormand–Prince 5(4) -----------------------------------------------

namespace {

// Butcher tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded 4th-order error weights (b - b*)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

Trajectory integrate(const OdeSystem& sys, const SimConfig& cfg) {
    cfg.check();
    const size_t n = sys.vars.size();
    Trajectory traj;
    for (const auto& v : sys.vars) traj.var_names.push_back(v.display());
    traj.times.resize(static_cast<size_t>(cfg.samples));
    for (int i = 0; i < cfg.samples; ++i)
        traj.times[static_cast<size_t>(i)] = cfg.t_end * i / (cfg.samples - 1);
    traj.samples.assign(static_cast<size_t>(cfg.samples), std::vector<double>(n));

    std::vector<double> y = sys.initial;
    for (double v : y)
        if (!std::isfinite(v)) throw ArkError("non-finite initial state");

    auto ws = sys.make_workspace();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n),
        yerr(n);
    // dense-output coefficients for the current step
    std::vector<double> r1(n), r2(n), r3(n), r4(n), r5(n);

    const double hmax = cfg.max_step > 0 ? cfg.max_step : cfg.t_end / 100.0;
    double h = cfg.initial_step > 0 ? cfg.initial_step : std::min(hmax, cfg.t_end / 1000.0);
    double t = 0;
    double errold = 1e-4;
    size_t next_sample = 0;

    traj.samples[0] = y;
    next_sample = 1;

    sys.eval_rhs(y.data(), t, k1.data(), ws);  // FSAL seed

    const double uround_floor = 1e-14 * cfg.t_end;
    while (t < cfg.t_end) {
        if (h < uround_floor)
            throw ArkError("step size underflow at t=" + std::to_string(t));
        if (t + h > cfg.t_end) h = cfg.t_end - t;

        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        sys.eval_rhs(ytmp.data(), t + c2 * h, k2.data(), ws);
        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        sys.eval_rhs(ytmp.data(), t + c3 * h, k3.data(), ws);
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        sys.eval_rhs(ytmp.data(), t + c4 * h, k4.data(), ws);
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        sys.eval_rhs(ytmp.data(), t + c5 * h, k5.data(), ws);
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        sys.eval_rhs(ytmp.data(), t + h, k6.data(), ws);
        for (size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                  b6 * k6[i]);
        sys.eval_rhs(ynew.data(), t + h, k7.data(), ws);

        double err = 0;
        for (size_t i = 0; i < n; ++i) {
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
            const double sc =
                cfg.atol + cfg.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            const double q = yerr[i] / sc;
            err += q * q;
        }
        err = std::sqrt(err / std::max<size_t>(n, 1));

        if (err <= 1.0) {
            // dense-output coefficients (Hairer's rcont1..5)
            for (size_t i = 0; i < n; ++i) {
                const double dy = ynew[i] - y[i];
                const double bspl = h * k1[i] - dy;
                r1[i] = y[i];
                r2[i] = dy;
                r3[i] = bspl;
                r4[i] = dy - h * k7[i] - bspl;
                r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                             d7 * k7[i]);
            }
            const double t_new = t + h;
            while (next_sample < traj.times.size() &&
                   traj.times[next_sample] <= t_new + 1e-12 * cfg.t_end) {
                const double th = (traj.times[next_sample] - t) / h;
                auto& row = traj.samples[next_sample];
                for (size_t i = 0; i < n; ++i)
                    row[i] = r1[i] + th * (r2[i] + (1 - th) * (r3[i] +
                                           th * (r4[i] + (1 - th) * r5[i])));
                ++next_sample;
            }
            t = t_new;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            ++traj.steps;
            const double fac =
                0.9 * std::pow(err > 0 ? err : 1e-10, -0.17) * std::pow(errold, 0.04);
            h = std::min(h * std::clamp(fac, 0.2, 5.0), hmax);
            errold = std::max(err, 1e-4);
        } else {
            ++traj.rejected;
            const double fac = 0.9 * std::pow(err, -0.2);
            h *= std::clamp(fac, 0.1, 1.0);
        }
    }
    // fill any trailing samples (t reached t_end exactly)
    for (; next_sample < traj.times.size(); ++next_sample) traj.samples[next_sample] = y;

    for (const auto& row : traj.samples)
        for (double v : row)
            if (!std::isfinite(v)) throw ArkError("non-finite sample in trajectory");
    return traj;
}

// ---- sweeps -------------------------------------------------------------

SweepResult sweep(const FuncDefAst& func, const std::map<std::string, Value>& args,
                  std::uint64_t seed_begin, std::uint64_t seed_end, const SimConfig& cfg,
                  const LanguageRegistry& registry, const std::string& probe) {
    if (seed_end < seed_begin) throw ArkError("empty seed range");
    SweepResult res;
    int probe_idx = -1;
    for (std::uint64_t seed = seed_begin; seed <= seed_end; ++seed) {
        auto g = invoke(func, args, seed, registry);
        auto lang = registry.find(g.language);
        auto report = validate(g, *lang);
        if (!report.ok)
            throw ArkError("seed " + std::to_string(seed) + ": graph invalid:\n" +
                           report.to_text());
        auto sys = compile(g, *lang);
        auto traj = integrate(sys, cfg);
        if (probe_idx < 0) {
            probe_idx = traj.var_index(probe);
            if (probe_idx < 0) throw ArkError("unknown probe variable '" + probe + "'");
            res.times = traj.times;
        }
        res.trajectories.push_back(std::move(traj));
    }
    const size_t ns = res.times.size();
    const double count = static_cast<double>(res.trajectories.size());
    res.mean.assign(ns, 0);
    res.stddev.assign(ns, 0);
    res.lo.assign(ns, std::numeric_limits<double>::infinity());
    res.hi.assign(ns, -std::numeric_limits<double>::infinity());
    for (const auto& traj : res.trajectories)
        for (size_t i = 0; i < ns; ++i) {
            const double v = traj.samples[i][static_cast<size_t>(probe_idx)];
            res.mean[i] += v;
            res.lo[i] = std::min(res.lo[i], v);
            res.hi[i] = std::max(res.hi[i], v);
        }
    for (size_t i = 0; i < ns; ++i) res.mean[i] /= count;
    for (const auto& traj : res.trajectories)
        for (size_t i = 0; i < ns; ++i) {
            const double d = traj.samples[i][static_cast<size_t>(probe_idx)] - res.mean[i];
            res.stddev[i] += d * d;
        }
    for (size_t i = 0; i < ns; ++i) res.stddev[i] = std::sqrt(res.stddev[i] / count);
    return res;
}

std::string SweepResult::summary_csv() const {
    std::string out = "time,mean,std,min,max\n";
    for (size_t i = 0; i < times.size(); ++i)
        out += fmt_sci(times[i]) + "," + fmt_sci(mean[i]) + "," + fmt_sci(stddev[i]) + "," +
               fmt_sci(lo[i]) + "," + fmt_sci(hi[i]) + "\n";
    return out;
}

// ---- analysis helpers ---------------------------------------------------

SteadyState steady_state(const Trajectory& traj, double t0, double t1,
                         double rel_slope_threshold) {
    if (traj.times.empty()) throw ArkError("empty trajectory");
    size_t i0 = 0, i1 = traj.times.size();
    while (i0 < traj.times.size() && traj.times[i0] < t0) ++i0;
    while (i1 > 0 && traj.times[i1 - 1] > t1) --i1;
    if (i0 + 1 >= i1) throw ArkError("steady-state window contains fewer than two samples");

    const size_t n = traj.var_names.size();
    SteadyState ss;
    ss.value.assign(n, 0);
    ss.converged.assign(n, true);
    for (size_t v = 0; v < n; ++v) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& row : traj.samples) {
            lo = std::min(lo, row[v]);
            hi = std::max(hi, row[v]);
        }
        const double range = hi - lo;
        double sum = 0, max_slope = 0;
        for (size_t i = i0; i < i1; ++i) {
            sum += traj.samples[i][v];
            if (i + 1 < i1) {
                const double dt = traj.times[i + 1] - traj.times[i];
                max_slope = std::max(
                    max_slope, std::fabs(traj.samples[i + 1][v] - traj.samples[i][v]) / dt);
            }
        }
        ss.value[v] = sum / static_cast<double>(i1 - i0);
        if (range > 0 && max_slope > rel_slope_threshold * range) ss.converged[v] = false;
    }
    return ss;
}

std::vector<size_t> find_peaks(const std::vector<double>& y, double min_height_frac,
                               double prominence_frac) {
    std::vector<size_t> peaks;
    if (y.size() < 3) return peaks;
    const double ymax = *std::max_element(y.begin(), y.end());
    if (!(ymax > 0)) return peaks;

    // strict local maxima with plateau handling
    std::vector<size_t> cand;
    size_t i = 1;
    while (i + 1 < y.size()) {
        if (y[i] > y[i - 1]) {
            size_t j = i;
            while (j + 1 < y.size() && y[j + 1] == y[j]) ++j;
            if (j + 1 < y.size() && y[j + 1] < y[j]) cand.push_back((i + j) / 2);
            i = j + 1;
        } else {
            ++i;
        }
    }
    for (size_t p : cand) {
        if (y[p] < min_height_frac * ymax) continue;
        // prominence: lowest valley between this peak and a higher point on
        // either side (or the trace edge)
        auto side_valley = [&](bool left) {
            double valley = y[p];
            size_t k = p;
            while (true) {
                if (left ? k == 0 : k + 1 == y.size()) return valley;
                k = left ? k - 1 : k + 1;
                if (y[k] > y[p]) return valley;
                valley = std::min(valley, y[k]);
            }
        };
        const double base = std::max(side_valley(true), side_valley(false));
        if (y[p] - base >= prominence_frac * ymax) peaks.push_back(p);
    }
    return peaks;
}

}  // namespace ark
