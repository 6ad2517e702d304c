#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ark/compiler.hpp"
#include "ark/graph.hpp"

namespace ark {

struct SimConfig {
    double t_end = 1.0;
    int samples = 201;
    double rtol = 1e-6;
    double atol = 1e-9;
    double max_step = 0;      // 0 = t_end / 100
    double initial_step = 0;  // 0 = automatic

    void check() const;  // throws ArkError on invariant violations
};

struct Trajectory {
    std::vector<double> times;                 // uniform grid 0 .. t_end
    std::vector<std::vector<double>> samples;  // [sample][state var]
    std::vector<std::string> var_names;
    long long steps = 0;
    long long rejected = 0;

    [[nodiscard]] int var_index(const std::string& name) const;  // -1 if absent
    [[nodiscard]] std::vector<double> column(int var) const;
    [[nodiscard]] std::string to_csv() const;
};

/// Dormand–Prince 5(4) with PI step control and 4th-order dense output on the
/// uniform sample grid.
Trajectory integrate(const OdeSystem& sys, const SimConfig& cfg);

struct SweepResult {
    std::vector<Trajectory> trajectories;  // one per seed, in order
    // per-time-sample statistics of the probe variable
    std::vector<double> times, mean, stddev, lo, hi;

    [[nodiscard]] std::string summary_csv() const;
};

/// invoke + validate + compile + integrate per seed in [seed_begin, seed_end].
SweepResult sweep(const FuncDefAst& func, const std::map<std::string, Value>& args,
                  std::uint64_t seed_begin, std::uint64_t seed_end, const SimConfig& cfg,
                  const LanguageRegistry& registry, const std::string& probe);

struct SteadyState {
    std::vector<double> value;     // per state var: mean over the window
    std::vector<bool> converged;   // per state var
};

/// Windowed mean; converged iff the max absolute slope inside the window is
/// below rel_slope_threshold times the variable's observed range per unit
/// time.
SteadyState steady_state(const Trajectory& traj, double t0, double t1,
                         double rel_slope_threshold = 1e-3);

/// Indices of local maxima of y that are at least min_height_frac of the
/// global maximum and rise at least prominence_frac of the global maximum
/// above the valley separating them from any higher peak.
std::vector<size_t> find_peaks(const std::vector<double>& y, double min_height_frac = 0.1,
                               double prominence_frac = 0.1);

}  // namespace ark
