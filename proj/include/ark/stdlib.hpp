#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ark/ast.hpp"
#include "ark/graph.hpp"
#include "ark/lang.hpp"

namespace ark::stdlib {

/// Parses the embedded language sources, resolves them in dependency order,
/// registers them plus the global checks. Safe to call once per registry.
void load(LanguageRegistry& reg);

/// The embedded source text (languages + example functions), for `ark check`
/// self-tests and tooling.
const std::string& source_text();

/// Example functions shipped as .ark text (br-func and friends).
const std::vector<FuncDefAst>& examples();
const FuncDefAst* find_example(const std::string& name);

// ---- transmission lines -------------------------------------------------

enum class TlineVariant {
    Plain,          // tln types: V/I nodes, E edges
    MismatchNodes,  // gmc-tln Vm/Im (c, l mismatched), E edges
    MismatchEdges,  // gmc-tln V/I, Em edges (ws, wt mismatched)
};

struct TlineParams {
    double c = 1e-9;
    double l = 1e-9;
    double g_term = 1.0;  // termination at IN_V / OUT_V; 0 in the middle
    double r = 0.0;
    double amp = 1.0;       // input current amplitude
    double pulse_t0 = 0.0;
    double pulse_w = 2e-8;
    TlineVariant variant = TlineVariant::Plain;
};

/// Alternating V/I chain of `segments` nodes driven by an InpI source at
/// IN_V; OUT_V is the far end.
DynamicalGraph build_linear_tline(const LanguageRegistry& reg, int segments,
                                  const TlineParams& p, std::uint64_t seed,
                                  bool mismatch = true);

/// Same line with an open-ended stub of `branch_len` L-C sections attached at
/// IN_V; the stub reflects the pulse back as an echo.
DynamicalGraph build_branched_tline(const LanguageRegistry& reg, int segments, int branch_len,
                                    const TlineParams& p, std::uint64_t seed,
                                    bool mismatch = true);

/// Linear line with one deliberate V-V connection (invalid by construction).
DynamicalGraph build_malformed_tline(const LanguageRegistry& reg, int segments,
                                     const TlineParams& p, std::uint64_t seed);

// ---- cellular nonlinear networks ---------------------------------------

using Image = std::vector<std::vector<int>>;  // 0 = white, 1 = black

/// M×N edge-detection CNN over the binary input image (4-neighbor B
/// template); `hw` selects the mismatched hw-cnn types.
DynamicalGraph build_cnn_grid(const LanguageRegistry& reg, const Image& image, bool hw,
                              std::uint64_t seed, bool mismatch = true);

/// Combinatorial reference: pixel black iff black in the input with >= 1
/// white 4-neighbor.
Image cnn_edge_oracle(const Image& image);

/// Deterministic random binary image for tests/experiments.
Image random_image(int rows, int cols, std::uint64_t seed);

/// Thresholded steady state of the compiled CNN: sign of each cell state.
Image cnn_readout(const DynamicalGraph& g, const LanguageRegistry& reg, int rows, int cols);

// ---- oscillator-based computing ----------------------------------------

/// Oscillator network for an undirected graph on n vertices; initial phases
/// uniform in [0, 2pi) from the seed. `offset` selects ofs-obc couplings.
DynamicalGraph build_obc(const LanguageRegistry& reg, int n,
                         const std::vector<std::pair<int, int>>& edges, bool offset,
                         std::uint64_t seed);

struct InterconEdge {
    int a = 0, b = 0;
    bool global = false;  // Cpl_g vs Cpl_l
    double cost = 1.0;
};

/// Grouped oscillator network (intercon-obc): per-vertex group labels and
/// local/global couplings with costs.
DynamicalGraph build_intercon_obc(const LanguageRegistry& reg, const std::vector<int>& groups,
                                  const std::vector<InterconEdge>& edges, std::uint64_t seed);

struct MaxcutAnalysis {
    std::vector<int> partition;  // 0 | 1 | -1 (unknown) per oscillator
    bool sync = false;
    bool solved = false;
    double cut = 0;       // cut value of the read-out partition
    double best_cut = 0;  // brute-force maximum
};

/// Maps the graph to oscillators, integrates to steady state, classifies
/// phases within d radians of {0, pi}, and checks cut optimality against
/// brute force.
MaxcutAnalysis maxcut_solve(const LanguageRegistry& reg,
                            const std::vector<std::pair<int, int>>& edges, int n, bool offset,
                            std::uint64_t seed, double d);

/// Deterministic random connected simple graph on n vertices.
std::vector<std::pair<int, int>> random_connected_graph(int n, std::uint64_t seed);

}  // namespace ark::stdlib
