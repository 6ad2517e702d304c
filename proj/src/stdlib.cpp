#include "ark/stdlib.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "ark/compiler.hpp"
#include "ark/parser.hpp"
#include "ark/sim.hpp"
#include "ark/validator.hpp"

namespace ark::stdlib {

namespace {

std::string idx3(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
    return buf;
}

std::string cell_name(const char* prefix, int r, int c) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s_%02d_%02d", prefix, r, c);
    return buf;
}

const char* kSource = R"ARK(
# Transmission-line networks: discretized Telegrapher's equations over
# alternating V (capacitive) and I (inductive) nodes.
lang tln {
  ntyp V(1, sum) {
    attr c = real[1e-15, 1.0]
    attr g = real[0.0, 2.0]
    init(0) real[-10.0, 10.0]
  }
  ntyp I(1, sum) {
    attr l = real[1e-15, 1.0]
    attr r = real[0.0, 2.0]
    init(0) real[-10.0, 10.0]
  }
  # input sources: algebraic nodes applying their waveform to time
  ntyp InpV(0, sum) {
    attr fn = lambd(t)
  }
  ntyp InpI(0, sum) {
    attr fn = lambd(t)
  }
  etyp E {}

  # dV/dt = (1/C)(I_in - I_out - G V); dI/dt = (1/L)(V_in - V_out - R I)
  prod(e:E, s:I -> t:V) t <= var(s) / t.c
  prod(e:E, s:I -> t:V) s <= -(var(t) / s.l)
  prod(e:E, s:V -> t:I) t <= var(s) / t.l
  prod(e:E, s:V -> t:I) s <= -(var(t) / s.c)
  prod(e:E, n:V -> n:V) n <= -((n.g / n.c) * var(n))
  prod(e:E, n:I -> n:I) n <= -((n.r / n.l) * var(n))
  prod(e:E, n:InpI -> n:InpI) n <= n.fn(time)
  prod(e:E, n:InpV -> n:InpV) n <= n.fn(time)
  prod(e:E, s:InpI -> t:V) t <= var(s) / t.c
  prod(e:E, s:InpV -> t:I) t <= var(s) / t.l

  # alternating structure: V never neighbors V, I never neighbors I
  cstr n:V {
    rej match(1, inf, E, n -> [V]) match(0, inf, E)
    rej match(1, inf, E, [V] -> n) match(0, inf, E)
  }
  cstr n:I {
    rej match(1, inf, E, n -> [I]) match(0, inf, E)
    rej match(1, inf, E, [I] -> n) match(0, inf, E)
  }
}

# Gm-C hardware realization: integrator capacitances and transconductances
# subject to fabrication mismatch; Em edges add programmable ws/wt weights.
lang gmc-tln inherits tln {
  ntyp Vm(1, sum) inherits V {
    attr c = real[1e-10, 1e-8] mm(0.1, 0.0)
  }
  ntyp Im(1, sum) inherits I {
    attr l = real[1e-10, 1e-8] mm(0.1, 0.0)
  }
  etyp Em inherits E {
    attr ws = real[0.0, 2.0] mm(0.1, 0.0)
    attr wt = real[0.0, 2.0] mm(0.1, 0.0)
  }
  prod(e:Em, s:I -> t:V) t <= e.wt * var(s) / t.c
  prod(e:Em, s:I -> t:V) s <= -(e.ws * var(t) / s.l)
  prod(e:Em, s:V -> t:I) t <= e.wt * var(s) / t.l
  prod(e:Em, s:V -> t:I) s <= -(e.ws * var(t) / s.c)
  prod(e:Em, s:InpI -> t:V) t <= e.wt * var(s) / t.c
}

# Cellular nonlinear networks: first-order cells with saturating feedback,
# input template edges, and algebraic input/output nodes.
lang cnn {
  ntyp V(1, sum) {
    attr z = real[-5.0, 5.0]
    init(0) real[-5.0, 5.0]
  }
  ntyp Inp(0, sum) {
    attr u = real[-1.0, 1.0]
  }
  ntyp Out(0, sum) {}
  etyp fE {
    attr g = real[-10.0, 10.0]
  }
  etyp iE {
    attr g = real[-10.0, 10.0]
  }

  # cell dynamics: -x + a f(x) + z on the self edge (a = e.g)
  prod(e:fE, n:V -> n:V) n <= e.g * (0.5 * (abs(var(n) + 1.0) - abs(var(n) - 1.0))) - var(n) + n.z
  prod(e:iE, n:Inp -> n:Inp) n <= n.u
  # feedback template A between neighboring cells
  prod(e:fE, s:V -> t:V) t <= e.g * (0.5 * (abs(var(s) + 1.0) - abs(var(s) - 1.0)))
  # input template B
  prod(e:iE, s:Inp -> t:V) t <= e.g * var(s)
  # ideal readout: saturated cell state
  prod(e:fE, s:V -> t:Out) t <= 0.5 * (abs(var(s) + 1.0) - abs(var(s) - 1.0))

  extern-func grid-topology
}

# Hardware CNN: mismatched biases and template weights, and a smooth
# (tanh-like) output nonlinearity near the saturation points.
lang hw-cnn inherits cnn {
  ntyp Vm(1, sum) inherits V {
    attr z = real[-5.0, 5.0] mm(0.1, 0.0)
  }
  etyp fEm inherits fE {
    attr g = real[-10.0, 10.0] mm(0.1, 0.0)
  }
  etyp iEm inherits iE {
    attr g = real[-10.0, 10.0] mm(0.1, 0.0)
  }
  ntyp OutNL(0, sum) {}
  prod(e:fEm, s:V -> t:OutNL) t <= (exp(4.0 * var(s)) - 1.0) / (exp(4.0 * var(s)) + 1.0)
}

# Oscillator-based computing: modified Kuramoto phase dynamics with
# second-harmonic injection locking binarizing phases toward {0, pi}.
lang obc {
  ntyp Osc(1, sum) {
    init(0) real[-10.0, 10.0]
  }
  etyp Cpl {
    attr k = real[-10.0, 10.0]
  }
  prod(c:Cpl, s:Osc -> t:Osc) s <= -(1.6e9 * c.k * sin(var(s) - var(t)))
  prod(c:Cpl, s:Osc -> t:Osc) t <= -(1.6e9 * c.k * sin(var(t) - var(s)))
  prod(c:Cpl, n:Osc -> n:Osc) n <= -(1e9 * sin(2.0 * var(n)))
}

# Couplers with a phase offset biasing the coupling terms.
lang ofs-obc inherits obc {
  etyp Cpl_ofs inherits Cpl {
    attr ofs = real[-1.0, 1.0] mm(0.0, 0.05)
  }
  prod(c:Cpl_ofs, s:Osc -> t:Osc) s <= -(1.6e9 * c.k * sin(var(s) - var(t) + c.ofs))
  prod(c:Cpl_ofs, s:Osc -> t:Osc) t <= -(1.6e9 * c.k * sin(var(t) - var(s) + c.ofs))
}

# Routing-aware OBC: grouped oscillators with local and global couplers
# carrying routing costs; cross-group edges must use global couplers.
lang intercon-obc inherits obc {
  ntyp OscG(1, sum) inherits Osc {
    attr grp = int[0, 1024]
  }
  etyp Cpl_l inherits Cpl {
    attr cost = real[0.0, 1000.0]
  }
  etyp Cpl_g inherits Cpl {
    attr cost = real[0.0, 1000.0]
  }
  extern-func groups-respected
}

# A 5-node t-line driven by a current pulse.
func line5() uses tln {
  node SRC : InpI
  node V0 : V
  node I1 : I
  node V1 : V
  node I2 : I
  node V2 : V
  edge<SRC, SRC> es : E
  edge<SRC, V0> e0 : E
  edge<V0, I1> e1 : E
  edge<I1, V1> e2 : E
  edge<V1, I2> e3 : E
  edge<I2, V2> e4 : E
  edge<V0, V0> sv0 : E
  edge<I1, I1> si1 : E
  edge<V1, V1> sv1 : E
  edge<I2, I2> si2 : E
  edge<V2, V2> sv2 : E
  set-attr SRC.fn = lambd(t): pulse(t, 0.0, 2e-9)
  set-attr V0.c = 1e-9
  set-attr V0.g = 1.0
  set-attr V1.c = 1e-9
  set-attr V1.g = 0.0
  set-attr V2.c = 1e-9
  set-attr V2.g = 1.0
  set-attr I1.l = 1e-9
  set-attr I1.r = 0.0
  set-attr I2.l = 1e-9
  set-attr I2.r = 0.0
  set-init V0(0) = 0.0
  set-init V1(0) = 0.0
  set-init V2(0) = 0.0
  set-init I1(0) = 0.0
  set-init I2(0) = 0.0
}

# The branched t-line: the stub behind eb0/eb1 is enabled when br = 1.
func br-func(br : int[0, 1]) uses tln {
  node SRC : InpI
  node V0 : V
  node I1 : I
  node V1 : V
  node I2 : I
  node V2 : V
  node BI0 : I
  node BV0 : V
  edge<SRC, SRC> es : E
  edge<SRC, V0> e0 : E
  edge<V0, I1> e1 : E
  edge<I1, V1> e2 : E
  edge<V1, I2> e3 : E
  edge<I2, V2> e4 : E
  edge<V0, BI0> eb0 : E
  edge<BI0, BV0> eb1 : E
  edge<V0, V0> sv0 : E
  edge<I1, I1> si1 : E
  edge<V1, V1> sv1 : E
  edge<I2, I2> si2 : E
  edge<V2, V2> sv2 : E
  edge<BI0, BI0> sbi0 : E
  edge<BV0, BV0> sbv0 : E
  set-attr SRC.fn = lambd(t): pulse(t, 0.0, 2e-9)
  set-attr V0.c = 1e-9
  set-attr V0.g = 1.0
  set-attr V1.c = 1e-9
  set-attr V1.g = 0.0
  set-attr V2.c = 1e-9
  set-attr V2.g = 1.0
  set-attr I1.l = 1e-9
  set-attr I1.r = 0.0
  set-attr I2.l = 1e-9
  set-attr I2.r = 0.0
  set-attr BI0.l = 1e-9
  set-attr BI0.r = 0.0
  set-attr BV0.c = 1e-9
  set-attr BV0.g = 0.0
  set-init V0(0) = 0.0
  set-init V1(0) = 0.0
  set-init V2(0) = 0.0
  set-init I1(0) = 0.0
  set-init I2(0) = 0.0
  set-init BI0(0) = 0.0
  set-init BV0(0) = 0.0
  set-edge eb0 when br == 1
  set-edge eb1 when br == 1
}
)ARK";

const SourceProgram& parsed() {
    static const SourceProgram prog = [] {
        DiagnosticList diags;
        auto p = parse(kSource, diags);
        if (diags.has_errors())
            throw ArkError("embedded stdlib source failed to parse:\n" + diags.to_string());
        return p;
    }();
    return prog;
}

// ---- global checks ------------------------------------------------------

bool parse_cell_coords(const std::string& name, int* r, int* c) {
    auto p2 = name.rfind('_');
    if (p2 == std::string::npos || p2 == 0) return false;
    auto p1 = name.rfind('_', p2 - 1);
    if (p1 == std::string::npos) return false;
    try {
        size_t used = 0;
        *r = std::stoi(name.substr(p1 + 1, p2 - p1 - 1), &used);
        *c = std::stoi(name.substr(p2 + 1), &used);
    } catch (...) {
        return false;
    }
    return true;
}

GlobalCheckResult check_grid_topology(const DynamicalGraph& g, const LanguageDef& lang) {
    for (const auto& [name, e] : g.edges) {
        if (e.src == e.dst) continue;
        if (!subtype_of(lang, e.type, "fE") && !subtype_of(lang, e.type, "iE")) continue;
        int r1, c1, r2, c2;
        if (!parse_cell_coords(e.src, &r1, &c1) || !parse_cell_coords(e.dst, &r2, &c2))
            return {false, "edge '" + name + "' connects nodes without grid coordinates"};
        if (std::abs(r1 - r2) + std::abs(c1 - c2) > 1)
            return {false, "edge '" + name + "' connects non-neighboring cells (" + e.src +
                               ", " + e.dst + ")"};
    }
    return {true, ""};
}

GlobalCheckResult check_groups_respected(const DynamicalGraph& g, const LanguageDef& lang) {
    double total_cost = 0;
    for (const auto& [name, e] : g.edges) {
        if (auto it = e.attrs.find("cost"); it != e.attrs.end())
            total_cost += it->second.as_real();
    }
    for (const auto& [name, e] : g.edges) {
        if (e.src == e.dst) continue;
        const auto& na = g.nodes.at(e.src).attrs;
        const auto& nb = g.nodes.at(e.dst).attrs;
        auto ga = na.find("grp");
        auto gb = nb.find("grp");
        if (ga == na.end() || gb == nb.end()) continue;
        if (ga->second.intv != gb->second.intv && !subtype_of(lang, e.type, "Cpl_g"))
            return {false, "cross-group edge '" + name + "' has local type " + e.type};
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "total-cost=%.17g", total_cost);
    return {true, buf};
}

Value pulse_lambda(double amp, double t0, double w) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g * pulse(t, %.17g, %.17g)", amp, t0, w);
    DiagnosticList diags;
    auto body = parse_expression(buf, diags);
    if (!body) throw ArkError("internal: pulse lambda failed to parse");
    return Value::of_lambda({"t"}, body);
}

}  // namespace

const std::string& source_text() {
    static const std::string text = kSource;
    return text;
}

const std::vector<FuncDefAst>& examples() {
    static const std::vector<FuncDefAst> funcs = [] {
        std::vector<FuncDefAst> out;
        for (const auto& st : parsed().statements)
            if (const auto* f = std::get_if<FuncDefAst>(&st.node)) out.push_back(*f);
        return out;
    }();
    return funcs;
}

const FuncDefAst* find_example(const std::string& name) {
    for (const auto& f : examples())
        if (f.name == name) return &f;
    return nullptr;
}

void load(LanguageRegistry& reg) {
    auto& checks = GlobalCheckRegistry::instance();
    checks.add("grid-topology", check_grid_topology);
    checks.add("groups-respected", check_groups_respected);

    DiagnosticList diags;
    for (const auto& st : parsed().statements) {
        const auto* lang_ast = std::get_if<LangDefAst>(&st.node);
        if (!lang_ast || reg.find(lang_ast->name)) continue;
        auto lang = resolve_language(*lang_ast, reg, diags);
        if (!lang)
            throw ArkError("stdlib language '" + lang_ast->name + "' failed to resolve:\n" +
                           diags.to_string());
        reg.add(lang);
    }
}

// ---- transmission lines -------------------------------------------------

namespace {

struct TlineTypes {
    const char* lang;
    const char* v;
    const char* i;
    const char* chain_edge;
    bool em;  // chain edges carry ws/wt
};

TlineTypes tline_types(TlineVariant variant) {
    switch (variant) {
        case TlineVariant::Plain: return {"tln", "V", "I", "E", false};
        case TlineVariant::MismatchNodes: return {"gmc-tln", "Vm", "Im", "E", false};
        case TlineVariant::MismatchEdges: return {"gmc-tln", "V", "I", "Em", true};
    }
    return {"tln", "V", "I", "E", false};
}

/// Chain node at `pos`: even positions are V nodes, odd are I nodes.
std::string chain_name(int pos) { return idx3(pos % 2 == 0 ? "V" : "I", pos); }

void emit_chain(GraphBuilder& b, const TlineTypes& ty, const TlineParams& p, int segments) {
    if (segments < 1) throw ArkError("t-line needs at least one segment");
    for (int pos = 0; pos < segments; ++pos) {
        const bool is_v = pos % 2 == 0;
        const auto name = chain_name(pos);
        b.add_node(name, is_v ? ty.v : ty.i);
        b.add_edge(name, name, idx3("s", pos), "E");
        if (is_v) {
            b.set_attr(name, "c", p.c);
            b.set_attr(name, "g", pos == 0 || pos == segments - 1 ? p.g_term : 0.0);
        } else {
            b.set_attr(name, "l", p.l);
            b.set_attr(name, "r", p.r);
        }
        b.set_init(name, 0, 0.0);
        if (pos > 0) {
            b.add_edge(chain_name(pos - 1), name, idx3("e", pos), ty.chain_edge);
            if (ty.em) {
                b.set_attr(idx3("e", pos), "ws", 1.0);
                b.set_attr(idx3("e", pos), "wt", 1.0);
            }
        }
    }
    b.add_node("SRC", "InpI");
    b.add_edge("SRC", "SRC", "esrc", "E");
    b.set_attr("SRC", "fn", pulse_lambda(p.amp, p.pulse_t0, p.pulse_w));
    b.add_edge("SRC", chain_name(0), "e000", ty.chain_edge);
    if (ty.em) {
        b.set_attr("e000", "ws", 1.0);
        b.set_attr("e000", "wt", 1.0);
    }
}

}  // namespace

DynamicalGraph build_linear_tline(const LanguageRegistry& reg, int segments,
                                  const TlineParams& p, std::uint64_t seed, bool mismatch) {
    auto ty = tline_types(p.variant);
    GraphBuilder b(reg.find(ty.lang), seed, mismatch);
    emit_chain(b, ty, p, segments);
    return b.finish();
}

DynamicalGraph build_branched_tline(const LanguageRegistry& reg, int segments, int branch_len,
                                    const TlineParams& p, std::uint64_t seed, bool mismatch) {
    auto ty = tline_types(p.variant);
    GraphBuilder b(reg.find(ty.lang), seed, mismatch);
    emit_chain(b, ty, p, segments);
    // open-ended stub at the input node: I/V pairs, far V undamped
    std::string prev = chain_name(0);
    for (int k = 0; k < branch_len; ++k) {
        const auto in = idx3("BI", k);
        const auto vn = idx3("BV", k);
        b.add_node(in, ty.i);
        b.add_edge(in, in, idx3("bsi", k), "E");
        b.set_attr(in, "l", p.l);
        b.set_attr(in, "r", p.r);
        b.set_init(in, 0, 0.0);
        b.add_node(vn, ty.v);
        b.add_edge(vn, vn, idx3("bsv", k), "E");
        b.set_attr(vn, "c", p.c);
        b.set_attr(vn, "g", 0.0);
        b.set_init(vn, 0, 0.0);
        b.add_edge(prev, in, idx3("bea", k), ty.chain_edge);
        b.add_edge(in, vn, idx3("beb", k), ty.chain_edge);
        if (ty.em) {
            for (const char* e : {"bea", "beb"}) {
                b.set_attr(idx3(e, k), "ws", 1.0);
                b.set_attr(idx3(e, k), "wt", 1.0);
            }
        }
        prev = vn;
    }
    return b.finish();
}

DynamicalGraph build_malformed_tline(const LanguageRegistry& reg, int segments,
                                     const TlineParams& p, std::uint64_t seed) {
    auto ty = tline_types(p.variant);
    GraphBuilder b(reg.find(ty.lang), seed, /*mismatch=*/false);
    emit_chain(b, ty, p, segments);
    // deliberate V-V connection off the first chain node
    b.add_node("VX", ty.v);
    b.add_edge("VX", "VX", "sVX", "E");
    b.set_attr("VX", "c", p.c);
    b.set_attr("VX", "g", 0.0);
    b.set_init("VX", 0, 0.0);
    b.add_edge(chain_name(0), "VX", "eVX", ty.chain_edge);
    if (ty.em) {
        b.set_attr("eVX", "ws", 1.0);
        b.set_attr("eVX", "wt", 1.0);
    }
    return b.finish();
}

// ---- cellular nonlinear networks ---------------------------------------

Image cnn_edge_oracle(const Image& image) {
    const int rows = static_cast<int>(image.size());
    Image out(image.size());
    for (int r = 0; r < rows; ++r) {
        const int cols = static_cast<int>(image[r].size());
        out[r].assign(static_cast<size_t>(cols), 0);
        for (int c = 0; c < cols; ++c) {
            if (!image[r][c]) continue;
            static const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
            bool white_neighbor = false;
            for (int k = 0; k < 4; ++k) {
                int rr = r + dr[k], cc = c + dc[k];
                if (rr < 0 || rr >= rows || cc < 0 || cc >= static_cast<int>(image[rr].size()))
                    continue;
                if (!image[rr][cc]) white_neighbor = true;
            }
            out[r][c] = white_neighbor ? 1 : 0;
        }
    }
    return out;
}

Image random_image(int rows, int cols, std::uint64_t seed) {
    Image img(static_cast<size_t>(rows));
    for (int r = 0; r < rows; ++r) {
        img[r].resize(static_cast<size_t>(cols));
        for (int c = 0; c < cols; ++c)
            img[r][c] = uniform_sample(seed, "px", cell_name("", r, c)) < 0.5 ? 0 : 1;
    }
    return img;
}

DynamicalGraph build_cnn_grid(const LanguageRegistry& reg, const Image& image, bool hw,
                              std::uint64_t seed, bool mismatch) {
    const int rows = static_cast<int>(image.size());
    const int cols = rows ? static_cast<int>(image[0].size()) : 0;
    const char* vt = hw ? "Vm" : "V";
    const char* fe = hw ? "fEm" : "fE";
    const char* ie = hw ? "iEm" : "iE";
    GraphBuilder b(reg.find(hw ? "hw-cnn" : "cnn"), seed, mismatch);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const auto v = cell_name("V", r, c);
            const auto u = cell_name("U", r, c);
            b.add_node(v, vt);
            // bias compensated for missing neighbors at the grid border so
            // the net drive is 2k - 1 for k white 4-neighbors of a black cell
            const int m = (r > 0) + (r + 1 < rows) + (c > 0) + (c + 1 < cols);
            b.set_attr(v, "z", static_cast<double>(m - 5));
            b.set_init(v, 0, 0.0);
            b.add_edge(v, v, cell_name("sf", r, c), fe);
            b.set_attr(cell_name("sf", r, c), "g", 2.0);  // A center
            b.add_node(u, "Inp");
            b.set_attr(u, "u", image[r][c] ? 1.0 : -1.0);
            b.add_edge(u, u, cell_name("su", r, c), "iE");
            b.set_attr(cell_name("su", r, c), "g", 0.0);
            b.add_edge(u, v, cell_name("bc", r, c), ie);
            b.set_attr(cell_name("bc", r, c), "g", 4.0);  // B center
        }
    static const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
    static const char* dn[] = {"bu", "bd", "bl", "br"};
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            for (int k = 0; k < 4; ++k) {
                int rr = r + dr[k], cc = c + dc[k];
                if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
                // B surround: neighbor input into this cell
                const auto name = cell_name(dn[k], r, c);
                b.add_edge(cell_name("U", rr, cc), cell_name("V", r, c), name, ie);
                b.set_attr(name, "g", -1.0);
            }
    return b.finish();
}

Image cnn_readout(const DynamicalGraph& g, const LanguageRegistry& reg, int rows, int cols) {
    auto lang = reg.find(g.language);
    auto sys = compile(g, *lang);
    SimConfig cfg;
    cfg.t_end = 30.0;  // cell time constant is 1
    cfg.samples = 61;
    auto traj = integrate(sys, cfg);
    auto ss = steady_state(traj, 24.0, 30.0, 1e2);
    Image out(static_cast<size_t>(rows));
    for (int r = 0; r < rows; ++r) {
        out[r].resize(static_cast<size_t>(cols));
        for (int c = 0; c < cols; ++c) {
            int idx = traj.var_index(cell_name("V", r, c));
            if (idx < 0) throw ArkError("missing CNN cell state " + cell_name("V", r, c));
            out[r][c] = ss.value[static_cast<size_t>(idx)] > 0 ? 1 : 0;
        }
    }
    return out;
}

// ---- oscillator-based computing ----------------------------------------

DynamicalGraph build_obc(const LanguageRegistry& reg, int n,
                         const std::vector<std::pair<int, int>>& edges, bool offset,
                         std::uint64_t seed) {
    GraphBuilder b(reg.find(offset ? "ofs-obc" : "obc"), seed);
    for (int i = 0; i < n; ++i) {
        const auto name = idx3("O", i);
        b.add_node(name, "Osc");
        b.set_init(name, 0, 2.0 * M_PI * uniform_sample(seed, name, "phase"));
        b.add_edge(name, name, idx3("s", i), "Cpl");
        b.set_attr(idx3("s", i), "k", 0.0);  // unused by the self rule
    }
    int c = 0;
    for (const auto& [a, bb] : edges) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "c%03d", c++);
        b.add_edge(idx3("O", a), idx3("O", bb), buf, offset ? "Cpl_ofs" : "Cpl");
        // anti-phase (max-cut) coupling
        b.set_attr(buf, "k", -1.0);
        if (offset) b.set_attr(buf, "ofs", 0.0);
    }
    return b.finish();
}

DynamicalGraph build_intercon_obc(const LanguageRegistry& reg, const std::vector<int>& groups,
                                  const std::vector<InterconEdge>& edges, std::uint64_t seed) {
    GraphBuilder b(reg.find("intercon-obc"), seed);
    for (size_t i = 0; i < groups.size(); ++i) {
        const auto name = idx3("O", static_cast<int>(i));
        b.add_node(name, "OscG");
        b.set_attr(name, "grp", static_cast<long long>(groups[i]));
        b.set_init(name, 0, 2.0 * M_PI * uniform_sample(seed, name, "phase"));
        b.add_edge(name, name, idx3("s", static_cast<int>(i)), "Cpl");
        b.set_attr(idx3("s", static_cast<int>(i)), "k", 0.0);
    }
    int c = 0;
    for (const auto& e : edges) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "c%03d", c++);
        b.add_edge(idx3("O", e.a), idx3("O", e.b), buf, e.global ? "Cpl_g" : "Cpl_l");
        b.set_attr(buf, "k", -1.0);
        b.set_attr(buf, "cost", e.cost);
    }
    return b.finish();
}

std::vector<std::pair<int, int>> random_connected_graph(int n, std::uint64_t seed) {
    for (std::uint64_t salt = 0;; ++salt) {
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                char buf[48];
                std::snprintf(buf, sizeof(buf), "e%d_%d_%llu", a, b,
                              static_cast<unsigned long long>(salt));
                if (uniform_sample(seed, "graph", buf) < 0.5) edges.emplace_back(a, b);
            }
        // connectivity via union-find
        std::vector<int> parent(static_cast<size_t>(n));
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            return parent[static_cast<size_t>(x)] == x
                       ? x
                       : parent[static_cast<size_t>(x)] = find(parent[static_cast<size_t>(x)]);
        };
        for (const auto& [a, b] : edges) parent[static_cast<size_t>(find(a))] = find(b);
        bool connected = true;
        for (int i = 0; i < n; ++i) connected = connected && find(i) == find(0);
        if (connected && !edges.empty()) return edges;
    }
}

MaxcutAnalysis maxcut_solve(const LanguageRegistry& reg,
                            const std::vector<std::pair<int, int>>& edges, int n, bool offset,
                            std::uint64_t seed, double d) {
    auto g = build_obc(reg, n, edges, offset, seed);
    auto lang = reg.find(g.language);
    auto sys = compile(g, *lang);
    SimConfig cfg;
    cfg.t_end = 5e-8;
    cfg.samples = 101;
    auto traj = integrate(sys, cfg);
    auto ss = steady_state(traj, 4e-8, 5e-8, 1e2);

    MaxcutAnalysis res;
    res.partition.assign(static_cast<size_t>(n), -1);
    res.sync = true;
    for (int i = 0; i < n; ++i) {
        int idx = traj.var_index(idx3("O", i));
        double phase = std::fmod(ss.value[static_cast<size_t>(idx)], 2.0 * M_PI);
        if (phase < 0) phase += 2.0 * M_PI;
        const double d0 = std::min(phase, 2.0 * M_PI - phase);
        const double d1 = std::fabs(phase - M_PI);
        if (d0 <= d)
            res.partition[static_cast<size_t>(i)] = 0;
        else if (d1 <= d)
            res.partition[static_cast<size_t>(i)] = 1;
        else
            res.sync = false;
    }

    auto cut_of = [&](unsigned mask) {
        int cut = 0;
        for (const auto& [a, b] : edges)
            cut += ((mask >> a) & 1u) != ((mask >> b) & 1u);
        return cut;
    };
    int best = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) best = std::max(best, cut_of(mask));
    res.best_cut = best;
    if (res.sync) {
        unsigned mask = 0;
        for (int i = 0; i < n; ++i)
            if (res.partition[static_cast<size_t>(i)] == 1) mask |= 1u << i;
        res.cut = cut_of(mask);
        res.solved = res.cut == res.best_cut;
    }
    return res;
}

}  // namespace ark::stdlib
