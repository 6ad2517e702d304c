#include "ark/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ark/compiler.hpp"
#include "ark/experiments.hpp"
#include "ark/graph.hpp"
#include "ark/parser.hpp"
#include "ark/sema.hpp"
#include "ark/sim.hpp"
#include "ark/stdlib.hpp"
#include "ark/validator.hpp"

namespace ark {

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;       // parse/semantic/usage errors
constexpr int kValidation = 2;  // graph rejected by the validator
constexpr int kNumeric = 3;     // integration / RHS failures

struct CommonOpts {
    std::vector<std::string> files;
    std::string func;
    std::string graph_path;
    std::vector<std::string> arg_bindings;
    std::uint64_t seed = 1;
    bool no_mismatch = false;
};

struct SimOpts {
    double t_end = 1e-7;
    int samples = 201;
    double rtol = 1e-6;
    double atol = 1e-9;
    std::string out;
    std::string dot;
    bool json = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_target = true) {
    cmd->add_option("--file", o.files, "source file(s) providing languages/functions");
    if (needs_target) {
        cmd->add_option("--func", o.func, "function to invoke");
        cmd->add_option("--graph", o.graph_path, "graph JSON to load instead of invoking");
        cmd->add_option("--args", o.arg_bindings, "function argument bindings name=value");
        cmd->add_option("--seed", o.seed, "mismatch/initial-condition seed");
        cmd->add_flag("--no-mismatch", o.no_mismatch, "disable mismatch sampling");
    }
}

void add_sim(CLI::App* cmd, SimOpts& o) {
    cmd->add_option("--t-end", o.t_end, "simulation end time");
    cmd->add_option("--samples", o.samples, "output grid size");
    cmd->add_option("--rtol", o.rtol, "relative tolerance");
    cmd->add_option("--atol", o.atol, "absolute tolerance");
    cmd->add_option("--out", o.out, "output file (default stdout)");
    cmd->add_option("--dot", o.dot, "also write the graph as DOT to this path");
    cmd->add_flag("--json", o.json, "JSON output where applicable");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArkError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArkError("cannot write '" + path + "'");
    out << text;
}

bool stdlib_enabled() {
    const char* v = std::getenv("ARK_STDLIB_DISABLE");
    return !(v && std::string(v) == "1");
}

/// Loads stdlib (unless disabled) plus any --file sources; statically checks
/// the latter. Collected functions include the stdlib examples.
struct Session {
    LanguageRegistry reg;
    std::vector<FuncDefAst> funcs;

    int load(const std::vector<std::string>& files) {
        if (stdlib_enabled()) {
            stdlib::load(reg);
            for (const auto& f : stdlib::examples()) funcs.push_back(f);
        }
        for (const auto& path : files) {
            DiagnosticList diags;
            auto prog = parse(read_file(path), diags);
            if (!diags.has_errors()) check_program(prog, reg, diags);
            if (diags.has_errors()) {
                std::cerr << path << ":\n" << diags.to_string();
                return kUsage;
            }
            for (const auto& st : prog.statements)
                if (const auto* f = std::get_if<FuncDefAst>(&st.node)) funcs.push_back(*f);
        }
        return kOk;
    }

    const FuncDefAst* find(const std::string& name) const {
        for (const auto& f : funcs)
            if (f.name == name) return &f;
        return nullptr;
    }
};

std::map<std::string, Value> parse_bindings(const FuncDefAst& func,
                                            const std::vector<std::string>& bindings) {
    std::map<std::string, Value> out;
    for (const auto& b : bindings) {
        auto eq = b.find('=');
        if (eq == std::string::npos) throw ArkError("argument binding '" + b + "' is not k=v");
        const std::string name = b.substr(0, eq);
        const std::string text = b.substr(eq + 1);
        const FuncArgAst* decl = nullptr;
        for (const auto& a : func.args)
            if (a.name == name) decl = &a;
        if (!decl) throw ArkError("function '" + func.name + "' has no argument '" + name + "'");
        try {
            if (decl->type.kind == SigTypeAst::Kind::Int)
                out[name] = Value::of_int(std::stoll(text));
            else if (decl->type.kind == SigTypeAst::Kind::Real)
                out[name] = Value::of_real(std::stod(text));
            else
                throw ArkError("lambda arguments cannot be set from the command line");
        } catch (const std::invalid_argument&) {
            throw ArkError("cannot parse value '" + text + "' for argument '" + name + "'");
        }
    }
    return out;
}

/// invoke-or-load; throws ArkError for anything user-input related.
DynamicalGraph obtain_graph(Session& s, const CommonOpts& o) {
    if (!o.graph_path.empty()) return import_json(read_file(o.graph_path), s.reg);
    if (o.func.empty()) throw ArkError("one of --func or --graph is required");
    const auto* f = s.find(o.func);
    if (!f) throw ArkError("unknown function '" + o.func + "'");
    return invoke(*f, parse_bindings(*f, o.arg_bindings), o.seed, s.reg, !o.no_mismatch);
}

int with_graph(Session& s, const CommonOpts& o, const SimOpts* sim,
               const std::function<int(const DynamicalGraph&, const LanguageDef&)>& fn) {
    DynamicalGraph g;
    try {
        g = obtain_graph(s, o);
    } catch (const ArkError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    if (sim && !sim->dot.empty()) {
        try {
            write_output(sim->dot, export_dot(g));
        } catch (const ArkError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kUsage;
        }
    }
    return fn(g, *s.reg.find(g.language));
}

int cmd_check(const CommonOpts& o) {
    Session s;
    int rc = s.load(o.files);
    if (rc != kOk) return rc;
    if (o.files.empty()) {
        // self-check: the embedded stdlib sources must be clean
        DiagnosticList diags;
        auto prog = parse(stdlib::source_text(), diags);
        LanguageRegistry fresh;
        if (!diags.has_errors()) check_program(prog, fresh, diags);
        if (diags.has_errors()) {
            std::cerr << diags.to_string();
            return kUsage;
        }
    }
    std::cout << "ok\n";
    return kOk;
}

int cmd_validate(const CommonOpts& o, const SimOpts& sim) {
    Session s;
    int rc = s.load(o.files);
    if (rc != kOk) return rc;
    return with_graph(s, o, &sim, [&](const DynamicalGraph& g, const LanguageDef& lang) {
        ValidationReport rep;
        try {
            rep = validate(g, lang);
        } catch (const ArkError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kUsage;
        }
        write_output(sim.out, sim.json ? rep.to_json_text() : rep.to_text());
        return rep.ok ? kOk : kValidation;
    });
}

int cmd_compile(const CommonOpts& o, const SimOpts& sim) {
    Session s;
    int rc = s.load(o.files);
    if (rc != kOk) return rc;
    return with_graph(s, o, &sim, [&](const DynamicalGraph& g, const LanguageDef& lang) {
        auto rep = validate(g, lang);
        if (!rep.ok) {
            std::cerr << rep.to_text();
            return kValidation;
        }
        try {
            auto sys = compile(g, lang);
            write_output(sim.out, sim.json ? system_json(sys) : pretty_equations(sys));
        } catch (const ArkError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kUsage;
        }
        return kOk;
    });
}

int cmd_sim(const CommonOpts& o, const SimOpts& sim) {
    Session s;
    int rc = s.load(o.files);
    if (rc != kOk) return rc;
    return with_graph(s, o, &sim, [&](const DynamicalGraph& g, const LanguageDef& lang) {
        ValidationReport rep;
        try {
            rep = validate(g, lang);
        } catch (const ArkError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kUsage;
        }
        if (!rep.ok) {
            std::cerr << rep.to_text();
            return kValidation;
        }
        OdeSystem sys;
        SimConfig cfg;
        cfg.t_end = sim.t_end;
        cfg.samples = sim.samples;
        cfg.rtol = sim.rtol;
        cfg.atol = sim.atol;
        try {
            sys = compile(g, lang);
            cfg.check();
        } catch (const ArkError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kUsage;
        }
        try {
            auto traj = integrate(sys, cfg);
            write_output(sim.out, traj.to_csv());
        } catch (const ArkError& e) {
            std::cerr << "numeric failure: " << e.what() << "\n";
            return kNumeric;
        }
        return kOk;
    });
}

int cmd_sweep(const CommonOpts& o, const SimOpts& sim, const std::string& seeds_range,
              const std::string& probe) {
    Session s;
    int rc = s.load(o.files);
    if (rc != kOk) return rc;
    std::uint64_t lo = 0, hi = 0;
    const auto dots = seeds_range.find("..");
    try {
        if (dots == std::string::npos) throw ArkError("--seeds must be A..B");
        lo = std::stoull(seeds_range.substr(0, dots));
        hi = std::stoull(seeds_range.substr(dots + 2));
        if (hi < lo) throw ArkError("--seeds range is empty");
    } catch (const std::exception& e) {
        std::cerr << "error: bad --seeds '" << seeds_range << "'\n";
        return kUsage;
    }
    const auto* f = s.find(o.func);
    if (!f) {
        std::cerr << "error: unknown function '" << o.func << "'\n";
        return kUsage;
    }
    SimConfig cfg;
    cfg.t_end = sim.t_end;
    cfg.samples = sim.samples;
    cfg.rtol = sim.rtol;
    cfg.atol = sim.atol;
    try {
        auto res = sweep(*f, parse_bindings(*f, o.arg_bindings), lo, hi, cfg, s.reg, probe);
        write_output(sim.out, res.summary_csv());
    } catch (const ArkError& e) {
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        return what.find("validation") != std::string::npos ? kValidation : kNumeric;
    }
    return kOk;
}

int cmd_experiment(const std::string& name, const std::string& out_dir, int count) {
    Session s;
    int rc = s.load({});
    if (rc != kOk) return rc;
    try {
        if (name == "tln-mismatch") {
            auto sum = experiments::tln_mismatch(s.reg, out_dir, count > 0 ? count : 100);
            std::cout << "tln-mismatch: seeds=" << sum.seeds << " std_cint=" << sum.std_cint
                      << " std_gm=" << sum.std_gm << " ratio=" << sum.ratio << "\n";
        } else if (name == "cnn-edge") {
            auto sum = experiments::cnn_edge(s.reg, out_dir, count > 0 ? count : 20);
            std::cout << "cnn-edge: images=" << sum.images
                      << " ideal_agreement_min=" << sum.ideal_agreement_min
                      << " ideal_err=" << sum.ideal_error_rate
                      << " hw_err=" << sum.hw_error_rate << "\n";
        } else if (name == "obc-maxcut") {
            auto sum = experiments::obc_maxcut(s.reg, out_dir, count > 0 ? count : 200);
            std::cout << "obc-maxcut: graphs=" << sum.graphs << " ofs_s1=" << sum.ofs_s1 << "\n";
            for (int v = 0; v < 2; ++v)
                for (int t = 0; t < 2; ++t)
                    std::cout << (v ? "offset" : "ideal") << " d=" << (t ? 0.1 : 0.01)
                              << "pi sync=" << sum.sync[v][t] << " solved=" << sum.solved[v][t]
                              << "\n";
        } else {
            std::cerr << "error: unknown experiment '" << name << "'\n";
            return kUsage;
        }
    } catch (const ArkError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    }
    return kOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"ark: analog-compute DSL toolchain"};
    app.require_subcommand(1);

    CommonOpts check_o, val_o, comp_o, sim_o, sweep_o;
    SimOpts val_s, comp_s, sim_s, sweep_s;
    std::string seeds_range = "1..1", probe, exp_name, exp_out;
    int exp_count = 0;

    auto* check = app.add_subcommand("check", "parse + static checks");
    add_common(check, check_o, false);

    auto* validate_cmd = app.add_subcommand("validate", "invoke and validate a graph");
    add_common(validate_cmd, val_o);
    add_sim(validate_cmd, val_s);

    auto* compile_cmd = app.add_subcommand("compile", "print the generated ODE system");
    add_common(compile_cmd, comp_o);
    add_sim(compile_cmd, comp_s);

    auto* sim_cmd = app.add_subcommand("sim", "simulate a transient and emit CSV");
    add_common(sim_cmd, sim_o);
    add_sim(sim_cmd, sim_s);

    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo seed sweep of one probe");
    add_common(sweep_cmd, sweep_o);
    add_sim(sweep_cmd, sweep_s);
    sweep_cmd->add_option("--seeds", seeds_range, "seed range A..B");
    sweep_cmd->add_option("--probe", probe, "state variable to aggregate")->required();

    auto* exp_cmd = app.add_subcommand("experiment", "run a canned experiment");
    exp_cmd->add_option("name", exp_name, "tln-mismatch | cnn-edge | obc-maxcut")->required();
    exp_cmd->add_option("--out-dir", exp_out, "directory for report files");
    exp_cmd->add_option("--count", exp_count, "seeds/images/graphs override");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    if (check->parsed()) return cmd_check(check_o);
    if (validate_cmd->parsed()) return cmd_validate(val_o, val_s);
    if (compile_cmd->parsed()) return cmd_compile(comp_o, comp_s);
    if (sim_cmd->parsed()) return cmd_sim(sim_o, sim_s);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_o, sweep_s, seeds_range, probe);
    if (exp_cmd->parsed()) return cmd_experiment(exp_name, exp_out, exp_count);
    return kUsage;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args);
}

}  // namespace ark
