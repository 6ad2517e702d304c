#include "ark/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "ark/ast_printer.hpp"
#include "ark/builtins.hpp"
#include "ark/parser.hpp"

namespace ark {

double Value::as_real() const {
    switch (kind) {
        case Kind::Real: return real;
        case Kind::Int: return static_cast<double>(intv);
        case Kind::Lambda: throw ArkError("lambda value used where a number is required");
    }
    return 0;
}

std::vector<IncidentEdge> incident_edges(const DynamicalGraph& g, const std::string& node) {
    std::vector<IncidentEdge> out;
    for (const auto& [name, e] : g.edges) {
        bool is_src = e.src == node;
        bool is_dst = e.dst == node;
        if (!is_src && !is_dst) continue;
        out.push_back({&e, is_src, is_src && is_dst});
    }
    return out;
}

// ---- deterministic per-slot sampling -----------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_str(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) h = splitmix64(h ^ c);
    return splitmix64(h ^ s.size());
}

/// Uniform in (0,1), never exactly 0.
double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double mismatch_sample(std::uint64_t seed, const std::string& owner, const std::string& slot,
                       double nominal, double s0, double s1) {
    const double sd = nominal * s0 + s1;
    if (sd == 0.0) return nominal;
    std::uint64_t key = hash_str(hash_str(splitmix64(seed), owner), slot);
    const double u1 = to_unit(splitmix64(key));
    const double u2 = to_unit(splitmix64(key + 1));
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return nominal + sd * z;
}

double uniform_sample(std::uint64_t seed, const std::string& owner, const std::string& slot) {
    std::uint64_t key = hash_str(hash_str(splitmix64(seed), owner), slot);
    return to_unit(splitmix64(key)) - 0x1.0p-54;  // shift (0,1) onto [0,1)
}

// ---- builder ------------------------------------------------------------

GraphBuilder::GraphBuilder(LanguagePtr lang, std::uint64_t seed, bool mismatch_enabled)
    : lang_(std::move(lang)), mismatch_enabled_(mismatch_enabled) {
    if (!lang_) throw ArkError("graph builder requires a resolved language");
    g_.language = lang_->name;
    g_.seed = seed;
}

void GraphBuilder::add_node(const std::string& name, const std::string& type) {
    if (g_.nodes.count(name) || g_.edges.count(name))
        throw ArkError("duplicate node name '" + name + "'");
    auto it = lang_->node_types.find(type);
    if (it == lang_->node_types.end())
        throw ArkError("unknown node type '" + type + "' in language '" + lang_->name + "'");
    GraphNode n;
    n.name = name;
    n.type = type;
    n.inits.resize(static_cast<size_t>(it->second.order));
    for (auto& v : n.inits) v.kind = Value::Kind::Lambda;  // sentinel: unset
    g_.nodes.emplace(name, std::move(n));
}

void GraphBuilder::add_edge(const std::string& src, const std::string& dst,
                            const std::string& name, const std::string& type) {
    if (g_.nodes.count(name) || g_.edges.count(name))
        throw ArkError("duplicate edge name '" + name + "'");
    if (!g_.nodes.count(src)) throw ArkError("unknown edge source node '" + src + "'");
    if (!g_.nodes.count(dst)) throw ArkError("unknown edge destination node '" + dst + "'");
    if (!lang_->has_edge_type(type))
        throw ArkError("unknown edge type '" + type + "' in language '" + lang_->name + "'");
    GraphEdge e;
    e.name = name;
    e.type = type;
    e.src = src;
    e.dst = dst;
    g_.edges.emplace(name, std::move(e));
}

const SigTypeAst& GraphBuilder::attr_decl(const std::string& owner, const std::string& attr,
                                          bool* is_edge) {
    if (auto nit = g_.nodes.find(owner); nit != g_.nodes.end()) {
        if (is_edge) *is_edge = false;
        const auto& ty = lang_->node_types.at(nit->second.type);
        auto ait = ty.attributes.find(attr);
        if (ait == ty.attributes.end())
            throw ArkError("node type '" + ty.name + "' has no attribute '" + attr + "'");
        return ait->second;
    }
    if (auto eit = g_.edges.find(owner); eit != g_.edges.end()) {
        if (is_edge) *is_edge = true;
        const auto& ty = lang_->edge_types.at(eit->second.type);
        auto ait = ty.attributes.find(attr);
        if (ait == ty.attributes.end())
            throw ArkError("edge type '" + ty.name + "' has no attribute '" + attr + "'");
        return ait->second;
    }
    throw ArkError("unknown node or edge '" + owner + "'");
}

namespace {

void check_range(const SigTypeAst& decl, const Value& v, const std::string& where) {
    switch (decl.kind) {
        case SigTypeAst::Kind::Real: {
            if (v.kind == Value::Kind::Lambda)
                throw ArkError(where + ": expected a real value");
            double x = v.as_real();
            if (!(x >= decl.x0 && x <= decl.x1))
                throw ArkError(where + ": value " + std::to_string(x) + " outside range [" +
                               std::to_string(decl.x0) + ", " + std::to_string(decl.x1) + "]");
            break;
        }
        case SigTypeAst::Kind::Int: {
            if (v.kind != Value::Kind::Int)
                throw ArkError(where + ": expected an integer value");
            if (v.intv < decl.i0 || v.intv > decl.i1)
                throw ArkError(where + ": value " + std::to_string(v.intv) +
                               " outside range [" + std::to_string(decl.i0) + ", " +
                               std::to_string(decl.i1) + "]");
            break;
        }
        case SigTypeAst::Kind::Lambda:
            if (v.kind != Value::Kind::Lambda || !v.lambda_body)
                throw ArkError(where + ": expected a lambda value");
            if (v.lambda_params.size() != decl.params.size())
                throw ArkError(where + ": lambda arity mismatch (expected " +
                               std::to_string(decl.params.size()) + ")");
            break;
    }
}

}  // namespace

void GraphBuilder::set_attr(const std::string& owner, const std::string& attr, Value v,
                            bool from_argument) {
    const auto& decl = attr_decl(owner, attr);
    if (from_argument && decl.is_const)
        throw ArkError("attribute '" + owner + "." + attr +
                       "' is const and cannot be programmed from a function argument");
    // widen an int literal into a real slot
    if (decl.kind == SigTypeAst::Kind::Real && v.kind == Value::Kind::Int)
        v = Value::of_real(static_cast<double>(v.intv));
    check_range(decl, v, "set-attr " + owner + "." + attr);
    if (auto nit = g_.nodes.find(owner); nit != g_.nodes.end())
        nit->second.attrs[attr] = std::move(v);
    else
        g_.edges.at(owner).attrs[attr] = std::move(v);
}

void GraphBuilder::set_init(const std::string& node, long long index, double v) {
    auto nit = g_.nodes.find(node);
    if (nit == g_.nodes.end()) throw ArkError("unknown node '" + node + "'");
    const auto& ty = lang_->node_types.at(nit->second.type);
    if (index < 0 || index >= ty.order)
        throw ArkError("init index " + std::to_string(index) + " outside [0, " +
                       std::to_string(ty.order) + ") for node '" + node + "'");
    const auto& decl = ty.init_slots[static_cast<size_t>(index)];
    auto val = Value::of_real(v);
    check_range(decl, val, "set-init " + node + "(" + std::to_string(index) + ")");
    nit->second.inits[static_cast<size_t>(index)] = val;
}

void GraphBuilder::set_switch(const std::string& edge, bool on) {
    auto eit = g_.edges.find(edge);
    if (eit == g_.edges.end()) throw ArkError("unknown edge '" + edge + "'");
    if (lang_->edge_types.at(eit->second.type).fixed)
        throw ArkError("edge '" + edge + "' has a fixed type and admits no switch statement");
    eit->second.on = on;
    switched_[edge] = on;
}

DynamicalGraph GraphBuilder::finish() {
    auto sample_slot = [&](const std::string& owner, const std::string& slot, Value& v,
                           const SigTypeAst& decl) {
        if (decl.kind != SigTypeAst::Kind::Real || !decl.has_mismatch || !mismatch_enabled_)
            return;
        v.nominal = v.real;
        v.mismatched = true;
        double s = mismatch_sample(g_.seed, owner, slot, v.nominal, decl.s0, decl.s1);
        double clamped = std::clamp(s, decl.x0, decl.x1);
        if (clamped != s) ++g_.clamp_count;
        v.real = clamped;
    };

    for (auto& [name, n] : g_.nodes) {
        const auto& ty = lang_->node_types.at(n.type);
        for (const auto& [aname, decl] : ty.attributes) {
            auto it = n.attrs.find(aname);
            if (it == n.attrs.end())
                throw ArkError("node '" + name + "' leaves attribute '" + aname + "' unset");
            sample_slot(name, aname, it->second, decl);
        }
        for (size_t i = 0; i < n.inits.size(); ++i) {
            if (n.inits[i].kind == Value::Kind::Lambda)
                throw ArkError("node '" + name + "' leaves initial value " + std::to_string(i) +
                               " unset");
            sample_slot(name, "init(" + std::to_string(i) + ")", n.inits[i], ty.init_slots[i]);
        }
    }
    for (auto& [name, e] : g_.edges) {
        const auto& ty = lang_->edge_types.at(e.type);
        for (const auto& [aname, decl] : ty.attributes) {
            auto it = e.attrs.find(aname);
            if (it == e.attrs.end())
                throw ArkError("edge '" + name + "' leaves attribute '" + aname + "' unset");
            sample_slot(name, aname, it->second, decl);
        }
        if (ty.fixed) e.on = true;
    }
    return std::move(g_);
}

// ---- invocation ---------------------------------------------------------

namespace {

/// Evaluates switch guards and other invocation-time expressions over the
/// bound argument values only.
class ArgEvaluator {
public:
    explicit ArgEvaluator(const std::map<std::string, Value>& args) : args_(args) {}

    double eval(const ExprPtr& e) const {
        return std::visit(
            [&](const auto& n) -> double {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Expr::RealLit>) {
                    return n.value;
                } else if constexpr (std::is_same_v<T, Expr::IntLit>) {
                    return static_cast<double>(n.value);
                } else if constexpr (std::is_same_v<T, Expr::Ident>) {
                    return arg(n.name);
                } else if constexpr (std::is_same_v<T, Expr::AttrRef>) {
                    return arg(n.owner + "." + n.attr);  // dotted argument name
                } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                    return -eval(n.operand);
                } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                    double a = eval(n.lhs), b = eval(n.rhs);
                    switch (n.op) {
                        case BinaryOp::Add: return a + b;
                        case BinaryOp::Sub: return a - b;
                        case BinaryOp::Mul: return a * b;
                        case BinaryOp::Div: return a / b;
                        case BinaryOp::Pow: return std::pow(a, b);
                    }
                    return 0;
                } else if constexpr (std::is_same_v<T, Expr::Call>) {
                    const auto* id = std::get_if<Expr::Ident>(&n.callee->node);
                    auto b = id ? builtin_by_name(id->name) : std::nullopt;
                    if (!b) throw ArkError("switch guards may only call builtin functions");
                    double argv[3] = {0, 0, 0};
                    for (size_t i = 0; i < n.args.size() && i < 3; ++i)
                        argv[i] = eval(n.args[i]);
                    return eval_builtin(*b, argv);
                } else if constexpr (std::is_same_v<T, Expr::If>) {
                    return eval_bool(n.cond) ? eval(n.then_e) : eval(n.else_e);
                } else {
                    throw ArkError(
                        "switch guards are restricted to function arguments and constants");
                }
            },
            e->node);
    }

    bool eval_bool(const BoolExprPtr& e) const {
        return std::visit(
            [&](const auto& n) -> bool {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, BoolExpr::BoolLit>) {
                    return n.value;
                } else if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
                    double a = eval(n.lhs), b = eval(n.rhs);
                    switch (n.op) {
                        case CmpOp::Eq: return a == b;
                        case CmpOp::Ne: return a != b;
                        case CmpOp::Lt: return a < b;
                        case CmpOp::Le: return a <= b;
                        case CmpOp::Gt: return a > b;
                        case CmpOp::Ge: return a >= b;
                    }
                    return false;
                } else if constexpr (std::is_same_v<T, BoolExpr::And>) {
                    return eval_bool(n.lhs) && eval_bool(n.rhs);
                } else if constexpr (std::is_same_v<T, BoolExpr::Or>) {
                    return eval_bool(n.lhs) || eval_bool(n.rhs);
                } else {
                    return !eval_bool(n.operand);
                }
            },
            e->node);
    }

private:
    const std::map<std::string, Value>& args_;

    double arg(const std::string& name) const {
        auto it = args_.find(name);
        if (it == args_.end())
            throw ArkError("unbound identifier '" + name + "' in switch guard");
        return it->second.as_real();
    }
};

}  // namespace

DynamicalGraph invoke(const FuncDefAst& func, const std::map<std::string, Value>& args,
                      std::uint64_t seed, const LanguageRegistry& registry,
                      bool mismatch_enabled) {
    auto lang = registry.find(func.language);
    if (!lang) throw ArkError("function '" + func.name + "' uses unknown language '" +
                              func.language + "'");
    for (const auto& arg : func.args) {
        auto it = args.find(arg.name);
        if (it == args.end())
            throw ArkError("missing argument '" + arg.name + "' for function '" + func.name +
                           "'");
        Value v = it->second;
        if (arg.type.kind == SigTypeAst::Kind::Real && v.kind == Value::Kind::Int)
            v = Value::of_real(static_cast<double>(v.intv));
        check_range(arg.type, v, "argument '" + arg.name + "'");
    }
    for (const auto& [name, v] : args) {
        bool declared = false;
        for (const auto& arg : func.args) declared = declared || arg.name == name;
        if (!declared)
            throw ArkError("function '" + func.name + "' has no argument '" + name + "'");
    }

    GraphBuilder b(lang, seed, mismatch_enabled);
    ArgEvaluator guard_eval(args);

    auto resolve_val = [&](const FuncValAst& fv, bool* from_arg) -> Value {
        *from_arg = false;
        if (const auto* d = std::get_if<double>(&fv.value)) return Value::of_real(*d);
        if (const auto* i = std::get_if<long long>(&fv.value)) return Value::of_int(*i);
        if (const auto* l = std::get_if<Expr::Lambda>(&fv.value))
            return Value::of_lambda(l->params, l->body);
        const auto& ref = std::get<std::string>(fv.value);
        auto it = args.find(ref);
        if (it == args.end()) throw ArkError("unknown argument '" + ref + "'");
        *from_arg = true;
        return it->second;
    };

    for (const auto& st : func.body) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, FuncStAst::Node>) {
                    b.add_node(s.name, s.type);
                } else if constexpr (std::is_same_v<T, FuncStAst::Edge>) {
                    b.add_edge(s.src, s.dst, s.name, s.type);
                } else if constexpr (std::is_same_v<T, FuncStAst::SetAttr>) {
                    bool from_arg = false;
                    Value v = resolve_val(s.value, &from_arg);
                    b.set_attr(s.owner, s.attr, std::move(v), from_arg);
                } else if constexpr (std::is_same_v<T, FuncStAst::SetInit>) {
                    bool from_arg = false;
                    Value v = resolve_val(s.value, &from_arg);
                    b.set_init(s.node, s.index, v.as_real());
                } else if constexpr (std::is_same_v<T, FuncStAst::SetSwitch>) {
                    b.set_switch(s.edge, guard_eval.eval_bool(s.guard));
                }
            },
            st.node);
    }
    return b.finish();
}

// ---- JSON / DOT ---------------------------------------------------------

namespace {

ordered_json value_to_json(const Value& v) {
    ordered_json j;
    switch (v.kind) {
        case Value::Kind::Real:
            j["kind"] = "real";
            j["value"] = v.real;
            if (v.mismatched) {
                j["nominal"] = v.nominal;
                j["mismatched"] = true;
            }
            break;
        case Value::Kind::Int:
            j["kind"] = "int";
            j["value"] = v.intv;
            break;
        case Value::Kind::Lambda:
            j["kind"] = "lambd";
            j["params"] = v.lambda_params;
            j["body"] = pretty_print(v.lambda_body);
            break;
    }
    return j;
}

Value value_from_json(const ordered_json& j) {
    Value v;
    const std::string kind = j.at("kind");
    if (kind == "real") {
        v = Value::of_real(j.at("value").get<double>());
        if (j.value("mismatched", false)) {
            v.mismatched = true;
            v.nominal = j.at("nominal").get<double>();
        }
    } else if (kind == "int") {
        v = Value::of_int(j.at("value").get<long long>());
    } else {
        DiagnosticList diags;
        auto body = parse_expression(j.at("body").get<std::string>(), diags);
        if (!body || diags.has_errors())
            throw ArkError("invalid lambda body in graph JSON: " + diags.to_string());
        v = Value::of_lambda(j.at("params").get<std::vector<std::string>>(), body);
    }
    return v;
}

}  // namespace

std::string export_json(const DynamicalGraph& g) {
    ordered_json j;
    j["language"] = g.language;
    j["seed"] = g.seed;
    j["clamped"] = g.clamp_count;
    j["nodes"] = ordered_json::object();
    for (const auto& [name, n] : g.nodes) {
        ordered_json jn;
        jn["type"] = n.type;
        jn["attrs"] = ordered_json::object();
        for (const auto& [an, av] : n.attrs) jn["attrs"][an] = value_to_json(av);
        jn["inits"] = ordered_json::array();
        for (const auto& iv : n.inits) jn["inits"].push_back(value_to_json(iv));
        j["nodes"][name] = std::move(jn);
    }
    j["edges"] = ordered_json::object();
    for (const auto& [name, e] : g.edges) {
        ordered_json je;
        je["type"] = e.type;
        je["src"] = e.src;
        je["dst"] = e.dst;
        je["on"] = e.on;
        je["attrs"] = ordered_json::object();
        for (const auto& [an, av] : e.attrs) je["attrs"][an] = value_to_json(av);
        j["edges"][name] = std::move(je);
    }
    return j.dump(2) + "\n";
}

DynamicalGraph import_json(const std::string& text, const LanguageRegistry& registry) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& ex) {
        throw ArkError(std::string("graph JSON parse error: ") + ex.what());
    }
    DynamicalGraph g;
    g.language = j.at("language").get<std::string>();
    if (!registry.find(g.language))
        throw ArkError("graph references unknown language '" + g.language + "'");
    g.seed = j.at("seed").get<std::uint64_t>();
    g.clamp_count = j.value("clamped", std::uint64_t{0});
    for (const auto& [name, jn] : j.at("nodes").items()) {
        GraphNode n;
        n.name = name;
        n.type = jn.at("type").get<std::string>();
        for (const auto& [an, av] : jn.at("attrs").items()) n.attrs[an] = value_from_json(av);
        for (const auto& iv : jn.at("inits")) n.inits.push_back(value_from_json(iv));
        g.nodes.emplace(name, std::move(n));
    }
    for (const auto& [name, je] : j.at("edges").items()) {
        GraphEdge e;
        e.name = name;
        e.type = je.at("type").get<std::string>();
        e.src = je.at("src").get<std::string>();
        e.dst = je.at("dst").get<std::string>();
        e.on = je.at("on").get<bool>();
        for (const auto& [an, av] : je.at("attrs").items()) e.attrs[an] = value_from_json(av);
        g.edges.emplace(name, std::move(e));
    }
    return g;
}

std::string export_dot(const DynamicalGraph& g) {
    static const char* kShapes[] = {"ellipse", "box", "diamond", "hexagon", "octagon",
                                    "trapezium", "parallelogram", "house"};
    static const char* kColors[] = {"lightblue", "lightyellow", "lightgreen", "lightpink",
                                    "lightgrey", "orange", "cyan", "plum"};
    std::map<std::string, size_t> type_class;
    for (const auto& [name, n] : g.nodes)
        type_class.emplace(n.type, type_class.size());

    std::string out = "digraph \"" + g.language + "\" {\n";
    for (const auto& [name, n] : g.nodes) {
        size_t c = type_class[n.type] % 8;
        out += "  \"" + name + "\" [label=\"" + name + " : " + n.type + "\", shape=" +
               kShapes[c] + ", style=filled, fillcolor=" + kColors[c] + "];\n";
    }
    for (const auto& [name, e] : g.edges) {
        out += "  \"" + e.src + "\" -> \"" + e.dst + "\" [label=\"" + name + " : " + e.type +
               "\"" + (e.on ? "" : ", style=dashed") + "];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace ark
