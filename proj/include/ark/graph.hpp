#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ark/ast.hpp"
#include "ark/lang.hpp"

namespace ark {

/// Runtime value held by an attribute or initial-value slot. Mismatched real
/// slots record both the nominal and the sampled value.
struct Value {
    enum class Kind { Real, Int, Lambda };
    Kind kind = Kind::Real;
    double real = 0;
    long long intv = 0;
    std::vector<std::string> lambda_params;
    ExprPtr lambda_body;
    double nominal = 0;
    bool mismatched = false;

    static Value of_real(double v) {
        Value x;
        x.kind = Kind::Real;
        x.real = v;
        x.nominal = v;
        return x;
    }
    static Value of_int(long long v) {
        Value x;
        x.kind = Kind::Int;
        x.intv = v;
        return x;
    }
    static Value of_lambda(std::vector<std::string> params, ExprPtr body) {
        Value x;
        x.kind = Kind::Lambda;
        x.lambda_params = std::move(params);
        x.lambda_body = std::move(body);
        return x;
    }
    /// Numeric view (int widened to double); throws on lambdas.
    [[nodiscard]] double as_real() const;
};

struct GraphNode {
    std::string name;
    std::string type;
    std::map<std::string, Value> attrs;
    std::vector<Value> inits;  // one per derivative index
};

struct GraphEdge {
    std::string name;
    std::string type;
    std::string src, dst;
    std::map<std::string, Value> attrs;
    bool on = true;
};

struct DynamicalGraph {
    std::string language;
    std::uint64_t seed = 0;
    std::uint64_t clamp_count = 0;  // mismatch samples clamped into range
    std::map<std::string, GraphNode> nodes;
    std::map<std::string, GraphEdge> edges;
};

struct IncidentEdge {
    const GraphEdge* edge;
    bool outgoing;  // node is the edge's source
    bool self;      // src == dst
};

/// Edges touching `node`, name-ordered; a self-loop appears once.
std::vector<IncidentEdge> incident_edges(const DynamicalGraph& g, const std::string& node);

/// Host-level counterpart of the five function-body statement forms. Nominal
/// values are recorded as statements execute; mismatch sampling and
/// completeness checks happen in finish(), so construction order never
/// affects the sampled values.
class GraphBuilder {
public:
    GraphBuilder(LanguagePtr lang, std::uint64_t seed, bool mismatch_enabled = true);

    void add_node(const std::string& name, const std::string& type);
    void add_edge(const std::string& src, const std::string& dst, const std::string& name,
                  const std::string& type);
    void set_attr(const std::string& owner, const std::string& attr, Value v,
                  bool from_argument = false);
    void set_attr(const std::string& owner, const std::string& attr, double v) {
        set_attr(owner, attr, Value::of_real(v));
    }
    void set_attr(const std::string& owner, const std::string& attr, long long v) {
        set_attr(owner, attr, Value::of_int(v));
    }
    void set_init(const std::string& node, long long index, double v);
    void set_switch(const std::string& edge, bool on);

    [[nodiscard]] const LanguageDef& language() const { return *lang_; }

    /// Verifies completeness, samples mismatch, and returns the graph.
    DynamicalGraph finish();

private:
    LanguagePtr lang_;
    DynamicalGraph g_;
    bool mismatch_enabled_;
    std::map<std::string, bool> switched_;  // edge -> last guard value

    const SigTypeAst& attr_decl(const std::string& owner, const std::string& attr,
                                bool* is_edge = nullptr);
};

/// Function invocation: executes the body against concrete argument values
/// with the builder above. Deterministic in (func, args, seed).
DynamicalGraph invoke(const FuncDefAst& func, const std::map<std::string, Value>& args,
                      std::uint64_t seed, const LanguageRegistry& registry,
                      bool mismatch_enabled = true);

std::string export_json(const DynamicalGraph& g);
DynamicalGraph import_json(const std::string& text, const LanguageRegistry& registry);
std::string export_dot(const DynamicalGraph& g);

/// Deterministic per-slot mismatch sampling (exposed for statistical tests):
/// draws Normal(nominal, nominal*s0 + s1) from a key derived of
/// (seed, owner name, slot name).
double mismatch_sample(std::uint64_t seed, const std::string& owner, const std::string& slot,
                       double nominal, double s0, double s1);

/// Deterministic uniform draw in [0, 1) from the same keying scheme
/// (generators use it for e.g. random initial phases).
double uniform_sample(std::uint64_t seed, const std::string& owner, const std::string& slot);

}  // namespace ark
