#pragma once

#include <cmath>
#include <optional>
#include <string_view>

namespace ark {

enum class Builtin { Sin, Cos, Exp, Abs, Min, Max, Pulse };

inline std::optional<Builtin> builtin_by_name(std::string_view name) {
    if (name == "sin") return Builtin::Sin;
    if (name == "cos") return Builtin::Cos;
    if (name == "exp") return Builtin::Exp;
    if (name == "abs") return Builtin::Abs;
    if (name == "min") return Builtin::Min;
    if (name == "max") return Builtin::Max;
    if (name == "pulse") return Builtin::Pulse;
    return std::nullopt;
}

inline int builtin_arity(Builtin b) {
    switch (b) {
        case Builtin::Min:
        case Builtin::Max: return 2;
        case Builtin::Pulse: return 3;
        default: return 1;
    }
}

/// Unit-amplitude trapezoid starting at t0 with total width w; rise and fall
/// take w/10 each, so the plateau spans [t0 + w/10, t0 + 9w/10].
inline double pulse_fn(double t, double t0, double w) {
    if (w <= 0) return 0.0;
    const double x = t - t0;
    const double ramp = 0.1 * w;
    if (x <= 0 || x >= w) return 0.0;
    if (x < ramp) return x / ramp;
    if (x > w - ramp) return (w - x) / ramp;
    return 1.0;
}

inline double eval_builtin(Builtin b, const double* args) {
    switch (b) {
        case Builtin::Sin: return std::sin(args[0]);
        case Builtin::Cos: return std::cos(args[0]);
        case Builtin::Exp: return std::exp(args[0]);
        case Builtin::Abs: return std::fabs(args[0]);
        case Builtin::Min: return std::fmin(args[0], args[1]);
        case Builtin::Max: return std::fmax(args[0], args[1]);
        case Builtin::Pulse: return pulse_fn(args[0], args[1], args[2]);
    }
    return 0.0;
}

}  // namespace ark
