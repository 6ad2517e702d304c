#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ark {

/// Half-open character span within one source buffer, plus 1-based line/col
/// of the start for human-readable diagnostics.
struct Span {
    uint32_t begin = 0;
    uint32_t end = 0;
    uint32_t line = 1;
    uint32_t col = 1;

    static Span join(const Span& a, const Span& b) {
        Span s = a;
        if (b.begin < s.begin) {
            s.begin = b.begin;
            s.line = b.line;
            s.col = b.col;
        }
        if (b.end > s.end) s.end = b.end;
        return s;
    }
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    Span span;
    std::string message;
};

class DiagnosticList {
public:
    void error(Span span, std::string msg) {
        items_.push_back({Severity::Error, span, std::move(msg)});
    }
    void warning(Span span, std::string msg) {
        items_.push_back({Severity::Warning, span, std::move(msg)});
    }
    [[nodiscard]] bool has_errors() const {
        for (const auto& d : items_)
            if (d.severity == Severity::Error) return true;
        return false;
    }
    [[nodiscard]] const std::vector<Diagnostic>& items() const { return items_; }
    [[nodiscard]] bool empty() const { return items_.empty(); }

    /// One "line:col: severity: message" entry per line.
    [[nodiscard]] std::string to_string() const {
        std::string out;
        for (const auto& d : items_) {
            out += std::to_string(d.span.line) + ":" + std::to_string(d.span.col) + ": ";
            out += d.severity == Severity::Error ? "error: " : "warning: ";
            out += d.message;
            out += '\n';
        }
        return out;
    }

private:
    std::vector<Diagnostic> items_;
};

/// Thrown by stages that cannot return a DiagnosticList (builder API misuse,
/// compile-time failures). Carries the same message format.
class ArkError : public std::runtime_error {
public:
    explicit ArkError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ark
