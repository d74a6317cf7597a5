#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tsm {

/// 1-based, inclusive start, exclusive end column. Columns count code points.
struct SourceSpan {
    std::string file;
    int startLine = 0;
    int startCol = 0;
    int endLine = 0;
    int endCol = 0;

    [[nodiscard]] bool valid() const { return startLine > 0; }
    [[nodiscard]] std::string str() const;
    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    SourceSpan span;
    std::string message;
    std::optional<std::string> hint;

    [[nodiscard]] bool isError() const { return severity == Severity::Error; }
    [[nodiscard]] std::string str() const;
};

[[nodiscard]] bool hasErrors(const std::vector<Diagnostic>& diagnostics);
[[nodiscard]] std::size_t countErrors(const std::vector<Diagnostic>& diagnostics);

// Stable diagnostic codes.
namespace codes {
inline constexpr const char* kLex = "E001";
inline constexpr const char* kSyntax = "E002";
inline constexpr const char* kDuplicate = "E003";
inline constexpr const char* kUnknownType = "E004";
inline constexpr const char* kBadType = "E005";
inline constexpr const char* kInitCoverage = "E006";
inline constexpr const char* kTypeMismatch = "E007";
inline constexpr const char* kUnknownName = "E008";
inline constexpr const char* kDuplicateUpdate = "E009";
inline constexpr const char* kUnknownAction = "E010";
inline constexpr const char* kBadLiteral = "E011";
inline constexpr const char* kModelHeader = "E012";
inline constexpr const char* kUnusedAction = "W001";
inline constexpr const char* kMissingImpl = "W002";
} // namespace codes

} // namespace tsm
