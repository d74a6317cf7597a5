#pragma once

#include "tsm/diagnostic.hpp"
#include "tsm/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsm {

struct ParseResult {
    std::optional<Model> model;  // present iff there are no errors
    std::vector<Diagnostic> diagnostics;  // errors, or warnings on success

    [[nodiscard]] bool ok() const { return model.has_value(); }
};

/// Parses and checks one `.tsm` model. `file` only labels diagnostic spans.
[[nodiscard]] ParseResult parse(std::string_view source, std::string_view file = "<input>");

/// Reads and parses a file; an unreadable file yields a single error.
[[nodiscard]] ParseResult parseFile(const std::string& path);

/// Deterministic canonical text. `parse(formatModel(m))` is structurally
/// equal to `m`.
[[nodiscard]] std::string formatModel(const Model& model);

/// Structural equality ignoring source spans.
[[nodiscard]] bool sameModel(const Model& a, const Model& b);

/// Parses a canonical value rendering against a declared type, e.g.
/// `Color.Red`, `t1`, `none` or `[{id: t1, status: Status.done}]`. Bare enum
/// members are accepted when the type is an enum.
[[nodiscard]] std::optional<Value> parseValue(std::string_view text, const TypeExpr& type,
                                              const TypeTable& types, std::string* error = nullptr);

/// Keywords that cannot be used as identifiers.
[[nodiscard]] bool isKeyword(std::string_view word);

} // namespace tsm
