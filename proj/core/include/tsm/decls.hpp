#pragma once

#include "tsm/diagnostic.hpp"
#include "tsm/value.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace tsm {

struct EnumDecl {
    std::string name;
    std::vector<std::string> members;
    SourceSpan span;

    [[nodiscard]] bool hasMember(std::string_view member) const;
};

struct FieldDecl {
    std::string name;
    TypeExpr type;
    SourceSpan span;
};

struct RecordDecl {
    std::string name;
    std::vector<FieldDecl> fields;
    SourceSpan span;

    [[nodiscard]] const FieldDecl* field(std::string_view name) const;
};

/// Enum and record declarations of one model; the type universe that
/// expressions and values are checked against.
struct TypeTable {
    std::vector<EnumDecl> enums;
    std::vector<RecordDecl> records;

    [[nodiscard]] const EnumDecl* findEnum(std::string_view name) const;
    [[nodiscard]] const RecordDecl* findRecord(std::string_view name) const;

    /// True iff `value` inhabits `type` under these declarations.
    [[nodiscard]] bool conforms(const Value& value, const TypeExpr& type) const;
};

} // namespace tsm
