#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tsm {

/// Static type of a state variable, action parameter, record field or
/// expression. Record types carry only their name; field layouts live in the
/// owning model's declarations.
class TypeExpr {
public:
    enum class Kind { Bool, Int, Enum, Id, Record, List };

    static TypeExpr boolean() { return TypeExpr(Kind::Bool); }
    static TypeExpr integer() { return TypeExpr(Kind::Int); }
    static TypeExpr id() { return TypeExpr(Kind::Id); }
    static TypeExpr enumeration(std::string name) { return TypeExpr(Kind::Enum, std::move(name)); }
    static TypeExpr record(std::string name) { return TypeExpr(Kind::Record, std::move(name)); }
    static TypeExpr list(TypeExpr element);

    /// A named type whose kind (enum or record) is not yet resolved.
    static TypeExpr named(std::string name) { return TypeExpr(Kind::Record, std::move(name), true); }

    TypeExpr() = default;

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const TypeExpr& element() const { return *element_; }
    [[nodiscard]] bool unresolved() const { return unresolved_; }
    [[nodiscard]] bool isScalar() const {
        return kind_ == Kind::Bool || kind_ == Kind::Int || kind_ == Kind::Enum || kind_ == Kind::Id;
    }

    [[nodiscard]] std::string str() const;

    friend bool operator==(const TypeExpr& a, const TypeExpr& b);

private:
    explicit TypeExpr(Kind kind, std::string name = {}, bool unresolved = false)
        : kind_(kind), name_(std::move(name)), unresolved_(unresolved) {}

    Kind kind_ = Kind::Bool;
    std::string name_;
    std::shared_ptr<const TypeExpr> element_;
    bool unresolved_ = false;
};

class Value;

struct SymVal {
    std::string enumName;
    std::string member;
    friend bool operator==(const SymVal&, const SymVal&) = default;
};

/// Opaque identifier; an empty token is the distinguished `none`.
struct IdVal {
    std::string token;
    [[nodiscard]] bool isNone() const { return token.empty(); }
    friend bool operator==(const IdVal&, const IdVal&) = default;
};

struct RecordVal {
    std::string typeName;
    std::vector<std::string> names;
    std::vector<Value> values;

    [[nodiscard]] const Value* field(std::string_view name) const;
    friend bool operator==(const RecordVal&, const RecordVal&);
};

struct ListVal {
    TypeExpr elementType;
    std::vector<Value> items;
    friend bool operator==(const ListVal&, const ListVal&);
};

/// Runtime datum. Values are immutable once built and compare structurally.
class Value {
public:
    using Storage = std::variant<bool, std::int64_t, SymVal, IdVal, RecordVal, ListVal>;

    Value() : data_(false) {}
    Value(bool b) : data_(b) {}  // NOLINT(google-explicit-constructor)
    Value(std::int64_t n) : data_(n) {}  // NOLINT(google-explicit-constructor)
    Value(SymVal s) : data_(std::move(s)) {}  // NOLINT(google-explicit-constructor)
    Value(IdVal i) : data_(std::move(i)) {}  // NOLINT(google-explicit-constructor)
    Value(RecordVal r) : data_(std::move(r)) {}  // NOLINT(google-explicit-constructor)
    Value(ListVal l) : data_(std::move(l)) {}  // NOLINT(google-explicit-constructor)

    static Value sym(std::string enumName, std::string member) {
        return SymVal{std::move(enumName), std::move(member)};
    }
    static Value ident(std::string token) { return IdVal{std::move(token)}; }
    static Value none() { return IdVal{}; }

    [[nodiscard]] bool isBool() const { return std::holds_alternative<bool>(data_); }
    [[nodiscard]] bool isInt() const { return std::holds_alternative<std::int64_t>(data_); }
    [[nodiscard]] bool isSym() const { return std::holds_alternative<SymVal>(data_); }
    [[nodiscard]] bool isId() const { return std::holds_alternative<IdVal>(data_); }
    [[nodiscard]] bool isRecord() const { return std::holds_alternative<RecordVal>(data_); }
    [[nodiscard]] bool isList() const { return std::holds_alternative<ListVal>(data_); }

    [[nodiscard]] bool asBool() const { return std::get<bool>(data_); }
    [[nodiscard]] std::int64_t asInt() const { return std::get<std::int64_t>(data_); }
    [[nodiscard]] const SymVal& asSym() const { return std::get<SymVal>(data_); }
    [[nodiscard]] const IdVal& asId() const { return std::get<IdVal>(data_); }
    [[nodiscard]] const RecordVal& asRecord() const { return std::get<RecordVal>(data_); }
    [[nodiscard]] const ListVal& asList() const { return std::get<ListVal>(data_); }

    [[nodiscard]] const Storage& storage() const { return data_; }

    friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

private:
    Storage data_;
};

/// Canonical rendering: `Enum.Member`, bare id tokens or `none`,
/// `{field: value, ...}` in declaration order, `[v1, v2, ...]`.
std::string render(const Value& value);
void render(const Value& value, std::string& out);

} // namespace tsm
