#include "tsm/value.hpp"

#include "tsm/decls.hpp"
#include "tsm/diagnostic.hpp"

#include <algorithm>

namespace tsm {

TypeExpr TypeExpr::list(TypeExpr element) {
    TypeExpr t(Kind::List);
    t.element_ = std::make_shared<const TypeExpr>(std::move(element));
    return t;
}

std::string TypeExpr::str() const {
    switch (kind_) {
        case Kind::Bool: return "bool";
        case Kind::Int: return "int";
        case Kind::Id: return "id";
        case Kind::Enum:
        case Kind::Record: return name_;
        case Kind::List: return "list<" + element_->str() + ">";
    }
    return "?";
}

bool operator==(const TypeExpr& a, const TypeExpr& b) {
    if (a.kind_ != b.kind_ || a.name_ != b.name_) return false;
    if (a.kind_ != TypeExpr::Kind::List) return true;
    return *a.element_ == *b.element_;
}

const Value* RecordVal::field(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return &values[i];
    return nullptr;
}

bool operator==(const RecordVal& a, const RecordVal& b) {
    return a.typeName == b.typeName && a.names == b.names && a.values == b.values;
}

bool operator==(const ListVal& a, const ListVal& b) {
    return a.elementType == b.elementType && a.items == b.items;
}

void render(const Value& value, std::string& out) {
    struct Visitor {
        std::string& out;
        void operator()(bool b) const { out += b ? "true" : "false"; }
        void operator()(std::int64_t n) const { out += std::to_string(n); }
        void operator()(const SymVal& s) const {
            out += s.enumName;
            out += '.';
            out += s.member;
        }
        void operator()(const IdVal& i) const { out += i.isNone() ? "none" : i.token; }
        void operator()(const RecordVal& r) const {
            out += '{';
            for (std::size_t i = 0; i < r.names.size(); ++i) {
                if (i) out += ", ";
                out += r.names[i];
                out += ": ";
                render(r.values[i], out);
            }
            out += '}';
        }
        void operator()(const ListVal& l) const {
            out += '[';
            for (std::size_t i = 0; i < l.items.size(); ++i) {
                if (i) out += ", ";
                render(l.items[i], out);
            }
            out += ']';
        }
    };
    std::visit(Visitor{out}, value.storage());
}

std::string render(const Value& value) {
    std::string out;
    render(value, out);
    return out;
}

// --- declarations ----------------------------------------------------------

bool EnumDecl::hasMember(std::string_view member) const {
    return std::find(members.begin(), members.end(), member) != members.end();
}

const FieldDecl* RecordDecl::field(std::string_view name) const {
    for (const auto& f : fields)
        if (f.name == name) return &f;
    return nullptr;
}

const EnumDecl* TypeTable::findEnum(std::string_view name) const {
    for (const auto& e : enums)
        if (e.name == name) return &e;
    return nullptr;
}

const RecordDecl* TypeTable::findRecord(std::string_view name) const {
    for (const auto& r : records)
        if (r.name == name) return &r;
    return nullptr;
}

bool TypeTable::conforms(const Value& value, const TypeExpr& type) const {
    switch (type.kind()) {
        case TypeExpr::Kind::Bool: return value.isBool();
        case TypeExpr::Kind::Int: return value.isInt();
        case TypeExpr::Kind::Id: return value.isId();
        case TypeExpr::Kind::Enum: {
            if (!value.isSym()) return false;
            const auto& sym = value.asSym();
            const EnumDecl* decl = findEnum(type.name());
            return sym.enumName == type.name() && decl && decl->hasMember(sym.member);
        }
        case TypeExpr::Kind::Record: {
            if (!value.isRecord()) return false;
            const auto& rec = value.asRecord();
            const RecordDecl* decl = findRecord(type.name());
            if (!decl || rec.typeName != type.name() || rec.names.size() != decl->fields.size()) return false;
            for (std::size_t i = 0; i < decl->fields.size(); ++i) {
                if (rec.names[i] != decl->fields[i].name) return false;
                if (!conforms(rec.values[i], decl->fields[i].type)) return false;
            }
            return true;
        }
        case TypeExpr::Kind::List: {
            if (!value.isList()) return false;
            const auto& list = value.asList();
            if (!(list.elementType == type.element())) return false;
            return std::all_of(list.items.begin(), list.items.end(),
                               [&](const Value& v) { return conforms(v, type.element()); });
        }
    }
    return false;
}

// --- diagnostics -----------------------------------------------------------

std::string SourceSpan::str() const {
    std::string out = file.empty() ? "<input>" : file;
    out += ':' + std::to_string(startLine) + ':' + std::to_string(startCol);
    return out;
}

std::string Diagnostic::str() const {
    std::string out = span.str();
    out += severity == Severity::Error ? ": error " : ": warning ";
    out += code + ": " + message;
    if (hint) out += " (hint: " + *hint + ")";
    return out;
}

bool hasErrors(const std::vector<Diagnostic>& diagnostics) {
    return countErrors(diagnostics) > 0;
}

std::size_t countErrors(const std::vector<Diagnostic>& diagnostics) {
    return static_cast<std::size_t>(
        std::count_if(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) { return d.isError(); }));
}

} // namespace tsm
