#include "tsm/model.hpp"

#include "tsm/frontend.hpp"

#include <stdexcept>

namespace tsm {

const VarDecl* Model::findVar(std::string_view name) const {
    for (const auto& v : stateVars)
        if (v.name == name) return &v;
    return nullptr;
}

const ActionSig* Model::findAction(std::string_view name) const {
    for (const auto& a : actions)
        if (a.name == name) return &a;
    return nullptr;
}

const Rule* Model::findRule(std::string_view label) const {
    for (const auto& r : rules)
        if (r.label == label) return &r;
    return nullptr;
}

std::string Model::fingerprint() const {
    // FNV-1a over the canonical text.
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : formatModel(*this)) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, hash >>= 4) out[static_cast<std::size_t>(i)] = kHex[hash & 0xF];
    return out;
}

const Value* Env::find(std::string_view name) const {
    for (const auto& [key, value] : bindings_)
        if (key == name) return &value;
    return nullptr;
}

const Value& Env::at(std::string_view name) const {
    if (const Value* v = find(name)) return *v;
    throw std::out_of_range("no binding for " + std::string(name));
}

void Env::set(std::string_view name, Value value) {
    for (auto& [key, slot] : bindings_) {
        if (key == name) {
            slot = std::move(value);
            return;
        }
    }
    bindings_.emplace_back(std::string(name), std::move(value));
}

std::string Env::canonical() const {
    std::string out = "{";
    for (std::size_t i = 0; i < bindings_.size(); ++i) {
        if (i) out += ", ";
        out += bindings_[i].first;
        out += ": ";
        render(bindings_[i].second, out);
    }
    out += '}';
    return out;
}

std::string ActionInstance::canonical() const {
    if (args.empty()) return name;
    std::string out = name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        render(args[i], out);
    }
    out += ')';
    return out;
}

} // namespace tsm
