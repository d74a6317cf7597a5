#pragma once

#include "tsm/frontend.hpp"
#include "tsm/model.hpp"

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testing {

inline std::string fixturePath(const std::string& name) { return std::string(TSM_FIXTURES) + "/" + name; }

inline std::string readText(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Parses source that is expected to be valid.
inline tsm::Model model(const std::string& source) {
    auto r = tsm::parse(source);
    if (!r.ok()) {
        std::string all;
        for (const auto& d : r.diagnostics) all += d.str() + "\n";
        throw std::runtime_error("model does not parse:\n" + all + source);
    }
    return std::move(*r.model);
}

inline tsm::Model fixture(const std::string& name) { return model(readText(fixturePath(name))); }

inline std::shared_ptr<const tsm::Model> shared(tsm::Model m) {
    return std::make_shared<const tsm::Model>(std::move(m));
}

inline tsm::Value parseVal(const tsm::Model& m, const std::string& text, const tsm::TypeExpr& type) {
    std::string error;
    auto v = tsm::parseValue(text, type, m.types, &error);
    if (!v) throw std::runtime_error("bad value " + text + ": " + error);
    return *v;
}

inline tsm::ActionInstance act(const tsm::Model& m, const std::string& name, const std::vector<std::string>& args = {}) {
    const auto* sig = m.findAction(name);
    if (!sig) throw std::runtime_error("no action " + name);
    tsm::ActionInstance a{name, {}};
    for (std::size_t i = 0; i < args.size(); ++i) a.args.push_back(parseVal(m, args[i], sig->params[i].type));
    return a;
}

/// A state from `var: value` canonical text per variable, in declaration order.
inline tsm::StateEnv state(const tsm::Model& m, const std::vector<std::string>& values) {
    tsm::StateEnv s;
    for (std::size_t i = 0; i < m.stateVars.size(); ++i) s.set(m.stateVars[i].name, parseVal(m, values[i], m.stateVars[i].type));
    return s;
}

} // namespace testing
