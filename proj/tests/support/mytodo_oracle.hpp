#pragma once

// Brute-force model of myTodo written straight from the f table, with its own
// state type and renderer. Shares nothing with the engine except the output
// text format, which is what the comparison is about.

#include <cstddef>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

struct TodoGraph {
    std::set<std::string> states;
    // (from, action, rule, to), all rendered
    std::set<std::tuple<std::string, std::string, std::string, std::string>> transitions;
};

TodoGraph exploreMyTodo(const std::vector<std::string>& ids, std::size_t maxListLen);

} // namespace oracle
