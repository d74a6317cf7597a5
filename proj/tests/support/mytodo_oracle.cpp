#include "mytodo_oracle.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace oracle {

namespace {

enum Phase { N, S, A };
enum Status { NotDone, Done, Delayed };

struct Todo {
    std::string id;
    Status status;
    bool operator<(const Todo& o) const { return std::tie(id, status) < std::tie(o.id, o.status); }
    bool operator==(const Todo& o) const = default;
};

struct X {
    Phase s = N;
    std::vector<Todo> l;
    std::string last;  // "" is none
    bool operator<(const X& o) const { return std::tie(s, l, last) < std::tie(o.s, o.l, o.last); }
    bool operator==(const X& o) const = default;
};

std::string show(const X& x) {
    static const char* phase[] = {"Phase.N", "Phase.S", "Phase.A"};
    static const char* status[] = {"Status.notdone", "Status.done", "Status.delayed"};
    std::string out = std::string("{s: ") + phase[x.s] + ", l: [";
    for (std::size_t i = 0; i < x.l.size(); ++i) {
        if (i) out += ", ";
        out += "{id: " + x.l[i].id + ", status: " + status[x.l[i].status] + "}";
    }
    out += "], last: " + (x.last.empty() ? std::string("none") : x.last) + "}";
    return out;
}

bool listed(const X& x, const std::string& t) {
    return std::any_of(x.l.begin(), x.l.end(), [&](const Todo& d) { return d.id == t; });
}

int inprogress(const X& x) {
    return static_cast<int>(std::count_if(x.l.begin(), x.l.end(), [](const Todo& d) { return d.status != Done; }));
}

std::vector<Todo> without(const X& x, const std::string& t) {
    std::vector<Todo> out;
    for (const auto& d : x.l)
        if (d.id != t) out.push_back(d);
    return out;
}

struct Next {
    std::string rule;
    X x;
};

// f((e, t), (s, l, last)); cases in fixture order, first match wins.
std::optional<Next> f(char e, const std::string& t, const X& x) {
    const int n = static_cast<int>(x.l.size());
    if (e == 'A') {
        if (listed(x, t)) return std::nullopt;
        X y{S, x.l, t};
        y.l.push_back({t, NotDone});
        return Next{"add", y};
    }
    if (e == 'R') {
        if (!listed(x, t) || x.s == N) return std::nullopt;
        Status st = std::find_if(x.l.begin(), x.l.end(), [&](const Todo& d) { return d.id == t; })->status;
        if (st != Done && n > 1 && inprogress(x) == 1) return Next{"removeToAllDone", {A, without(x, t), t}};
        if (n > 1) return Next{"removeSome", {S, without(x, t), t}};
        if (n == 1) return Next{"removeLast", {N, without(x, t), t}};
        return std::nullopt;
    }
    // MarkDone
    if (!listed(x, t) || x.s != S) return std::nullopt;
    X y = x;
    y.last = t;
    for (auto& d : y.l)
        if (d.id == t) d.status = Done;
    if (inprogress(x) > 1) {
        y.s = S;
        return Next{"markSome", y};
    }
    if (inprogress(x) == 1) {
        y.s = A;
        return Next{"markLast", y};
    }
    return std::nullopt;
}

// Every list of length <= maxLen over ids x statuses.
void lists(const std::vector<std::string>& ids, std::size_t maxLen, std::vector<Todo>& cur,
           std::vector<std::vector<Todo>>& out) {
    out.push_back(cur);
    if (cur.size() == maxLen) return;
    for (const auto& id : ids)
        for (Status st : {NotDone, Done, Delayed}) {
            cur.push_back({id, st});
            lists(ids, maxLen, cur, out);
            cur.pop_back();
        }
}

} // namespace

TodoGraph exploreMyTodo(const std::vector<std::string>& ids, std::size_t maxListLen) {
    // The whole finitized space first, then the successor of every state in it.
    std::vector<std::vector<Todo>> allLists;
    std::vector<Todo> scratch;
    lists(ids, maxListLen, scratch, allLists);
    std::vector<std::string> lasts{""};
    lasts.insert(lasts.end(), ids.begin(), ids.end());

    std::map<X, std::vector<std::pair<std::string, Next>>> succ;
    for (Phase s : {N, S, A})
        for (const auto& l : allLists)
            for (const auto& last : lasts) {
                X x{s, l, last};
                auto& out = succ[x];
                for (char e : {'A', 'R', 'M'})
                    for (const auto& t : ids) {
                        auto next = f(e, t, x);
                        if (!next || next->x.l.size() > maxListLen) continue;
                        const char* name = e == 'A' ? "Add" : e == 'R' ? "Remove" : "MarkDone";
                        out.emplace_back(std::string(name) + "(" + t + ")", *next);
                    }
            }

    // Least fixpoint of reachability from X0.
    std::set<X> reach{X{N, {}, ""}};
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& x : std::set<X>(reach))
            for (const auto& [_, next] : succ.at(x)) grew |= reach.insert(next.x).second;
    }

    TodoGraph g;
    for (const auto& x : reach) {
        g.states.insert(show(x));
        for (const auto& [action, next] : succ.at(x))
            g.transitions.emplace(show(x), action, next.rule, show(next.x));
    }
    return g;
}

} // namespace oracle
