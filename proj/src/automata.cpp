#include "hflz/automata.hpp"
#include "hflz/common.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace hflz {

namespace {

struct Line {
    int number;
    std::vector<std::string> words;
};

std::vector<Line> split_lines(const std::string& text)
{
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    for (int n = 1; std::getline(in, raw); ++n) {
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        std::istringstream ws(raw);
        Line l{n, {}};
        for (std::string w; ws >> w;) l.words.push_back(w);
        if (!l.words.empty()) out.push_back(std::move(l));
    }
    return out;
}

[[noreturn]] void bad(const Line& l, const std::string& msg)
{
    fail(ErrorKind::Syntax, "line " + std::to_string(l.number) + ": " + msg);
}

int parse_priority(const Line& l, const std::string& s)
{
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size() || v < 0) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        bad(l, "invalid priority '" + s + "'");
    }
}

// Shared reader for the three line formats. `on_state` receives the words after the id.
template <typename A, typename OnState, typename OnTrans>
void read_automaton(const std::string& text, A& a, bool& saw_init, OnState on_state, OnTrans on_trans)
{
    std::vector<Line> lines = split_lines(text);
    for (const auto& l : lines) {
        if (l.words[0] == "state") {
            if (l.words.size() < 2) bad(l, "state needs an identifier");
            if (a.find(l.words[1]) >= 0) bad(l, "duplicate state '" + l.words[1] + "'");
            std::vector<std::string> rest(l.words.begin() + 2, l.words.end());
            bool is_init = !rest.empty() && rest.back() == "init";
            if (is_init) rest.pop_back();
            StateId q = on_state(l, l.words[1], rest);
            if (is_init) {
                if (saw_init) bad(l, "more than one initial state");
                saw_init = true;
                a.init = q;
            }
        } else if (l.words[0] == "trans") {
            if (l.words.size() < 4) bad(l, "trans needs a source, a label and a target");
            std::vector<StateId> ids;
            for (std::size_t i = 1; i < l.words.size(); ++i) {
                if (i == 2) continue;
                StateId q = a.find(l.words[i]);
                if (q < 0) bad(l, "unknown state '" + l.words[i] + "'");
                ids.push_back(q);
            }
            on_trans(l, ids[0], l.words[2], std::vector<StateId>(ids.begin() + 1, ids.end()));
        } else if (l.words[0] == "alphabet") {
            for (std::size_t i = 1; i < l.words.size(); ++i) a.alphabet.insert(l.words[i]);
        } else {
            bad(l, "unknown directive '" + l.words[0] + "'");
        }
    }
    if (a.size() == 0) fail(ErrorKind::Syntax, "no states declared");
    if (!saw_init) fail(ErrorKind::Syntax, "no initial state declared");
}

template <typename A>
StateId find_name(const A& a, const std::string& name)
{
    auto it = std::find(a.names.begin(), a.names.end(), name);
    return it == a.names.end() ? -1 : static_cast<StateId>(it - a.names.begin());
}

}  // namespace

StateId Lts::add_state(const std::string& name)
{
    names.push_back(name);
    succ.emplace_back();
    return static_cast<StateId>(names.size()) - 1;
}

void Lts::add_transition(StateId src, const std::string& label, StateId dst)
{
    actions.insert(label);
    auto& v = succ.at(src)[label];
    auto it = std::lower_bound(v.begin(), v.end(), dst);
    if (it == v.end() || *it != dst) v.insert(it, dst);
}

const std::vector<StateId>& Lts::successors(StateId q, const std::string& a) const
{
    static const std::vector<StateId> none;
    auto it = succ.at(q).find(a);
    return it == succ[q].end() ? none : it->second;
}

StateId Lts::find(const std::string& name) const { return find_name(*this, name); }

std::size_t Lts::transition_count() const
{
    std::size_t n = 0;
    for (const auto& m : succ)
        for (const auto& [a, v] : m) n += v.size();
    return n;
}

bool Lts::has_path(const Word& w) const
{
    std::set<StateId> cur{init};
    for (const auto& a : w) {
        std::set<StateId> next;
        for (StateId q : cur)
            for (StateId r : successors(q, a)) next.insert(r);
        cur.swap(next);
        if (cur.empty()) return false;
    }
    return true;
}

Lts trivial_lts()
{
    Lts l;
    l.add_state("q0");
    return l;
}

Lts parse_lts(const std::string& text)
{
    Lts l;
    struct Shim {
        Lts& l;
        std::set<std::string> alphabet;
        StateId init = 0;
        std::size_t size() const { return l.size(); }
        StateId find(const std::string& n) const { return l.find(n); }
    } shim{l, {}};
    bool saw_init = false;
    read_automaton(
        text, shim, saw_init,
        [&](const Line& line, const std::string& id, const std::vector<std::string>& rest) {
            if (!rest.empty()) bad(line, "unexpected '" + rest[0] + "' after state");
            return l.add_state(id);
        },
        [&](const Line& line, StateId src, const std::string& label, const std::vector<StateId>& dst) {
            if (dst.size() != 1) bad(line, "LTS transitions have exactly one target");
            l.add_transition(src, label, dst[0]);
        });
    l.init = shim.init;
    l.actions.insert(shim.alphabet.begin(), shim.alphabet.end());
    return l;
}

std::string print_lts(const Lts& l)
{
    std::ostringstream os;
    for (std::size_t q = 0; q < l.size(); ++q)
        os << "state " << l.names[q] << (static_cast<StateId>(q) == l.init ? " init" : "") << '\n';
    for (std::size_t q = 0; q < l.size(); ++q)
        for (const auto& [a, v] : l.succ[q])
            for (StateId r : v) os << "trans " << l.names[q] << ' ' << a << ' ' << l.names[r] << '\n';
    return os.str();
}

StateId DetAutomaton::add_state(const std::string& name)
{
    names.push_back(name);
    return static_cast<StateId>(names.size()) - 1;
}

StateId DetAutomaton::find(const std::string& name) const { return find_name(*this, name); }

StateId DetAutomaton::step(StateId q, const std::string& a) const
{
    auto it = delta.find({q, a});
    return it == delta.end() ? -1 : it->second;
}

bool DetAutomaton::accepts(const Word& w) const
{
    StateId q = init;
    for (const auto& a : w)
        if ((q = step(q, a)) < 0) return false;
    return true;
}

DetAutomaton parse_det_automaton(const std::string& text)
{
    DetAutomaton d;
    bool saw_init = false;
    read_automaton(
        text, d, saw_init,
        [&](const Line& line, const std::string& id, const std::vector<std::string>& rest) {
            if (!rest.empty()) bad(line, "unexpected '" + rest[0] + "' after state");
            return d.add_state(id);
        },
        [&](const Line& line, StateId src, const std::string& label, const std::vector<StateId>& dst) {
            if (dst.size() != 1) bad(line, "deterministic transitions have exactly one target");
            auto [it, fresh] = d.delta.emplace(std::make_pair(src, label), dst[0]);
            if (!fresh && it->second != dst[0]) bad(line, "nondeterministic move on '" + label + "'");
            d.alphabet.insert(label);
        });
    return d;
}

std::string print_det_automaton(const DetAutomaton& a)
{
    std::ostringstream os;
    os << "alphabet";
    for (const auto& x : a.alphabet) os << ' ' << x;
    os << '\n';
    for (std::size_t q = 0; q < a.size(); ++q)
        os << "state " << a.names[q] << (static_cast<StateId>(q) == a.init ? " init" : "") << '\n';
    for (const auto& [k, r] : a.delta) os << "trans " << a.names[k.first] << ' ' << k.second << ' ' << a.names[r] << '\n';
    return os.str();
}

Lts det_automaton_to_lts(const DetAutomaton& a)
{
    Lts l;
    for (const auto& n : a.names) l.add_state(n);
    l.init = a.init;
    l.actions = a.alphabet;
    for (const auto& [k, r] : a.delta) l.add_transition(k.first, k.second, r);
    return l;
}

std::vector<std::string> validate_det_automaton(const DetAutomaton& a)
{
    std::vector<bool> seen(a.size(), false);
    std::deque<StateId> work{a.init};
    seen[a.init] = true;
    while (!work.empty()) {
        StateId q = work.front();
        work.pop_front();
        for (const auto& x : a.alphabet) {
            StateId r = a.step(q, x);
            if (r >= 0 && !seen[r]) {
                seen[r] = true;
                work.push_back(r);
            }
        }
    }
    std::vector<std::string> warnings;
    for (std::size_t q = 0; q < a.size(); ++q)
        if (!seen[q]) warnings.push_back("state '" + a.names[q] + "' is unreachable");
    return warnings;
}

StateId ParityAutomaton::add_state(const std::string& name, int prio)
{
    names.push_back(name);
    priority.push_back(prio);
    return static_cast<StateId>(names.size()) - 1;
}

StateId ParityAutomaton::find(const std::string& name) const { return find_name(*this, name); }

const std::set<StateId>& ParityAutomaton::successors(StateId q, const std::string& a) const
{
    static const std::set<StateId> none;
    auto it = delta.find({q, a});
    return it == delta.end() ? none : it->second;
}

int ParityAutomaton::max_priority() const
{
    return priority.empty() ? 0 : *std::max_element(priority.begin(), priority.end());
}

bool ParityAutomaton::is_total() const
{
    for (std::size_t q = 0; q < size(); ++q)
        for (const auto& x : alphabet)
            if (successors(static_cast<StateId>(q), x).empty()) return false;
    return true;
}

ParityAutomaton parse_parity_automaton(const std::string& text)
{
    ParityAutomaton p;
    bool saw_init = false;
    read_automaton(
        text, p, saw_init,
        [&](const Line& line, const std::string& id, const std::vector<std::string>& rest) {
            if (rest.size() != 2 || rest[0] != "prio") bad(line, "expected 'prio <n>' after state");
            return p.add_state(id, parse_priority(line, rest[1]));
        },
        [&](const Line&, StateId src, const std::string& label, const std::vector<StateId>& dst) {
            p.delta[{src, label}].insert(dst.begin(), dst.end());
            p.alphabet.insert(label);
        });
    return p;
}

std::string print_parity_automaton(const ParityAutomaton& a)
{
    std::ostringstream os;
    os << "alphabet";
    for (const auto& x : a.alphabet) os << ' ' << x;
    os << '\n';
    for (std::size_t q = 0; q < a.size(); ++q)
        os << "state " << a.names[q] << " prio " << a.priority[q]
           << (static_cast<StateId>(q) == a.init ? " init" : "") << '\n';
    for (const auto& [k, rs] : a.delta) {
        if (rs.empty()) continue;
        os << "trans " << a.names[k.first] << ' ' << k.second;
        for (StateId r : rs) os << ' ' << a.names[r];
        os << '\n';
    }
    return os.str();
}

ParityAutomaton complete_parity(const ParityAutomaton& a)
{
    if (a.is_total()) return a;
    ParityAutomaton out = a;
    std::string name = "q_dead";
    for (int i = 1; out.find(name) >= 0; ++i) name = "q_dead" + std::to_string(i);
    StateId dead = out.add_state(name, 1);
    for (std::size_t q = 0; q < out.size(); ++q)
        for (const auto& x : out.alphabet) {
            auto& rs = out.delta[{static_cast<StateId>(q), x}];
            if (rs.empty()) rs.insert(dead);
        }
    return out;
}

ParityAutomaton ignore_event(const ParityAutomaton& a, const std::string& event)
{
    if (a.alphabet.count(event)) fail(ErrorKind::Semantic, "event '" + event + "' is already in the alphabet");
    ParityAutomaton out;
    out.alphabet = a.alphabet;
    out.alphabet.insert(event);
    const auto n = static_cast<StateId>(a.size());
    for (StateId q = 0; q < n; ++q) out.add_state(a.names[q], a.priority[q] + 2);
    for (StateId q = 0; q < n; ++q) {
        std::string name = a.names[q] + "_skip";
        for (int i = 1; out.find(name) >= 0; ++i) name = a.names[q] + "_skip" + std::to_string(i);
        out.add_state(name, 1);
    }
    for (const auto& [key, targets] : a.delta) {
        out.delta[key] = targets;
        out.delta[{key.first + n, key.second}] = targets;
    }
    for (StateId q = 0; q < n; ++q) {
        out.delta[{q, event}] = {q + n};
        out.delta[{q + n, event}] = {q + n};
    }
    out.init = a.init;
    return out;
}

bool parity_accepts_lasso(const ParityAutomaton& a, const Word& stem, const Word& cycle)
{
    if (cycle.empty()) fail(ErrorKind::Usage, "lasso cycle must be nonempty");
    const int len = static_cast<int>(stem.size() + cycle.size());
    const int loop_start = static_cast<int>(stem.size());
    auto letter = [&](int i) -> const std::string& { return i < loop_start ? stem[i] : cycle[i - loop_start]; };
    auto next_pos = [&](int i) { return i + 1 == len ? loop_start : i + 1; };
    auto node = [&](StateId q, int i) { return q * len + i; };
    const int n = static_cast<int>(a.size()) * len;

    std::vector<std::vector<int>> edges(n);
    for (std::size_t q = 0; q < a.size(); ++q)
        for (int i = 0; i < len; ++i)
            for (StateId r : a.successors(static_cast<StateId>(q), letter(i)))
                edges[node(static_cast<StateId>(q), i)].push_back(node(r, next_pos(i)));

    std::vector<bool> reach(n, false);
    std::deque<int> work{node(a.init, 0)};
    reach[work.front()] = true;
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        for (int w : edges[v])
            if (!reach[w]) {
                reach[w] = true;
                work.push_back(w);
            }
    }

    auto prio = [&](int v) { return a.priority[v / len]; };
    // v lies on a cycle through nodes of priority at most prio(v)
    auto on_bounded_cycle = [&](int v) {
        int bound = prio(v);
        std::vector<bool> seen(n, false);
        std::deque<int> q;
        for (int w : edges[v])
            if (prio(w) <= bound && !seen[w]) {
                seen[w] = true;
                q.push_back(w);
            }
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            if (u == v) return true;
            for (int w : edges[u])
                if (prio(w) <= bound && !seen[w]) {
                    seen[w] = true;
                    q.push_back(w);
                }
        }
        return false;
    };
    for (int v = 0; v < n; ++v)
        if (reach[v] && prio(v) % 2 == 0 && on_bounded_cycle(v)) return true;
    return false;
}

}  // namespace hflz
