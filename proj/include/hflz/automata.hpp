#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hflz {

using StateId = int;
using Word = std::vector<std::string>;

struct Lts {
    std::vector<std::string> names;
    std::set<std::string> actions;
    // succ[q][a] = targets, sorted and unique
    std::vector<std::map<std::string, std::vector<StateId>>> succ;
    StateId init = 0;

    std::size_t size() const { return names.size(); }
    StateId add_state(const std::string& name);
    void add_transition(StateId src, const std::string& label, StateId dst);
    const std::vector<StateId>& successors(StateId q, const std::string& a) const;
    StateId find(const std::string& name) const;  // -1 if absent
    std::size_t transition_count() const;
    // true iff some path from init is labeled w
    bool has_path(const Word& w) const;
};

// One state, no transitions.
Lts trivial_lts();
Lts parse_lts(const std::string& text);
std::string print_lts(const Lts& l);

// Deterministic automaton of a prefix-closed language: every state accepts.
struct DetAutomaton {
    std::vector<std::string> names;
    std::set<std::string> alphabet;
    std::map<std::pair<StateId, std::string>, StateId> delta;
    StateId init = 0;

    std::size_t size() const { return names.size(); }
    StateId add_state(const std::string& name);
    StateId find(const std::string& name) const;
    // -1 when undefined
    StateId step(StateId q, const std::string& a) const;
    bool accepts(const Word& w) const;
};

DetAutomaton parse_det_automaton(const std::string& text);
std::string print_det_automaton(const DetAutomaton& a);
Lts det_automaton_to_lts(const DetAutomaton& a);
// Human-readable warnings: unreachable states, which a minimal automaton never has.
std::vector<std::string> validate_det_automaton(const DetAutomaton& a);

struct ParityAutomaton {
    std::vector<std::string> names;
    std::set<std::string> alphabet;
    std::vector<int> priority;
    std::map<std::pair<StateId, std::string>, std::set<StateId>> delta;
    StateId init = 0;

    std::size_t size() const { return names.size(); }
    StateId add_state(const std::string& name, int prio);
    StateId find(const std::string& name) const;
    const std::set<StateId>& successors(StateId q, const std::string& a) const;
    int max_priority() const;
    bool is_total() const;
};

ParityAutomaton parse_parity_automaton(const std::string& text);
std::string print_parity_automaton(const ParityAutomaton& a);
// Adds a priority-1 sink for every missing move; identity on total automata.
ParityAutomaton complete_parity(const ParityAutomaton& a);
// Accepts w iff erasing `event` from w leaves an infinite word accepted by a.
// Priorities shift up by two; the copies reached by `event` have priority 1.
ParityAutomaton ignore_event(const ParityAutomaton& a, const std::string& event);
// Some run over stem . cycle^omega satisfies the parity condition.
bool parity_accepts_lasso(const ParityAutomaton& a, const Word& stem, const Word& cycle);

}  // namespace hflz
