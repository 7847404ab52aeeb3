#pragma once

#include "hflz/automata.hpp"
#include "hflz/formula.hpp"
#include "hflz/program.hpp"
#include "hflz/translate.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace hflz {

struct InterType;
using InterTypePtr = std::shared_ptr<const InterType>;

// q, or (Int | /\ (theta_i, m_i)) -> theta with the conjunction sorted and duplicate-free.
struct InterType {
    enum class Kind { State, Arrow };
    Kind kind = Kind::State;
    StateId state = 0;
    bool int_arg = false;
    std::vector<std::pair<InterTypePtr, int>> conj;
    InterTypePtr res;

    static InterTypePtr at(StateId q);
    static InterTypePtr int_arrow(InterTypePtr res);
    // Sorts and deduplicates the components.
    static InterTypePtr arrow(std::vector<std::pair<InterTypePtr, int>> conj, InterTypePtr res);
};

// Total order: states before arrows, states by id, arrows by argument then result.
int compare(const InterType& a, const InterType& b);
int compare(const std::pair<InterTypePtr, int>& a, const std::pair<InterTypePtr, int>& b);
bool equal(const InterType& a, const InterType& b);
std::string to_string(const InterType& t, const ParityAutomaton& a);
// Result state after all arguments.
StateId final_state(const InterType& t);

struct InterBinding {
    InterTypePtr type;
    int m = 0;
    int raised = 0;
};

struct InterTypeEnv {
    std::set<std::string> ints;
    std::map<std::string, std::vector<InterBinding>> bindings;

    void add_int(const std::string& x);
    void add(const std::string& x, InterTypePtr t, int m, int raised);
};

InterTypeEnv env_raise(const InterTypeEnv& gamma, int m);

struct TopBinding {
    std::string name;
    InterTypePtr type;
    int m = 0;
};
using TopLevelEnv = std::vector<TopBinding>;

bool operator<(const TopBinding& a, const TopBinding& b);
bool operator==(const TopBinding& a, const TopBinding& b);
// Sorted, duplicate-free copy.
TopLevelEnv sorted_env(TopLevelEnv xi);

// Name of the copy x_{theta,m} in the transformed program.
std::string mangle(const std::string& x, const InterType& t, int m, const ParityAutomaton& a);

// The term t' with gamma |- t : theta => t'. Throws when no derivation exists.
TermPtr transform_term(const InterTypeEnv& gamma, const TermPtr& t, const InterTypePtr& theta,
                       const ParityAutomaton& a);

struct InterOptions {
    // Every canonical type and every function copy instead of those reachable from main.
    bool canonical = false;
};

struct InterResult {
    TopLevelEnv xi;
    Program program;
    PriorityAssignment omega;
};

// The automaton is completed over its alphabet and the program's events first.
InterResult infer_intersection_transform(const Program& p, const ParityAutomaton& a, InterOptions opts = {});
// Largest subset of xi whose every binding is derivable from the subset.
TopLevelEnv prune_environment(const TopLevelEnv& xi, const Program& p, const ParityAutomaton& a);
// Call-sequence HES of the transformed program; valid on the one-state LTS
// iff no infinite trace of p is accepted by a.
Hes temporal_pipeline(const Program& p, const ParityAutomaton& a, InterOptions opts = {});

// Program events added to the alphabet, then every missing move sent to an odd sink.
ParityAutomaton prepare_automaton(const ParityAutomaton& a, const Program& p);

}  // namespace hflz
