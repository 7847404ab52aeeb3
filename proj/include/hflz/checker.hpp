#pragma once

#include "hflz/automata.hpp"
#include "hflz/formula.hpp"
#include "hflz/parity_game.hpp"

#include <map>
#include <set>
#include <string>

namespace hflz {

struct Verdict {
    enum class Kind { Valid, Invalid, Unknown };
    Kind kind = Kind::Unknown;
    std::string reason;  // "budget" or "non-ground" when unknown
};

std::string to_string(Verdict::Kind k);

struct DenotationalOptions {
    std::size_t max_entries = 200000;   // total table rows across all fixpoints
    std::size_t max_tabulation = 4096;  // rows needed to key one function-valued argument
};

// Set semantics of a closed formula of type prop. Integers are admitted as
// first-order data; tables are filled on demand and restricted to the states
// that can still matter, so finitely many rows are usually touched.
std::set<StateId> denotational_eval(const Lts& lts, const FormulaPtr& f,
                                    const std::map<std::string, std::set<StateId>>& props = {},
                                    const DenotationalOptions& opts = {});
std::set<StateId> denotational_check(const Lts& lts, const Hes& h, const DenotationalOptions& opts = {});

struct GroundGame {
    ParityGame game;
    bool complete = true;      // false when the node budget cut exploration short
    std::vector<int> frontier;  // unexpanded nodes when incomplete
    // Edges that call a closure. Priorities between a closure's creation and its call
    // do not count, so the game decides the formula only if none of these lies on a cycle.
    std::vector<std::pair<int, int>> invocations;
};

bool closure_call_on_cycle(const GroundGame& gg);

constexpr std::size_t kDefaultBudget = 1000000;

GroundGame ground_game(const Lts& lts, const Hes& h, std::size_t budget = kDefaultBudget);
Verdict eval_hflz(const Lts& lts, const Hes& h, std::size_t budget = kDefaultBudget);

struct CrossCheckReport {
    bool agree = true;
    bool denotational = false;  // init in the denotation
    Verdict game;
    std::string detail;  // smallest disagreeing subformula of main, if any
};

CrossCheckReport cross_check(const Lts& lts, const Hes& h, std::size_t budget = kDefaultBudget);

}  // namespace hflz
