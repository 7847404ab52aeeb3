#pragma once

#include "hflz/program.hpp"

#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hflz {

// Empty label stands for a silent step.
struct Step {
    std::string label;
    TermPtr term;
};

using Trace = std::vector<std::string>;
std::string trace_to_string(const Trace& t);

// One-step successors of a closed term of type unit.
std::vector<Step> step(const Program& p, const TermPtr& t);

struct TraceSet {
    std::set<Trace> finite;
    std::set<Trace> maximal;  // paths that reached ()
    std::vector<std::pair<Trace, TermPtr>> frontier;
};

// Breadth-first exploration from main for `depth` reduction steps.
TraceSet enumerate_traces(const Program& p, int depth);
TraceSet enumerate_traces_from(const Program& p, const TermPtr& start, int depth);

enum class Choice { L, R };

struct ChoiceRun {
    enum class Status { NormalForm, Exhausted, StepBound };
    Status status = Status::NormalForm;
    Trace events;
    TermPtr term;
    std::vector<Choice> remaining;
    int steps = 0;
};

ChoiceRun reduce_with_choice(const Program& p, const TermPtr& t, std::vector<Choice> pi, int max_steps = 10000);

struct CallSequence {
    std::vector<std::string> symbols;
    std::vector<int> steps;  // reduction steps between consecutive calls

    bool operator<(const CallSequence& o) const
    {
        return std::tie(symbols, steps) < std::tie(o.symbols, o.steps);
    }
    bool operator==(const CallSequence& o) const { return symbols == o.symbols && steps == o.steps; }
};

// Prefixes of call sequences reachable within `depth` total reduction steps.
std::set<CallSequence> call_sequence_prefixes(const Program& p, int depth);

enum class Verdict3 { Yes, No, Unknown };
std::string to_string(Verdict3 v);

Verdict3 must_reach_bounded(const Program& p, const std::string& event, int depth);

// Marked copies used by the recursive-call relation.
std::string mark(const std::string& f);
bool is_marked(const std::string& f);
std::string unmark(const std::string& f);

}  // namespace hflz
