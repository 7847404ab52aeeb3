#include "hflz/opsem.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace hflz {

std::string mark(const std::string& f) { return f + "#"; }
bool is_marked(const std::string& f) { return !f.empty() && f.back() == '#'; }
std::string unmark(const std::string& f) { return is_marked(f) ? f.substr(0, f.size() - 1) : f; }

std::string trace_to_string(const Trace& t)
{
    if (t.empty()) return "<eps>";
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? " " : "") + t[i];
    return out;
}

std::string to_string(Verdict3 v)
{
    switch (v) {
    case Verdict3::Yes: return "yes";
    case Verdict3::No: return "no";
    case Verdict3::Unknown: return "unknown";
    }
    return "?";
}

namespace {

BigInt eval_int(const Term& t)
{
    switch (t.kind) {
    case Term::Kind::Int: return t.value;
    case Term::Kind::Arith: return eval_arith(t.arith, eval_int(*t.lhs), eval_int(*t.rhs));
    default: fail(ErrorKind::Semantic, "expected a closed integer expression, found " + to_string(t));
    }
}

TermPtr fold(const TermPtr& a)
{
    if (a->kind == Term::Kind::Arith) return term::integer(eval_int(*a), a->pos);
    return a;
}

TermPtr beta(const std::vector<std::string>& params, const TermPtr& body, const std::vector<TermPtr>& args,
             const std::string& what)
{
    if (args.size() < params.size())
        fail(ErrorKind::Semantic, "partial application of " + what + " in redex position");
    std::map<std::string, TermPtr> sub;
    for (std::size_t i = 0; i < params.size(); ++i) sub[params[i]] = fold(args[i]);
    TermPtr out = substitute(body, sub);
    for (std::size_t i = params.size(); i < args.size(); ++i) out = term::app(out, args[i]);
    return out;
}

}  // namespace

std::vector<Step> step(const Program& p, const TermPtr& t)
{
    switch (t->kind) {
    case Term::Kind::Unit: return {};
    case Term::Kind::Event: return {{t->name, t->lhs}};
    case Term::Kind::NonDet: return {{"", t->lhs}, {"", t->rhs}};
    case Term::Kind::If: {
        std::vector<BigInt> vals;
        for (const auto& a : t->args) vals.push_back(eval_int(*a));
        return {{"", eval_pred(t->pred, vals) ? t->lhs : t->rhs}};
    }
    case Term::Kind::Int:
    case Term::Kind::Arith: fail(ErrorKind::Semantic, "integer expression in execution position: " + to_string(*t));
    default: break;
    }
    TermPtr head;
    std::vector<TermPtr> args;
    spine(t, head, args);
    if (head->kind == Term::Kind::Var) {
        const Definition* d = p.find(unmark(head->name));
        if (!d) fail(ErrorKind::Semantic, "unknown function '" + head->name + "' during reduction");
        return {{"", beta(d->params, d->body, args, "'" + head->name + "'")}};
    }
    if (head->kind == Term::Kind::Abs) return {{"", beta(head->params, head->lhs, args, "an abstraction")}};
    fail(ErrorKind::Semantic, "cannot reduce " + to_string(*t));
}

TraceSet enumerate_traces_from(const Program& p, const TermPtr& start, int depth)
{
    TraceSet out;
    std::vector<std::pair<Trace, TermPtr>> level{{{}, start}};
    for (int d = 0; d < depth && !level.empty(); ++d) {
        std::vector<std::pair<Trace, TermPtr>> next;
        std::unordered_set<std::string> seen;
        for (const auto& [tr, t] : level) {
            out.finite.insert(tr);
            if (t->kind == Term::Kind::Unit) {
                out.maximal.insert(tr);
                continue;
            }
            for (const auto& s : step(p, t)) {
                Trace nt = tr;
                if (!s.label.empty()) nt.push_back(s.label);
                std::string key = trace_to_string(nt) + "|" + to_string(*s.term);
                if (seen.insert(key).second) next.emplace_back(std::move(nt), s.term);
            }
        }
        level = std::move(next);
    }
    for (const auto& [tr, t] : level) {
        out.finite.insert(tr);
        if (t->kind == Term::Kind::Unit) out.maximal.insert(tr);
        else out.frontier.emplace_back(tr, t);
    }
    return out;
}

TraceSet enumerate_traces(const Program& p, int depth)
{
    return enumerate_traces_from(p, term::var(p.main), depth);
}

ChoiceRun reduce_with_choice(const Program& p, const TermPtr& t, std::vector<Choice> pi, int max_steps)
{
    ChoiceRun run;
    run.term = t;
    std::size_t next_choice = 0;
    while (true) {
        if (run.term->kind == Term::Kind::Unit) {
            run.status = ChoiceRun::Status::NormalForm;
            break;
        }
        if (run.steps >= max_steps) {
            run.status = ChoiceRun::Status::StepBound;
            break;
        }
        if (run.term->kind == Term::Kind::NonDet) {
            if (next_choice >= pi.size()) {
                run.status = ChoiceRun::Status::Exhausted;
                break;
            }
            run.term = pi[next_choice++] == Choice::L ? run.term->lhs : run.term->rhs;
            ++run.steps;
            continue;
        }
        std::vector<Step> succ = step(p, run.term);
        if (!succ.empty() && !succ[0].label.empty()) run.events.push_back(succ[0].label);
        run.term = succ.at(0).term;
        ++run.steps;
    }
    run.remaining.assign(pi.begin() + static_cast<std::ptrdiff_t>(next_choice), pi.end());
    return run;
}

namespace {

TermPtr erase_marks(const TermPtr& t)
{
    switch (t->kind) {
    case Term::Kind::Var: return is_marked(t->name) ? term::var(unmark(t->name), t->pos) : t;
    case Term::Kind::Unit:
    case Term::Kind::Int: return t;
    default: break;
    }
    auto copy = std::make_shared<Term>(*t);
    for (auto& a : copy->args) a = erase_marks(a);
    if (copy->lhs) copy->lhs = erase_marks(copy->lhs);
    if (copy->rhs) copy->rhs = erase_marks(copy->rhs);
    return copy;
}

struct Callee {
    std::string name;
    TermPtr term;  // marks erased
    int steps;
};

// All g t such that `call` is followed by a marked g# t' within `budget` steps.
std::vector<Callee> recursive_calls(const Program& p, const TermPtr& call, int budget)
{
    std::vector<Callee> out;
    if (budget < 1) return out;
    TermPtr head;
    std::vector<TermPtr> args;
    spine(call, head, args);
    const Definition* d = p.find(head->name);
    if (!d) fail(ErrorKind::Semantic, "unknown function '" + head->name + "'");
    std::map<std::string, TermPtr> marks;
    for (const auto& g : p.defs)
        if (std::find(d->params.begin(), d->params.end(), g.name) == d->params.end())
            marks[g.name] = term::var(mark(g.name));
    TermPtr start = beta(d->params, substitute(d->body, marks), args, "'" + d->name + "'");

    std::vector<TermPtr> level{start};
    std::unordered_set<std::string> recorded;
    for (int k = 1; k <= budget && !level.empty(); ++k) {
        std::vector<TermPtr> next;
        std::unordered_set<std::string> seen;
        for (const auto& t : level) {
            TermPtr h;
            std::vector<TermPtr> as;
            spine(t, h, as);
            if (h->kind == Term::Kind::Var && is_marked(h->name)) {
                TermPtr erased = erase_marks(t);
                std::string key = std::to_string(k) + "|" + to_string(*erased);
                if (recorded.insert(key).second) out.push_back({unmark(h->name), erased, k});
            }
            if (k == budget) continue;
            for (const auto& s : step(p, t))
                if (seen.insert(to_string(*s.term)).second) next.push_back(s.term);
        }
        level = std::move(next);
    }
    return out;
}

}  // namespace

std::set<CallSequence> call_sequence_prefixes(const Program& p, int depth)
{
    std::set<CallSequence> out;
    struct State {
        CallSequence seq;
        TermPtr call;
        int used;
    };
    std::deque<State> queue;
    queue.push_back({{{p.main}, {}}, term::var(p.main), 0});
    while (!queue.empty()) {
        State s = std::move(queue.front());
        queue.pop_front();
        out.insert(s.seq);
        for (const auto& c : recursive_calls(p, s.call, depth - s.used)) {
            State n{s.seq, c.term, s.used + c.steps};
            n.seq.symbols.push_back(c.name);
            n.seq.steps.push_back(c.steps);
            queue.push_back(std::move(n));
        }
    }
    return out;
}

Verdict3 must_reach_bounded(const Program& p, const std::string& event, int depth)
{
    std::vector<TermPtr> level{term::var(p.main)};
    for (int d = 0; d < depth && !level.empty(); ++d) {
        std::vector<TermPtr> next;
        std::unordered_set<std::string> seen;
        for (const auto& t : level) {
            if (t->kind == Term::Kind::Unit) return Verdict3::No;
            for (const auto& s : step(p, t)) {
                if (s.label == event) continue;
                if (seen.insert(to_string(*s.term)).second) next.push_back(s.term);
            }
        }
        level = std::move(next);
    }
    for (const auto& t : level)
        if (t->kind == Term::Kind::Unit) return Verdict3::No;
    return level.empty() ? Verdict3::Yes : Verdict3::Unknown;
}

}  // namespace hflz
