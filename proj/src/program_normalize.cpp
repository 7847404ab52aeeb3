#include "hflz/program.hpp"

#include <algorithm>
#include <set>

namespace hflz {

namespace {

class Lifter {
public:
    explicit Lifter(const Program& p) : p_(p)
    {
        for (const auto& d : p.defs) taken_.push_back(d.name);
    }

    Program run()
    {
        Program out;
        out.main = p_.main;
        for (const auto& d : p_.defs) {
            Definition nd = d;
            std::vector<std::string> scope = d.params;
            nd.body = lift(d.body, scope);
            out.defs.push_back(nd);
        }
        for (auto& d : lifted_) out.defs.push_back(std::move(d));
        return out;
    }

private:
    const Program& p_;
    std::vector<std::string> taken_;
    std::vector<Definition> lifted_;
    int counter_ = 0;

    // Variables of `scope` that occur free in t.
    static void captured(const Term& t, const std::vector<std::string>& scope, std::set<std::string>& bound,
                         std::vector<std::string>& out)
    {
        if (t.kind == Term::Kind::Var) {
            if (!bound.count(t.name) && std::find(scope.begin(), scope.end(), t.name) != scope.end() &&
                std::find(out.begin(), out.end(), t.name) == out.end())
                out.push_back(t.name);
            return;
        }
        if (t.kind == Term::Kind::Abs) {
            std::vector<std::string> added;
            for (const auto& x : t.params)
                if (bound.insert(x).second) added.push_back(x);
            captured(*t.lhs, scope, bound, out);
            for (const auto& x : added) bound.erase(x);
            return;
        }
        for (const auto& a : t.args) captured(*a, scope, bound, out);
        if (t.lhs) captured(*t.lhs, scope, bound, out);
        if (t.rhs) captured(*t.rhs, scope, bound, out);
    }

    TermPtr lift(const TermPtr& t, std::vector<std::string>& scope)
    {
        switch (t->kind) {
        case Term::Kind::Unit:
        case Term::Kind::Int:
        case Term::Kind::Var: return t;
        case Term::Kind::Abs: {
            std::vector<std::string> inner = scope;
            for (const auto& x : t->params) inner.push_back(x);
            TermPtr body = lift(t->lhs, inner);
            std::set<std::string> bound(t->params.begin(), t->params.end());
            std::vector<std::string> fv;
            captured(*body, scope, bound, fv);
            // keep the enclosing parameter order
            std::vector<std::string> ordered;
            for (const auto& x : scope)
                if (std::find(fv.begin(), fv.end(), x) != fv.end() &&
                    std::find(ordered.begin(), ordered.end(), x) == ordered.end())
                    ordered.push_back(x);
            std::string name;
            do {
                name = "lam_" + std::to_string(++counter_);
            } while (std::find(taken_.begin(), taken_.end(), name) != taken_.end());
            taken_.push_back(name);
            Definition d;
            d.name = name;
            d.params = ordered;
            for (const auto& x : t->params) d.params.push_back(x);
            d.body = body;
            d.pos = t->pos;
            lifted_.push_back(d);
            std::vector<TermPtr> args;
            for (const auto& x : ordered) args.push_back(term::var(x, t->pos));
            return term::apps(term::var(name, t->pos), args);
        }
        default: break;
        }
        auto copy = std::make_shared<Term>(*t);
        for (auto& a : copy->args) a = lift(a, scope);
        if (copy->lhs) copy->lhs = lift(copy->lhs, scope);
        if (copy->rhs) copy->rhs = lift(copy->rhs, scope);
        return copy;
    }
};

TermPtr replace_units(const TermPtr& t, const std::string& loop)
{
    switch (t->kind) {
    case Term::Kind::Unit: return term::app(term::var(loop, t->pos), term::unit(t->pos), t->pos);
    case Term::Kind::Int:
    case Term::Kind::Var: return t;
    default: break;
    }
    auto copy = std::make_shared<Term>(*t);
    if (copy->lhs) copy->lhs = replace_units(copy->lhs, loop);
    if (copy->rhs) copy->rhs = replace_units(copy->rhs, loop);
    return copy;
}

}  // namespace

Program normalize_program(const Program& p, NormalizeOptions opts)
{
    if (!p.find(p.main)) fail(ErrorKind::Semantic, "program has no definition for '" + p.main + "'");
    if (!opts.lift_lambdas) return p;
    return Lifter(p).run();
}

Program instrument_total(const Program& p, const std::string& dummy)
{
    auto evs = p.events();
    if (std::find(evs.begin(), evs.end(), dummy) != evs.end())
        fail(ErrorKind::Semantic, "event '" + dummy + "' already occurs in the program");
    std::vector<std::string> taken;
    for (const auto& d : p.defs) taken.push_back(d.name);
    std::string loop = fresh_name("Loop", taken);

    Program out;
    out.main = p.main;
    for (const auto& d : p.defs) {
        Definition nd = d;
        nd.body = replace_units(d.body, loop);
        if (d.name != p.main) nd.body = term::event(dummy, nd.body, d.pos);
        out.defs.push_back(nd);
    }
    Definition l;
    l.name = loop;
    l.params = {"x"};
    l.body = term::event(dummy, term::app(term::var(loop), term::var("x")));
    out.defs.push_back(l);
    return out;
}

}  // namespace hflz
