#include "hflz/intertype.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace hflz {

InterTypePtr InterType::at(StateId q)
{
    auto t = std::make_shared<InterType>();
    t->state = q;
    return t;
}

InterTypePtr InterType::int_arrow(InterTypePtr res)
{
    auto t = std::make_shared<InterType>();
    t->kind = Kind::Arrow;
    t->int_arg = true;
    t->res = std::move(res);
    return t;
}

InterTypePtr InterType::arrow(std::vector<std::pair<InterTypePtr, int>> conj, InterTypePtr res)
{
    std::sort(conj.begin(), conj.end(), [](const auto& x, const auto& y) { return compare(x, y) < 0; });
    conj.erase(std::unique(conj.begin(), conj.end(), [](const auto& x, const auto& y) { return compare(x, y) == 0; }),
               conj.end());
    auto t = std::make_shared<InterType>();
    t->kind = Kind::Arrow;
    t->conj = std::move(conj);
    t->res = std::move(res);
    return t;
}

int compare(const InterType& a, const InterType& b)
{
    if (a.kind != b.kind) return a.kind == InterType::Kind::State ? -1 : 1;
    if (a.kind == InterType::Kind::State) return a.state < b.state ? -1 : a.state > b.state ? 1 : 0;
    if (a.int_arg != b.int_arg) return a.int_arg ? -1 : 1;
    for (std::size_t i = 0; i < a.conj.size() && i < b.conj.size(); ++i)
        if (int c = compare(a.conj[i], b.conj[i])) return c;
    if (a.conj.size() != b.conj.size()) return a.conj.size() < b.conj.size() ? -1 : 1;
    return compare(*a.res, *b.res);
}

int compare(const std::pair<InterTypePtr, int>& a, const std::pair<InterTypePtr, int>& b)
{
    if (int c = compare(*a.first, *b.first)) return c;
    return a.second < b.second ? -1 : a.second > b.second ? 1 : 0;
}

bool equal(const InterType& a, const InterType& b) { return compare(a, b) == 0; }

StateId final_state(const InterType& t) { return t.kind == InterType::Kind::State ? t.state : final_state(*t.res); }

std::string to_string(const InterType& t, const ParityAutomaton& a)
{
    if (t.kind == InterType::Kind::State) return a.names.at(t.state);
    std::string arg;
    if (t.int_arg) {
        arg = "int";
    } else if (t.conj.empty()) {
        arg = "top";
    } else {
        for (std::size_t i = 0; i < t.conj.size(); ++i) {
            if (i) arg += " /\\ ";
            arg += "(" + to_string(*t.conj[i].first, a) + ", " + std::to_string(t.conj[i].second) + ")";
        }
    }
    std::string res = to_string(*t.res, a);
    if (t.res->kind == InterType::Kind::Arrow) res = "(" + res + ")";
    return arg + " -> " + res;
}

void InterTypeEnv::add_int(const std::string& x)
{
    if (bindings.count(x)) fail(ErrorKind::Type, "'" + x + "' is bound both as int and as a function");
    ints.insert(x);
}

void InterTypeEnv::add(const std::string& x, InterTypePtr t, int m, int raised)
{
    if (ints.count(x)) fail(ErrorKind::Type, "'" + x + "' is bound both as int and as a function");
    bindings[x].push_back({std::move(t), m, raised});
}

InterTypeEnv env_raise(const InterTypeEnv& gamma, int m)
{
    InterTypeEnv out = gamma;
    for (auto& [x, bs] : out.bindings)
        for (auto& b : bs) b.raised = std::max(b.raised, m);
    return out;
}

bool operator<(const TopBinding& a, const TopBinding& b)
{
    if (a.name != b.name) return a.name < b.name;
    return compare({a.type, a.m}, {b.type, b.m}) < 0;
}

bool operator==(const TopBinding& a, const TopBinding& b) { return !(a < b) && !(b < a); }

TopLevelEnv sorted_env(TopLevelEnv xi)
{
    std::sort(xi.begin(), xi.end());
    xi.erase(std::unique(xi.begin(), xi.end()), xi.end());
    return xi;
}

namespace {

std::string encode(const InterType& t, const ParityAutomaton& a)
{
    if (t.kind == InterType::Kind::State) return sanitize_ident(a.names.at(t.state));
    std::string arg;
    if (t.int_arg) {
        arg = "int";
    } else if (t.conj.empty()) {
        arg = "top";
    } else {
        for (std::size_t i = 0; i < t.conj.size(); ++i) {
            if (i) arg += "_and_";
            arg += encode(*t.conj[i].first, a) + "_" + std::to_string(t.conj[i].second);
        }
    }
    return arg + "_to_" + encode(*t.res, a);
}

struct Head {
    std::string target;
    InterTypePtr type;
};

// Candidate types for a head variable applied to nargs arguments whose result must be `want`.
using Lookup = std::function<std::vector<Head>(const std::string& x, const InterTypeEnv& env, int raise,
                                               const InterTypePtr& want, std::size_t nargs)>;

class Deriver {
public:
    Deriver(const ParityAutomaton& a, Lookup lookup) : a_(a), lookup_(std::move(lookup)) {}

    std::optional<TermPtr> derive(const InterTypeEnv& env, int raise, const TermPtr& t, const InterTypePtr& theta)
    {
        const bool state = theta->kind == InterType::Kind::State;
        switch (t->kind) {
        case Term::Kind::Unit:
            if (!state) return std::nullopt;
            return term::unit(t->pos);
        case Term::Kind::Int:
        case Term::Kind::Arith: return std::nullopt;
        case Term::Kind::If: {
            if (!state) return std::nullopt;
            std::vector<TermPtr> args;
            for (const auto& x : t->args) {
                auto y = derive_int(env, x);
                if (!y) return std::nullopt;
                args.push_back(*y);
            }
            auto yes = derive(env, raise, t->lhs, theta);
            if (!yes) return std::nullopt;
            auto no = derive(env, raise, t->rhs, theta);
            if (!no) return std::nullopt;
            return term::ite(t->pred, args, *yes, *no, t->pos);
        }
        case Term::Kind::Event: {
            if (!state) return std::nullopt;
            std::vector<StateId> next(a_.successors(theta->state, t->name).begin(),
                                      a_.successors(theta->state, t->name).end());
            if (next.empty()) return std::nullopt;
            std::sort(next.begin(), next.end(), [&](StateId x, StateId y) { return a_.names[x] < a_.names[y]; });
            std::vector<TermPtr> branches;
            for (StateId q : next) {
                int m = a_.priority[q];
                auto b = derive(env_raise(env, m), std::max(raise, m), t->lhs, InterType::at(q));
                if (!b) return std::nullopt;
                branches.push_back(*b);
            }
            TermPtr body = branches.back();
            for (std::size_t i = branches.size() - 1; i-- > 0;) body = term::nondet(branches[i], body, t->pos);
            return term::event(t->name, body, t->pos);
        }
        case Term::Kind::NonDet: {
            if (!state) return std::nullopt;
            auto l = derive(env, raise, t->lhs, theta);
            if (!l) return std::nullopt;
            auto r = derive(env, raise, t->rhs, theta);
            if (!r) return std::nullopt;
            return term::nondet(*l, *r, t->pos);
        }
        case Term::Kind::Abs:
            fail(ErrorKind::Unsupported, "abstraction inside a body; lift lambdas before the transformation");
        case Term::Kind::Var:
        case Term::Kind::App: return derive_spine(env, raise, t, theta);
        }
        return std::nullopt;
    }

    std::optional<TermPtr> derive_int(const InterTypeEnv& env, const TermPtr& t)
    {
        switch (t->kind) {
        case Term::Kind::Int: return t;
        case Term::Kind::Var:
            if (env.ints.count(t->name)) return t;
            return std::nullopt;
        case Term::Kind::Arith: {
            auto l = derive_int(env, t->lhs);
            if (!l) return std::nullopt;
            auto r = derive_int(env, t->rhs);
            if (!r) return std::nullopt;
            return term::arith(t->arith, *l, *r, t->pos);
        }
        default: return std::nullopt;
        }
    }

private:
    const ParityAutomaton& a_;
    Lookup lookup_;

    std::optional<TermPtr> derive_spine(const InterTypeEnv& env, int raise, const TermPtr& t,
                                        const InterTypePtr& theta)
    {
        TermPtr head;
        std::vector<TermPtr> args;
        spine(t, head, args);
        if (head->kind == Term::Kind::Abs)
            fail(ErrorKind::Unsupported, "abstraction in head position; lift lambdas before the transformation");
        if (head->kind != Term::Kind::Var) return std::nullopt;
        if (env.ints.count(head->name)) return std::nullopt;
        for (const Head& h : lookup_(head->name, env, raise, theta, args.size())) {
            InterTypePtr rest = h.type;
            bool shape = true;
            for (std::size_t i = 0; i < args.size() && shape; ++i) {
                if (rest->kind != InterType::Kind::Arrow) shape = false;
                else rest = rest->res;
            }
            if (!shape || !equal(*rest, *theta)) continue;
            std::vector<TermPtr> out;
            bool ok = true;
            InterTypePtr cur = h.type;
            for (std::size_t i = 0; i < args.size() && ok; ++i) {
                if (cur->int_arg) {
                    auto y = derive_int(env, args[i]);
                    if (y) out.push_back(*y);
                    else ok = false;
                } else {
                    for (const auto& [ti, mi] : cur->conj) {
                        auto y = derive(env_raise(env, mi), std::max(raise, mi), args[i], ti);
                        if (!y) {
                            ok = false;
                            break;
                        }
                        out.push_back(*y);
                    }
                }
                cur = cur->res;
            }
            if (ok) return term::apps(term::var(h.target, head->pos), out);
        }
        return std::nullopt;
    }
};

std::vector<Head> from_env(const InterTypeEnv& env, const std::string& x, const ParityAutomaton& a)
{
    std::vector<std::pair<InterTypePtr, int>> found;
    auto it = env.bindings.find(x);
    if (it != env.bindings.end())
        for (const auto& b : it->second)
            if (b.m == b.raised) found.emplace_back(b.type, b.m);
    std::sort(found.begin(), found.end(), [](const auto& p, const auto& q) { return compare(p, q) < 0; });
    std::vector<Head> out;
    for (const auto& [t, m] : found) out.push_back({mangle(x, *t, m, a), t});
    return out;
}

// Parameters of a copy with type theta; fills env and returns the target names and the body type.
InterTypePtr bind_params(const Definition& d, const InterTypePtr& theta, const ParityAutomaton& a,
                         InterTypeEnv& env, std::vector<std::string>& names)
{
    InterTypePtr cur = theta;
    for (const auto& x : d.params) {
        if (cur->kind != InterType::Kind::Arrow)
            fail(ErrorKind::Type, "type " + to_string(*theta, a) + " has too few arguments for '" + d.name + "'");
        if (cur->int_arg) {
            env.add_int(x);
            names.push_back(x);
        } else {
            for (const auto& [t, m] : cur->conj) {
                env.add(x, t, m, 0);
                names.push_back(mangle(x, *t, m, a));
            }
        }
        cur = cur->res;
    }
    return cur;
}

// Parameters whose value is only ever passed on to other such parameters.
class Totality {
public:
    explicit Totality(const Program& p) : p_(p)
    {
        for (const auto& d : p.defs)
            for (std::size_t i = 0; i < d.params.size(); ++i) inert_.insert({d.name, i});
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& d : p.defs)
                for (std::size_t i = 0; i < d.params.size(); ++i)
                    if (inert_.count({d.name, i}) && escapes(*d.body, d.params[i])) {
                        inert_.erase({d.name, i});
                        changed = true;
                    }
        }
    }

    // A () that can become the rest of the computation ends the run, which the
    // call-sequence reduction cannot see.
    void check(const Term& t, bool inert_arg = false) const
    {
        if (t.kind == Term::Kind::Unit) {
            if (!inert_arg)
                fail(ErrorKind::Semantic, "program may terminate at " + describe(t.pos) +
                                              "; the temporal transformation needs a total program "
                                              "(apply instrument_total)");
            return;
        }
        if (t.kind == Term::Kind::App) {
            TermPtr head;
            std::vector<TermPtr> args;
            spine(std::make_shared<Term>(t), head, args);
            check(*head);
            for (std::size_t i = 0; i < args.size(); ++i) check(*args[i], inert_slot(*head, i));
            return;
        }
        for (const auto& a : t.args) check(*a);
        if (t.lhs) check(*t.lhs);
        if (t.rhs) check(*t.rhs);
    }

private:
    const Program& p_;
    std::set<std::pair<std::string, std::size_t>> inert_;

    bool inert_slot(const Term& head, std::size_t i) const
    {
        return head.kind == Term::Kind::Var && p_.find(head.name) && inert_.count({head.name, i});
    }

    bool escapes(const Term& t, const std::string& x) const
    {
        switch (t.kind) {
        case Term::Kind::Var: return t.name == x;
        case Term::Kind::Abs:
            if (std::find(t.params.begin(), t.params.end(), x) != t.params.end()) return false;
            break;
        case Term::Kind::App: {
            TermPtr head;
            std::vector<TermPtr> args;
            spine(std::make_shared<Term>(t), head, args);
            if (escapes(*head, x)) return true;
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (args[i]->kind == Term::Kind::Var && args[i]->name == x && inert_slot(*head, i)) continue;
                if (escapes(*args[i], x)) return true;
            }
            return false;
        }
        default: break;
        }
        for (const auto& a : t.args)
            if (escapes(*a, x)) return true;
        return (t.lhs && escapes(*t.lhs, x)) || (t.rhs && escapes(*t.rhs, x));
    }
};

using SlotKey = std::pair<std::string, StateId>;
using Component = std::pair<StateId, int>;

// Narrowed or canonical intersection types driven by the simple types of the program.
class Inference {
public:
    Inference(const Program& p, const ParityAutomaton& a, bool canonical)
        : p_(p), a_(a), typing_(infer_program_types(p)), canonical_(canonical)
    {
        for (std::size_t q = 0; q < a_.size(); ++q) max_prio_ = std::max(max_prio_, a_.priority[q]);
    }

    InterResult run()
    {
        const bool main_ref = main_is_referenced(p_);
        if (canonical_) {
            for (const auto& d : p_.defs)
                if (d.name != p_.main || main_ref)
                    for (std::size_t q = 0; q < a_.size(); ++q)
                        for (int m = 0; m <= max_prio_; ++m) live_.insert({d.name, static_cast<StateId>(q), m});
        }
        for (;;) {
            const auto live_before = live_;
            const auto used_before = used_;
            types_.clear();
            bodies_.clear();
            main_body(main_ref);
            for (std::size_t i = 0; i < live_.size(); ++i) {
                auto it = std::next(live_.begin(), static_cast<std::ptrdiff_t>(i));
                copy_body(std::get<0>(*it), std::get<1>(*it));
            }
            if (live_ == live_before && used_ == used_before) break;
        }

        InterResult r;
        r.program.main = p_.main;
        types_.clear();
        bodies_.clear();
        for (const auto& [f, q, m] : live_) {
            InterTypePtr t = type_of(global_type(f), q);
            const auto& [names, body] = copy_body(f, q);
            Definition d;
            d.name = mangle(f, *t, m, a_);
            d.params = names;
            d.body = body;
            d.pos = p_.find(f)->pos;
            r.program.defs.push_back(d);
            r.xi.push_back({f, t, m});
            r.omega[d.name] = m + 1;
        }
        Definition main;
        main.name = p_.main;
        main.body = main_body(main_ref);
        main.pos = p_.find(p_.main)->pos;
        r.program.defs.push_back(main);
        r.xi = sorted_env(r.xi);
        check_names(r.program);
        return r;
    }

private:
    const Program& p_;
    const ParityAutomaton& a_;
    ProgramTyping typing_;
    bool canonical_;
    int max_prio_ = 0;
    std::set<std::tuple<std::string, StateId, int>> live_;
    std::map<SlotKey, std::set<Component>> used_;
    std::map<SlotKey, InterTypePtr> types_;
    std::map<std::pair<std::string, StateId>, std::pair<std::vector<std::string>, TermPtr>> bodies_;
    // Slot of each parameter of the definition being transformed.
    std::map<std::string, SimpleTypePtr> slot_;
    std::string current_;
    StateId current_q_ = 0;

    SimpleTypePtr global_type(const std::string& f) const { return typing_.globals.at(f); }

    InterTypePtr type_of(const SimpleTypePtr& k, StateId q)
    {
        switch (k->kind) {
        case SimpleType::Kind::Unit: return InterType::at(q);
        case SimpleType::Kind::Int: fail(ErrorKind::Type, "int has no intersection type");
        case SimpleType::Kind::Arrow: break;
        }
        SlotKey key{to_string(*k), q};
        auto it = types_.find(key);
        if (it != types_.end()) return it->second;
        InterTypePtr res = type_of(k->res, q);
        InterTypePtr t;
        if (k->arg->kind == SimpleType::Kind::Int) {
            t = InterType::int_arrow(res);
        } else {
            std::vector<std::pair<InterTypePtr, int>> conj;
            if (canonical_) {
                for (std::size_t r = 0; r < a_.size(); ++r)
                    for (int m = 0; m <= max_prio_; ++m) conj.emplace_back(type_of(k->arg, static_cast<StateId>(r)), m);
            } else {
                for (const auto& [r, m] : used_[key]) conj.emplace_back(type_of(k->arg, r), m);
            }
            t = InterType::arrow(std::move(conj), res);
        }
        types_[key] = t;
        return t;
    }

    std::vector<Head> lookup(const std::string& x, int raise, const InterTypePtr& want)
    {
        StateId q = final_state(*want);
        auto s = slot_.find(x);
        if (s != slot_.end()) {
            InterTypePtr t = type_of(typing_.locals.at(current_).at(x), q);
            used_[{to_string(*s->second), current_q_}].insert({q, raise});
            return {{mangle(x, *t, raise, a_), t}};
        }
        if (!typing_.globals.count(x)) fail(ErrorKind::Semantic, "unbound variable '" + x + "'");
        InterTypePtr t = type_of(global_type(x), q);
        live_.insert({x, q, raise});
        return {{mangle(x, *t, raise, a_), t}};
    }

    Deriver deriver()
    {
        return Deriver(a_, [this](const std::string& x, const InterTypeEnv&, int raise, const InterTypePtr& want,
                                  std::size_t) { return lookup(x, raise, want); });
    }

    const std::pair<std::vector<std::string>, TermPtr>& copy_body(const std::string& f, StateId q)
    {
        auto it = bodies_.find({f, q});
        if (it != bodies_.end()) return it->second;
        const Definition& d = *p_.find(f);
        current_ = f;
        current_q_ = q;
        slot_.clear();
        SimpleTypePtr k = global_type(f);
        for (const auto& x : d.params) {
            if (k->arg->kind != SimpleType::Kind::Int) slot_[x] = k;
            k = k->res;
        }
        InterTypeEnv env;
        std::vector<std::string> names;
        InterTypePtr body_type = bind_params(d, type_of(global_type(f), q), a_, env, names);
        auto body = deriver().derive(env, 0, d.body, body_type);
        if (!body) fail(ErrorKind::Semantic, "no intersection-type derivation for the body of '" + f + "'");
        return bodies_[{f, q}] = {names, *body};
    }

    TermPtr main_body(bool main_ref)
    {
        current_ = p_.main;
        slot_.clear();
        InterTypePtr init = InterType::at(a_.init);
        TermPtr t = main_ref ? term::var(p_.main) : p_.find(p_.main)->body;
        auto body = deriver().derive(InterTypeEnv{}, 0, t, init);
        if (!body) fail(ErrorKind::Semantic, "no intersection-type derivation for '" + p_.main + "'");
        return *body;
    }

    void check_names(const Program& out) const
    {
        std::set<std::string> defs;
        for (const auto& d : out.defs)
            if (!defs.insert(d.name).second) fail(ErrorKind::Semantic, "name clash in the transformed program: " + d.name);
        for (const auto& d : out.defs) {
            std::set<std::string> ps;
            for (const auto& x : d.params)
                if (!ps.insert(x).second || defs.count(x))
                    fail(ErrorKind::Semantic, "name clash in the transformed program: " + x);
        }
    }
};

}  // namespace

std::string mangle(const std::string& x, const InterType& t, int m, const ParityAutomaton& a)
{
    return x + "__" + encode(t, a) + "__" + std::to_string(m);
}

TermPtr transform_term(const InterTypeEnv& gamma, const TermPtr& t, const InterTypePtr& theta,
                       const ParityAutomaton& a)
{
    Deriver d(a, [&a](const std::string& x, const InterTypeEnv& env, int, const InterTypePtr&, std::size_t) {
        return from_env(env, x, a);
    });
    auto out = d.derive(gamma, 0, t, theta);
    if (!out) fail(ErrorKind::Semantic, "no derivation of " + to_string(*t) + " : " + to_string(*theta, a));
    return *out;
}

ParityAutomaton prepare_automaton(const ParityAutomaton& a, const Program& p)
{
    ParityAutomaton out = a;
    for (const auto& e : p.events()) out.alphabet.insert(e);
    return complete_parity(out);
}

InterResult infer_intersection_transform(const Program& p, const ParityAutomaton& a, InterOptions opts)
{
    typecheck_program(p);
    Totality total(p);
    for (const auto& d : p.defs) total.check(*d.body);
    ParityAutomaton full = prepare_automaton(a, p);
    return Inference(p, full, opts.canonical).run();
}

TopLevelEnv prune_environment(const TopLevelEnv& xi, const Program& p, const ParityAutomaton& a)
{
    ParityAutomaton full = prepare_automaton(a, p);
    TopLevelEnv cur = sorted_env(xi);
    for (;;) {
        InterTypeEnv globals;
        for (const auto& b : cur) globals.add(b.name, b.type, b.m, 0);
        TopLevelEnv next;
        for (const auto& b : cur) {
            const Definition* d = p.find(b.name);
            if (!d) continue;
            InterTypeEnv env = globals;
            for (const auto& x : d->params) env.bindings.erase(x);
            std::vector<std::string> names;
            InterTypePtr body_type;
            try {
                body_type = bind_params(*d, b.type, full, env, names);
            } catch (const Error&) {
                continue;
            }
            Deriver der(full, [&full](const std::string& x, const InterTypeEnv& e, int, const InterTypePtr&,
                                      std::size_t) { return from_env(e, x, full); });
            if (der.derive(env, 0, d->body, body_type)) next.push_back(b);
        }
        if (next.size() == cur.size()) return cur;
        cur = next;
    }
}

Hes temporal_pipeline(const Program& p, const ParityAutomaton& a, InterOptions opts)
{
    InterResult r = infer_intersection_transform(p, a, opts);
    return translate_csa(r.program, r.omega);
}

}  // namespace hflz
