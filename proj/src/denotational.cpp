#include "hflz/checker.hpp"

#include <cstdint>
#include <memory>
#include <set>
#include <unordered_map>

namespace hflz {

std::string to_string(Verdict::Kind k)
{
    switch (k) {
    case Verdict::Kind::Valid: return "valid";
    case Verdict::Kind::Invalid: return "invalid";
    case Verdict::Kind::Unknown: return "unknown";
    }
    return "?";
}

namespace {

using Bits = std::uint64_t;

class Evaluator;
struct Fun;

struct Val {
    enum class K { Prop, Int, Fn } k = K::Prop;
    Bits bits = 0;
    BigInt n;
    std::shared_ptr<Fun> fn;
    HflTypePtr type;  // Fn only

    static Val prop(Bits b) { return {K::Prop, b, {}, nullptr, nullptr}; }
    static Val integer(BigInt v) { return {K::Int, 0, std::move(v), nullptr, nullptr}; }
    static Val function(std::shared_ptr<Fun> f, HflTypePtr t) { return {K::Fn, 0, {}, std::move(f), std::move(t)}; }
};

using Env = std::map<std::string, Val>;

struct Fun {
    virtual ~Fun() = default;
    virtual Val apply(Evaluator& ev, const Val& arg, Bits care) = 0;
    // prop-typed recursion variables
    virtual Bits force(Evaluator&, Bits) { fail(ErrorKind::Type, "not a proposition"); }
};

struct LamFun : Fun {
    const Formula* lam;
    Env env;
    LamFun(const Formula* l, Env e) : lam(l), env(std::move(e)) {}
    Val apply(Evaluator& ev, const Val& arg, Bits care) override;
};

struct FixTable : std::enable_shared_from_this<FixTable> {
    struct Row {
        std::vector<Val> args;
        std::vector<std::vector<Bits>> shape;  // prop bits or function graph per argument
        Bits care = 0;
        Bits value = 0;
    };
    const Formula* node;
    Env env;
    bool mu;
    std::size_t arity;
    std::vector<Row> rows;
    std::unordered_map<std::string, std::size_t> index;
    bool solving = false;
    bool dirty = false;
    std::uint64_t version = 0;  // bumped whenever a row value moves

    FixTable(const Formula* n, Env e, std::size_t a) : node(n), env(std::move(e)), mu(n->kind == Formula::Kind::Mu), arity(a) {}
    Bits demand(Evaluator& ev, const std::vector<Val>& args, Bits care);
    void solve(Evaluator& ev);
    // Approximation of row i that is monotone in the arguments while the table is still being solved.
    Bits read(std::size_t i) const;
};

struct FixFun : Fun {
    std::shared_ptr<FixTable> table;
    std::vector<Val> args;
    FixFun(std::shared_ptr<FixTable> t, std::vector<Val> a) : table(std::move(t)), args(std::move(a)) {}
    Val apply(Evaluator& ev, const Val& arg, Bits care) override;
    Bits force(Evaluator& ev, Bits care) override { return table->demand(ev, args, care); }
};

class Evaluator {
public:
    Evaluator(const Lts& lts, const DenotationalOptions& opts) : lts_(lts), opts_(opts)
    {
        if (lts.size() > 64) fail(ErrorKind::Unsupported, "denotational backend handles at most 64 states");
        all_ = lts.size() == 64 ? ~Bits{0} : ((Bits{1} << lts.size()) - 1);
        for (std::size_t q = 0; q < lts.size(); ++q)
            for (const auto& [a, ts] : lts.succ[q])
                for (StateId t : ts) {
                    auto& v = succ_[a];
                    v.resize(lts.size(), 0);
                    v[q] |= Bits{1} << t;
                }
    }

    Bits all() const { return all_; }

    Val eval(const Formula& f, const Env& env, Bits care)
    {
        using K = Formula::Kind;
        switch (f.kind) {
        case K::True: return Val::prop(care);
        case K::False: return Val::prop(0);
        case K::Int: return Val::integer(f.value);
        case K::Arith: return Val::integer(eval_arith(f.arith, integer(*f.lhs, env), integer(*f.rhs, env)));
        case K::Pred: {
            std::vector<BigInt> xs;
            for (const auto& a : f.args) xs.push_back(integer(*a, env));
            return Val::prop(eval_pred(f.pred, xs) ? care : 0);
        }
        case K::Or: {
            Bits l = eval(*f.lhs, env, care).bits;
            return Val::prop(l | eval(*f.rhs, env, care & ~l).bits);
        }
        case K::And: {
            Bits l = eval(*f.lhs, env, care).bits;
            return Val::prop(l ? eval(*f.rhs, env, l).bits : 0);
        }
        case K::Var: {
            auto it = env.find(f.name);
            if (it == env.end()) fail(ErrorKind::Type, "unbound variable '" + f.name + "'");
            const Val& v = it->second;
            if (v.k == Val::K::Prop) return Val::prop(v.bits & care);
            if (v.k == Val::K::Fn && v.type->kind == HflType::Kind::Prop) return Val::prop(v.fn->force(*this, care));
            return v;
        }
        case K::Diamond:
        case K::Box: return modal(f, env, care);
        case K::Mu:
        case K::Nu: {
            if (!f.type) fail(ErrorKind::Type, "fixpoint without a type annotation");
            std::size_t arity = arg_types(f.type).size();
            auto table = fixpoint_table(f, env, arity);
            if (arity == 0) return Val::prop(table->demand(*this, {}, care));
            return Val::function(std::make_shared<FixFun>(table, std::vector<Val>{}), f.type);
        }
        case K::Lambda: return Val::function(std::make_shared<LamFun>(&f, env), lambda_type(f, env));
        case K::App: {
            Val head = eval(*f.lhs, env, all_);
            Val arg = eval(*f.rhs, env, all_);
            if (head.k != Val::K::Fn) fail(ErrorKind::Type, "application of a non-function: " + to_string(f));
            return head.fn->apply(*this, arg, care);
        }
        }
        return Val::prop(0);
    }

    Val apply_all(Val f, const std::vector<Val>& args, Bits care)
    {
        for (const auto& a : args) f = f.fn->apply(*this, a, care);
        return f;
    }

    std::string key(const std::vector<Val>& args, std::vector<std::vector<Bits>>& shape)
    {
        std::string k;
        shape.clear();
        for (const auto& a : args) {
            switch (a.k) {
            case Val::K::Prop:
                k += "p" + std::to_string(a.bits);
                shape.push_back({a.bits});
                break;
            case Val::K::Int:
                k += "i" + to_string(a.n);
                shape.emplace_back();
                break;
            case Val::K::Fn:
                shape.push_back(tabulate(a));
                k += "f[";
                for (Bits b : shape.back()) k += std::to_string(b) + ",";
                k += "]";
                break;
            }
            k += ';';
        }
        return k;
    }

    void count_row()
    {
        if (++rows_ > opts_.max_entries)
            fail(ErrorKind::Budget, "denotational table limit of " + std::to_string(opts_.max_entries) + " rows exceeded");
    }

private:
    struct Cached {
        std::shared_ptr<FixTable> table;
        std::vector<std::pair<const FixTable*, std::uint64_t>> deps;
    };

    const Lts& lts_;
    DenotationalOptions opts_;
    Bits all_ = 0;
    std::map<std::string, std::vector<Bits>> succ_;
    std::map<const Formula*, HflTypePtr> lambda_types_;
    std::map<const Formula*, std::set<std::string>> free_;
    std::map<std::pair<const Formula*, std::string>, Cached> tables_;
    std::size_t rows_ = 0;

    // Tables are shared between evaluations of the same fixpoint under the same free
    // variables. A cached table keeps its rows when the tables it reads have only moved
    // in its own direction, and starts over otherwise.
    std::shared_ptr<FixTable> fixpoint_table(const Formula& f, const Env& env, std::size_t arity)
    {
        auto fit = free_.find(&f);
        if (fit == free_.end()) fit = free_.emplace(&f, free_vars(f)).first;
        std::string sig;
        std::vector<std::pair<const FixTable*, std::uint64_t>> deps;
        for (const auto& x : fit->second) {
            auto it = env.find(x);
            if (it == env.end()) continue;
            const Val& v = it->second;
            sig += x;
            if (v.k == Val::K::Prop) sig += "=p" + std::to_string(v.bits);
            else if (v.k == Val::K::Int) sig += "=i" + to_string(v.n);
            else if (auto* ff = dynamic_cast<const FixFun*>(v.fn.get())) {
                std::vector<std::vector<Bits>> shape;
                sig += "=t" + std::to_string(reinterpret_cast<std::uintptr_t>(ff->table.get())) + "[" + key(ff->args, shape) + "]";
                deps.emplace_back(ff->table.get(), ff->table->version);
            } else return std::make_shared<FixTable>(&f, env, arity);
            sig += ';';
        }
        Cached& c = tables_[{&f, sig}];
        if (c.table && !c.table->solving) {
            bool mu = f.kind == Formula::Kind::Mu;
            bool changed = false, keep = true;
            for (std::size_t i = 0; i < deps.size(); ++i)
                if (deps[i].second != c.deps[i].second) {
                    changed = true;
                    keep = keep && deps[i].first->mu == mu;
                }
            if (keep) {
                c.table->dirty = c.table->dirty || changed;
                c.deps = std::move(deps);
                return c.table;
            }
        }
        c.table = std::make_shared<FixTable>(&f, env, arity);
        c.deps = std::move(deps);
        return c.table;
    }

    BigInt integer(const Formula& f, const Env& env)
    {
        Val v = eval(f, env, all_);
        if (v.k != Val::K::Int) fail(ErrorKind::Type, "expected an integer: " + to_string(f));
        return v.n;
    }

    Val modal(const Formula& f, const Env& env, Bits care)
    {
        auto it = succ_.find(f.name);
        bool dia = f.kind == Formula::Kind::Diamond;
        if (it == succ_.end()) return Val::prop(dia ? 0 : care);
        const auto& sv = it->second;
        Bits reach = 0;
        for (std::size_t q = 0; q < sv.size(); ++q)
            if (care >> q & 1) reach |= sv[q];
        Bits body = reach ? eval(*f.lhs, env, reach).bits : 0;
        Bits out = 0;
        for (std::size_t q = 0; q < sv.size(); ++q) {
            if (!(care >> q & 1)) continue;
            bool ok = dia ? (sv[q] & body) != 0 : (sv[q] & ~body) == 0;
            if (ok) out |= Bits{1} << q;
        }
        return Val::prop(out);
    }

    HflTypePtr lambda_type(const Formula& f, const Env& env)
    {
        auto it = lambda_types_.find(&f);
        if (it != lambda_types_.end()) return it->second;
        HflEnv tenv;
        for (const auto& [x, v] : env)
            tenv[x] = v.k == Val::K::Prop ? HflType::prop() : v.k == Val::K::Int ? HflType::integer() : v.type;
        HflTypePtr t = typecheck_formula(tenv, f);
        lambda_types_[&f] = t;
        return t;
    }

    // Graph of a function over prop arguments, the canonical key of its value.
    std::vector<Bits> tabulate(const Val& f)
    {
        std::vector<HflTypePtr> ts = arg_types(f.type);
        for (const auto& t : ts)
            if (t->kind != HflType::Kind::Prop)
                fail(ErrorKind::Unsupported, "function-valued argument of type " + to_string(*f.type) +
                                                 " cannot be tabulated");
        std::size_t n = lts_.size();
        std::size_t rows = 1;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (n >= 20 || rows > opts_.max_tabulation >> n)
                fail(ErrorKind::Budget, "function argument of type " + to_string(*f.type) + " is too large to tabulate");
            rows <<= n;
        }
        std::vector<Bits> out;
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<Val> args;
            std::size_t code = r;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                args.push_back(Val::prop(code & ((std::size_t{1} << n) - 1)));
                code >>= n;
            }
            out.push_back(apply_all(f, args, all_).bits);
        }
        return out;
    }
};

Val LamFun::apply(Evaluator& ev, const Val& arg, Bits care)
{
    Env e = env;
    e[lam->name] = arg;
    return ev.eval(*lam->lhs, e, care);
}

Val FixFun::apply(Evaluator& ev, const Val& arg, Bits care)
{
    std::vector<Val> next = args;
    next.push_back(arg);
    if (next.size() == table->arity) return Val::prop(table->demand(ev, next, care));
    std::vector<HflTypePtr> ts = arg_types(table->node->type);
    HflTypePtr rest = HflType::arrows(std::vector<HflTypePtr>(ts.begin() + static_cast<std::ptrdiff_t>(next.size()), ts.end()),
                                      HflType::prop());
    return Val::function(std::make_shared<FixFun>(table, std::move(next)), rest);
}

Bits FixTable::demand(Evaluator& ev, const std::vector<Val>& args, Bits care)
{
    std::vector<std::vector<Bits>> shape;
    std::string k = ev.key(args, shape);
    auto it = index.find(k);
    std::size_t i;
    if (it == index.end()) {
        ev.count_row();
        i = rows.size();
        index.emplace(k, i);
        rows.push_back({args, std::move(shape), care, mu ? Bits{0} : ev.all()});
        dirty = true;
    } else {
        i = it->second;
        if ((care & ~rows[i].care) != 0) {
            rows[i].care |= care;
            dirty = true;
        }
    }
    if (!solving && dirty) solve(ev);
    return (solving ? read(i) : rows[i].value) & care;
}

static bool args_leq(const FixTable::Row& a, const FixTable::Row& b)
{
    for (std::size_t j = 0; j < a.args.size(); ++j) {
        if (a.args[j].k == Val::K::Int) {
            if (a.args[j].n != b.args[j].n) return false;
            continue;
        }
        for (std::size_t r = 0; r < a.shape[j].size(); ++r)
            if ((a.shape[j][r] & ~b.shape[j][r]) != 0) return false;
    }
    return true;
}

Bits FixTable::read(std::size_t i) const
{
    Bits v = rows[i].value;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (j == i) continue;
        if (mu && args_leq(rows[j], rows[i])) v |= rows[j].value;
        if (!mu && args_leq(rows[i], rows[j])) v &= rows[j].value;
    }
    return v;
}

void FixTable::solve(Evaluator& ev)
{
    solving = true;
    Env e = env;
    e[node->name] = Val::function(std::make_shared<FixFun>(shared_from_this(), std::vector<Val>{}), node->type);
    while (dirty) {
        dirty = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Bits care = rows[i].care;
            Val body = ev.eval(*node->lhs, e, arity == 0 ? care : ev.all());
            Bits v = ev.apply_all(body, rows[i].args, care).bits & care;
            Bits old = rows[i].value & care;
            if (v != old) {
                rows[i].value = (rows[i].value & ~care) | v;
                dirty = true;
                ++version;
            }
        }
    }
    solving = false;
}

std::set<StateId> to_states(Bits b, std::size_t n)
{
    std::set<StateId> out;
    for (std::size_t q = 0; q < n; ++q)
        if (b >> q & 1) out.insert(static_cast<StateId>(q));
    return out;
}

}  // namespace

std::set<StateId> denotational_eval(const Lts& lts, const FormulaPtr& f, const std::map<std::string, std::set<StateId>>& props,
                                    const DenotationalOptions& opts)
{
    Evaluator ev(lts, opts);
    Env env;
    HflEnv tenv;
    for (const auto& [x, qs] : props) {
        Bits b = 0;
        for (StateId q : qs) b |= Bits{1} << q;
        env[x] = Val::prop(b);
        tenv[x] = HflType::prop();
    }
    HflTypePtr t = typecheck_formula(tenv, *f);
    if (t->kind != HflType::Kind::Prop) fail(ErrorKind::Type, "formula has type " + to_string(*t) + ", expected prop");
    return to_states(ev.eval(*f, env, ev.all()).bits, lts.size());
}

std::set<StateId> denotational_check(const Lts& lts, const Hes& h, const DenotationalOptions& opts)
{
    typecheck_hes(h);
    return denotational_eval(lts, hes_to_formula(h), {}, opts);
}

}  // namespace hflz
