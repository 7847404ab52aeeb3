#include "hflz/checker.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <unordered_map>

namespace hflz {

namespace {

// Verifier guesses a state set per prop argument when the number of guesses
// stays below this; otherwise the argument travels as a closure.
constexpr int kMaxGuessBits = 8;

struct NonGround {
    std::string what;
};

// An integer half-line made a predicate or an operation undetermined.
struct Ambiguous {};

// Integer value or one of the half-lines below -T / above T.
struct AInt {
    int cls = 0;  // -1 below, 0 exact, +1 above
    BigInt n;
};

// Every lambda and every compound prop argument becomes its own equation,
// so arguments are variables, integers, or applications headed by a variable.
class Lifter {
public:
    Lifter(const Hes& h, const HflEnv& genv) : h_(h), genv_(genv)
    {
        for (const auto& e : h.equations) {
            taken_.insert(e.var);
            collect(*e.rhs);
            for (const auto& p : e.params) taken_.insert(p.first);
        }
        collect(*h.main);
    }

    Hes run()
    {
        Hes out;
        for (const auto& e : h_.equations) {
            Equation copy = e;
            Scope scope(e.params.begin(), e.params.end());
            copy.rhs = lift(e.rhs, scope);
            out.equations.push_back(copy);
        }
        for (auto& e : lifted_) out.equations.push_back(e);
        out.main = h_.main;
        return out;
    }

private:
    using Scope = std::vector<std::pair<std::string, HflTypePtr>>;
    const Hes& h_;
    HflEnv genv_;
    std::set<std::string> taken_;
    std::vector<Equation> lifted_;
    int counter_ = 0;

    void collect(const Formula& f)
    {
        if (!f.name.empty()) taken_.insert(f.name);
        for (const auto& a : f.args) collect(*a);
        if (f.lhs) collect(*f.lhs);
        if (f.rhs) collect(*f.rhs);
    }

    std::string fresh(const std::string& base)
    {
        std::string n;
        do n = base + std::to_string(++counter_);
        while (taken_.count(n));
        taken_.insert(n);
        return n;
    }

    HflTypePtr type_of(const FormulaPtr& f, const Scope& scope)
    {
        HflEnv env = genv_;
        for (const auto& [x, t] : scope) env[x] = t;
        return typecheck_formula(env, *f);
    }

    Scope captured(const FormulaPtr& f, const Scope& scope)
    {
        std::set<std::string> fv = free_vars(*f);
        Scope out;
        std::set<std::string> seen;
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (fv.count(it->first) && seen.insert(it->first).second) out.push_back(*it);
        std::reverse(out.begin(), out.end());
        return out;
    }

    FormulaPtr call_of(const std::string& name, const Scope& caps)
    {
        std::vector<FormulaPtr> xs;
        for (const auto& c : caps) xs.push_back(fml::var(c.first));
        return fml::apps(fml::var(name), xs);
    }

    FormulaPtr lift(const FormulaPtr& f, const Scope& scope)
    {
        using K = Formula::Kind;
        switch (f->kind) {
        case K::True:
        case K::False:
        case K::Int:
        case K::Arith:
        case K::Pred:
        case K::Var: return f;
        case K::Or: return fml::disj(lift(f->lhs, scope), lift(f->rhs, scope));
        case K::And: return fml::conj(lift(f->lhs, scope), lift(f->rhs, scope));
        case K::Diamond: return fml::diamond(f->name, lift(f->lhs, scope));
        case K::Box: return fml::box(f->name, lift(f->lhs, scope));
        case K::Lambda: return lift_lambda(f, scope);
        case K::App: {
            FormulaPtr head;
            std::vector<FormulaPtr> args;
            spine(f, head, args);
            if (head->kind == K::Lambda) head = lift_lambda(head, scope);
            else if (head->kind != K::Var) fail(ErrorKind::Type, "unexpected application head in " + to_string(*f));
            for (auto& a : args) a = lift_arg(a, scope);
            return fml::apps(head, args);
        }
        case K::Mu:
        case K::Nu: fail(ErrorKind::Type, "fixpoint operator inside an equation");
        }
        return f;
    }

    FormulaPtr lift_arg(const FormulaPtr& a, const Scope& scope)
    {
        HflTypePtr t = type_of(a, scope);
        if (t->kind == HflType::Kind::Int || a->kind == Formula::Kind::Var || a->kind == Formula::Kind::True ||
            a->kind == Formula::Kind::False)
            return a;
        if (a->kind == Formula::Kind::App) {
            FormulaPtr head;
            std::vector<FormulaPtr> args;
            spine(a, head, args);
            if (head->kind == Formula::Kind::Var) {
                for (auto& x : args) x = lift_arg(x, scope);
                return fml::apps(head, args);
            }
        }
        if (a->kind == Formula::Kind::Lambda) return lift_lambda(a, scope);
        if (t->kind != HflType::Kind::Prop) return lift(a, scope);
        Scope caps = captured(a, scope);
        Equation e{fresh("arg"), caps, Fix::Nu, nullptr};
        std::size_t slot = reserve();
        e.rhs = lift(a, caps);
        lifted_[slot] = e;
        return call_of(e.var, caps);
    }

    std::size_t reserve()
    {
        lifted_.push_back({});
        return lifted_.size() - 1;
    }

    FormulaPtr lift_lambda(const FormulaPtr& f, const Scope& scope)
    {
        HflTypePtr t = type_of(f, scope);
        Scope caps = captured(f, scope);
        Equation e{fresh("lam"), caps, Fix::Nu, nullptr};
        FormulaPtr body = f;
        for (const HflTypePtr& at : arg_types(t)) {
            if (body->kind == Formula::Kind::Lambda) {
                e.params.emplace_back(body->name, at);
                body = body->lhs;
            } else {
                std::string y = fresh("eta");
                e.params.emplace_back(y, at);
                body = fml::app(body, fml::var(y));
            }
        }
        std::size_t slot = reserve();
        e.rhs = lift(body, e.params);
        lifted_[slot] = e;
        return call_of(e.var, caps);
    }
};

FormulaPtr beta(const FormulaPtr& f)
{
    using K = Formula::Kind;
    switch (f->kind) {
    case K::App: {
        FormulaPtr head = beta(f->lhs);
        FormulaPtr arg = beta(f->rhs);
        if (head->kind == K::Lambda) return beta(substitute(head->lhs, {{head->name, arg}}));
        return fml::app(head, arg);
    }
    case K::Lambda: return fml::lam(f->name, f->type, beta(f->lhs));
    case K::Or: return fml::disj(beta(f->lhs), beta(f->rhs));
    case K::And: return fml::conj(beta(f->lhs), beta(f->rhs));
    case K::Diamond: return fml::diamond(f->name, beta(f->lhs));
    case K::Box: return fml::box(f->name, beta(f->lhs));
    default: return f;
    }
}

// An equation outside every dependency cycle denotes the same thing under mu and nu,
// so it is substituted into its users. This keeps calls through it from being
// mistaken for recursion.
Hes inline_nonrecursive(const Hes& h)
{
    std::size_t n = h.equations.size();
    std::vector<std::set<std::size_t>> uses(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& x : free_vars(*h.equations[i].rhs)) {
            int j = h.index_of(x);
            bool shadowed = std::any_of(h.equations[i].params.begin(), h.equations[i].params.end(),
                                        [&](const auto& p) { return p.first == x; });
            if (j >= 0 && !shadowed) uses[i].insert(static_cast<std::size_t>(j));
        }
    std::vector<char> recursive(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack(uses[i].begin(), uses[i].end());
        while (!stack.empty() && !recursive[i]) {
            std::size_t j = stack.back();
            stack.pop_back();
            if (j == i) recursive[i] = 1;
            if (seen[j]) continue;
            seen[j] = 1;
            stack.insert(stack.end(), uses[j].begin(), uses[j].end());
        }
    }
    int main_eq = h.index_of(h.main->name);
    std::map<std::string, FormulaPtr> sub;
    // users are rewritten after their callees, so chains of inlined equations unfold fully
    std::vector<Equation> eqs = h.equations;
    std::vector<char> done(n, 0);
    std::function<FormulaPtr(std::size_t)> lambda = [&](std::size_t i) -> FormulaPtr {
        if (!done[i]) {
            std::map<std::string, FormulaPtr> local;
            for (std::size_t j : uses[i])
                if (!recursive[j] && static_cast<int>(j) != main_eq && j != i) local[eqs[j].var] = lambda(j);
            eqs[i].rhs = beta(substitute(eqs[i].rhs, local));
            done[i] = 1;
        }
        return eqs[i].as_lambda();
    };
    Hes out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!recursive[i] && static_cast<int>(i) != main_eq) continue;
        lambda(i);
        out.equations.push_back(eqs[i]);
    }
    out.main = h.main;
    return out;
}

enum class PKind { Int, Prop, Fun };

struct EqInfo {
    std::string name;
    std::vector<std::string> params;
    std::vector<PKind> kinds;
    std::vector<char> relevant;
    std::map<std::string, int> index;
    FormulaPtr rhs;
    int prio = 0;
};

PKind kind_of(const HflTypePtr& t)
{
    if (t->kind == HflType::Kind::Int) return PKind::Int;
    if (t->kind == HflType::Kind::Prop) return PKind::Prop;
    return PKind::Fun;
}

struct ValRec {
    enum class K { Int, Bot, Set, Clo } k = K::Bot;
    AInt n;
    std::uint64_t set = 0;
    int eq = -1;
    std::vector<int> args;
};

struct NodeKey {
    int kind, pos, state, env, extra;
    bool operator==(const NodeKey& o) const
    {
        return kind == o.kind && pos == o.pos && state == o.state && env == o.env && extra == o.extra;
    }
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const
    {
        std::size_t h = 1469598103934665603ull;
        for (int v : {k.kind, k.pos, k.state, k.env, k.extra}) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
        return h;
    }
};

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const
    {
        std::size_t h = 1469598103934665603ull;
        for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
        return h;
    }
};

class Engine {
public:
    Engine(const Lts& lts, const Hes& input, bool abstract) : lts_(lts), abstract_(abstract)
    {
        if (lts.size() > 64) fail(ErrorKind::Unsupported, "game backend handles at most 64 states");
        Hes h = inline_nonrecursive(normalize_hes(input));
        HflEnv genv = typecheck_hes(h);
        Hes lifted = Lifter(h, genv).run();
        typecheck_hes(lifted);
        for (std::size_t i = 0; i < lifted.equations.size(); ++i) {
            const Equation& e = lifted.equations[i];
            EqInfo info;
            info.name = e.var;
            info.rhs = e.rhs;
            info.prio = priority(lifted, i);
            for (const auto& [x, t] : e.params) {
                info.index[x] = static_cast<int>(info.params.size());
                info.params.push_back(x);
                info.kinds.push_back(kind_of(t));
                info.relevant.push_back(kind_of(t) == PKind::Fun ? 1 : 0);
            }
            eq_index_[e.var] = static_cast<int>(i);
            eqs_.push_back(std::move(info));
        }
        main_eq_ = eq_index_.at(h.main->name);
        relevance();
        BigInt top = 0;
        for (const auto& e : lifted.equations) literal_bound(*e.rhs, top);
        threshold_ = top + 1;
    }

    GroundGame explore(std::size_t budget, const std::function<bool(Engine&)>& checkpoint)
    {
        init_ = node({0, root_pos(main_eq_), lts_.init, intern_env({}), 0});
        std::size_t next_check = 4096;
        while (head_ < order_.size()) {
            if (nodes_.size() >= budget) break;
            expand(order_[head_++]);
            if (checkpoint && nodes_.size() >= next_check) {
                next_check *= 2;
                if (checkpoint(*this)) break;
            }
        }
        return snapshot(Player::Verifier);
    }

    // Unexpanded nodes become dead ends of `stuck`, who therefore loses there.
    GroundGame snapshot(Player stuck) const
    {
        GroundGame gg;
        gg.invocations = invocations_;
        ParityGame& g = gg.game;
        for (std::size_t v = 0; v < nodes_.size(); ++v) {
            const Node& n = nodes_[v];
            g.add_node(n.expanded ? n.owner : stuck, n.prio);
            if (n.expanded) g.succ[v] = n.succ;
            else gg.frontier.push_back(static_cast<int>(v));
        }
        g.init = init_;
        gg.complete = gg.frontier.empty();
        return gg;
    }

    int init() const { return init_; }

private:
    struct Pos {
        int eq;
        const Formula* f;
    };
    struct Node {
        NodeKey key;
        Player owner = Player::Verifier;
        int prio = 0;
        bool expanded = false;
        std::vector<int> succ;
    };
    struct Call {
        int target = -1;  // resolved node, or -1 when Verifier must guess
        int callee = -1;
        std::vector<int> vals;
        std::vector<int> slots;             // callee parameter index per guessed argument
        std::vector<const Formula*> guessed;  // the argument formulas in the caller
    };

    const Lts& lts_;
    bool abstract_;
    BigInt threshold_;
    std::vector<EqInfo> eqs_;
    std::map<std::string, int> eq_index_;
    int main_eq_ = 0;

    std::vector<Pos> pos_;
    std::map<std::pair<int, const Formula*>, int> pos_index_;
    std::vector<ValRec> vals_;
    std::unordered_map<std::string, int> val_index_;
    std::vector<std::vector<int>> envs_;
    std::unordered_map<std::vector<int>, int, VecHash> env_index_;
    std::vector<Node> nodes_;
    std::unordered_map<NodeKey, int, NodeKeyHash> node_index_;
    std::vector<int> order_;
    std::size_t head_ = 0;
    int init_ = 0;
    int sink_true_ = -1, sink_false_ = -1;
    bool invoked_ = false;  // set by resolve_call when the head is a closure
    std::vector<std::pair<int, int>> invocations_;

    // ---- static analysis

    void relevance()
    {
        for (bool changed = true; changed;) {
            changed = false;
            for (auto& e : eqs_) {
                std::set<std::string> rel;
                scan(*e.rhs, e, rel);
                for (const auto& x : rel) {
                    int i = e.index.at(x);
                    if (!e.relevant[i]) {
                        e.relevant[i] = 1;
                        changed = true;
                    }
                }
            }
        }
    }

    static void literal_bound(const Formula& f, BigInt& top)
    {
        if (f.kind == Formula::Kind::Int) top = std::max(top, BigInt(abs(f.value)));
        for (const auto& a : f.args) literal_bound(*a, top);
        if (f.lhs) literal_bound(*f.lhs, top);
        if (f.rhs) literal_bound(*f.rhs, top);
    }

    static void vars_in(const Formula& f, std::set<std::string>& out)
    {
        for (const auto& x : free_vars(f)) out.insert(x);
    }

    // Parameters whose value can influence the play: used as a head, inside a
    // predicate, or passed where the callee may use it.
    void scan(const Formula& f, const EqInfo& e, std::set<std::string>& rel)
    {
        using K = Formula::Kind;
        switch (f.kind) {
        case K::Pred:
            for (const auto& a : f.args) vars_in(*a, rel);
            return;
        case K::Arith: vars_in(f, rel); return;
        case K::App:
        case K::Var: {
            FormulaPtr head;
            std::vector<FormulaPtr> args;
            spine(std::make_shared<Formula>(f), head, args);
            bool param_head = e.index.count(head->name) > 0;
            if (param_head) rel.insert(head->name);
            auto it = eq_index_.find(head->name);
            for (std::size_t j = 0; j < args.size(); ++j) {
                if (!param_head && it != eq_index_.end() && !eqs_[it->second].relevant.at(j)) continue;
                const Formula& a = *args[j];
                if (a.kind == K::Var) {
                    if (e.index.count(a.name)) rel.insert(a.name);
                } else {
                    scan(a, e, rel);
                }
            }
            return;
        }
        default: break;
        }
        if (f.lhs) scan(*f.lhs, e, rel);
        if (f.rhs) scan(*f.rhs, e, rel);
    }

    // ---- interning

    int pos_id(int eq, const Formula* f)
    {
        auto [it, fresh] = pos_index_.try_emplace({eq, f}, static_cast<int>(pos_.size()));
        if (fresh) pos_.push_back({eq, f});
        return it->second;
    }

    int root_pos(int eq) { return pos_id(eq, eqs_[eq].rhs.get()); }

    int intern_val(ValRec v)
    {
        std::string k;
        switch (v.k) {
        case ValRec::K::Int: k = v.n.cls < 0 ? "L" : v.n.cls > 0 ? "U" : "i" + to_string(v.n.n); break;
        case ValRec::K::Bot: k = "b"; break;
        case ValRec::K::Set: k = "s" + std::to_string(v.set); break;
        case ValRec::K::Clo:
            k = "c" + std::to_string(v.eq);
            for (int a : v.args) k += "," + std::to_string(a);
            break;
        }
        auto [it, fresh] = val_index_.try_emplace(k, static_cast<int>(vals_.size()));
        if (fresh) vals_.push_back(std::move(v));
        return it->second;
    }

    int intern_env(const std::vector<int>& env)
    {
        auto [it, fresh] = env_index_.try_emplace(env, static_cast<int>(envs_.size()));
        if (fresh) envs_.push_back(env);
        return it->second;
    }

    int node(const NodeKey& key)
    {
        auto [it, fresh] = node_index_.try_emplace(key, static_cast<int>(nodes_.size()));
        if (fresh) {
            Node n;
            n.key = key;
            if (key.kind == 0) {
                const Pos& p = pos_[key.pos];
                if (eqs_[p.eq].rhs.get() == p.f) n.prio = eqs_[p.eq].prio;
            }
            nodes_.push_back(n);
            order_.push_back(it->second);
        }
        return it->second;
    }

    int sink(bool value)
    {
        int& s = value ? sink_true_ : sink_false_;
        if (s < 0) {
            s = static_cast<int>(nodes_.size());
            Node n;
            n.key = {2, value ? 1 : 0, 0, 0, 0};
            n.owner = value ? Player::Refuter : Player::Verifier;
            n.expanded = true;
            nodes_.push_back(n);
            node_index_.emplace(n.key, s);
        }
        return s;
    }

    // ---- evaluation

    AInt exact(BigInt v) const
    {
        AInt a;
        if (abstract_ && v > threshold_) a.cls = 1;
        else if (abstract_ && v < -threshold_) a.cls = -1;
        else a.n = std::move(v);
        return a;
    }

    static AInt half(int cls) { return {cls, 0}; }

    // Sign of a value that is exact or lies on a half-line beyond every literal.
    static int sign(const AInt& a) { return a.cls != 0 ? a.cls : a.n > 0 ? 1 : a.n < 0 ? -1 : 0; }

    AInt add(const AInt& a, const AInt& b) const
    {
        if (a.cls == 0 && b.cls == 0) return exact(a.n + b.n);
        if (a.cls != 0 && b.cls != 0) {
            if (a.cls == b.cls) return a;
            throw Ambiguous{};
        }
        const AInt& h = a.cls != 0 ? a : b;
        const AInt& c = a.cls != 0 ? b : a;
        if (sign(c) == 0 || sign(c) == h.cls) return h;
        throw Ambiguous{};
    }

    AInt neg(const AInt& a) const { return a.cls != 0 ? half(-a.cls) : exact(-a.n); }

    AInt mul(const AInt& a, const AInt& b) const
    {
        if (a.cls == 0 && b.cls == 0) return exact(a.n * b.n);
        int sa = sign(a), sb = sign(b);
        if (sa == 0 || sb == 0) return exact(0);
        // |x| > T and |c| >= 1 keep the product beyond T
        return half(sa * sb);
    }

    AInt eval_int(const Formula& f, const EqInfo& e, const std::vector<int>& env)
    {
        switch (f.kind) {
        case Formula::Kind::Int: return exact(f.value);
        case Formula::Kind::Arith: {
            AInt l = eval_int(*f.lhs, e, env), r = eval_int(*f.rhs, e, env);
            switch (f.arith) {
            case ArithOp::Add: return add(l, r);
            case ArithOp::Sub: return add(l, neg(r));
            case ArithOp::Mul: return mul(l, r);
            }
            return l;
        }
        case Formula::Kind::Var: {
            auto it = e.index.find(f.name);
            if (it == e.index.end()) throw NonGround{"unbound integer '" + f.name + "'"};
            const ValRec& v = vals_[env[it->second]];
            if (v.k != ValRec::K::Int) throw NonGround{"integer '" + f.name + "' has no value"};
            return v.n;
        }
        default: throw NonGround{"not an integer expression: " + to_string(f)};
        }
    }

    bool eval_pred(const Formula& f, const EqInfo& e, const std::vector<int>& env)
    {
        std::vector<AInt> xs;
        bool any = false;
        for (const auto& a : f.args) {
            xs.push_back(eval_int(*a, e, env));
            any = any || xs.back().cls != 0;
        }
        if (!any) {
            std::vector<BigInt> ns;
            for (const auto& x : xs) ns.push_back(x.n);
            return hflz::eval_pred(f.pred, ns);
        }
        if (xs.size() != 2) throw Ambiguous{};
        // exact values never exceed T in magnitude, so a half-line fixes the sign of the difference
        int d;
        if (xs[0].cls != 0 && xs[1].cls != 0) {
            if (xs[0].cls == xs[1].cls) throw Ambiguous{};
            d = xs[0].cls;
        } else {
            d = xs[0].cls != 0 ? xs[0].cls : -xs[1].cls;
        }
        return hflz::eval_pred(f.pred, {BigInt(d), BigInt(0)});
    }

    int value_of(const Formula& a, PKind kind, bool relevant, const EqInfo& e, const std::vector<int>& env)
    {
        if (!relevant) return intern_val({});
        if (kind == PKind::Int) {
            ValRec v;
            v.k = ValRec::K::Int;
            v.n = eval_int(a, e, env);
            return intern_val(std::move(v));
        }
        if (a.kind == Formula::Kind::True || a.kind == Formula::Kind::False) {
            ValRec v;
            v.k = ValRec::K::Set;
            v.set = a.kind == Formula::Kind::True ? all_states() : 0;
            return intern_val(std::move(v));
        }
        FormulaPtr head;
        std::vector<FormulaPtr> args;
        spine(std::make_shared<Formula>(a), head, args);
        if (head->kind != Formula::Kind::Var) throw NonGround{"argument is not a closure: " + to_string(a)};
        ValRec v;
        v.k = ValRec::K::Clo;
        auto pit = e.index.find(head->name);
        if (pit != e.index.end()) {
            const ValRec& base = vals_[env[pit->second]];
            if (args.empty()) return env[pit->second];
            if (base.k != ValRec::K::Clo) throw NonGround{"application of a non-closure '" + head->name + "'"};
            v.eq = base.eq;
            v.args = base.args;
        } else {
            v.eq = eq_index_.at(head->name);
        }
        for (const auto& x : args) {
            std::size_t j = v.args.size();
            const EqInfo& callee = eqs_[v.eq];
            if (j >= callee.params.size()) fail(ErrorKind::Type, "too many arguments in " + to_string(a));
            v.args.push_back(value_of(*x, callee.kinds[j], callee.relevant[j], e, env));
        }
        return intern_val(std::move(v));
    }

    Call resolve_call(const Formula& f, int eq, int state, const std::vector<int>& env)
    {
        const EqInfo& e = eqs_[eq];
        FormulaPtr head;
        std::vector<FormulaPtr> args;
        spine(std::make_shared<Formula>(f), head, args);
        Call c;
        auto pit = e.index.find(head->name);
        if (pit != e.index.end()) {
            const ValRec& v = vals_[env[pit->second]];
            if (v.k == ValRec::K::Set) {
                if (!args.empty()) fail(ErrorKind::Type, "prop parameter applied: " + to_string(f));
                c.target = sink(v.set >> state & 1);
                return c;
            }
            if (v.k != ValRec::K::Clo) throw NonGround{"parameter '" + head->name + "' has no closure"};
            invoked_ = true;
            c.callee = v.eq;
            c.vals = v.args;
        } else {
            c.callee = eq_index_.at(head->name);
        }
        const EqInfo& callee = eqs_[c.callee];
        int guessable = 0;
        for (std::size_t j = 0; j < args.size(); ++j) {
            std::size_t k = c.vals.size() + j;
            if (k < callee.kinds.size() && callee.kinds[k] == PKind::Prop && callee.relevant[k] && !is_direct(*args[j], e))
                ++guessable;
        }
        bool guess = guessable > 0 && lts_.size() * static_cast<std::size_t>(guessable) <= kMaxGuessBits;
        for (const auto& a : args) {
            std::size_t k = c.vals.size();
            if (k >= callee.params.size()) fail(ErrorKind::Type, "too many arguments in " + to_string(f));
            if (guess && callee.kinds[k] == PKind::Prop && callee.relevant[k] && !is_direct(*a, e)) {
                c.slots.push_back(static_cast<int>(k));
                c.guessed.push_back(a.get());
                c.vals.push_back(-1);
            } else {
                c.vals.push_back(value_of(*a, callee.kinds[k], callee.relevant[k], e, env));
            }
        }
        if (c.vals.size() != callee.params.size())
            fail(ErrorKind::Type, "partial application in prop position: " + to_string(f));
        if (c.slots.empty()) c.target = node({0, root_pos(c.callee), state, intern_env(c.vals), 0});
        return c;
    }

    // Arguments whose value is known without a guess.
    static bool is_direct(const Formula& a, const EqInfo& e)
    {
        return (a.kind == Formula::Kind::Var && e.index.count(a.name)) || a.kind == Formula::Kind::True ||
               a.kind == Formula::Kind::False;
    }

    std::uint64_t all_states() const
    {
        return lts_.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << lts_.size()) - 1;
    }

    std::optional<bool> immediate(const Formula& f, int eq, int env_id)
    {
        switch (f.kind) {
        case Formula::Kind::True: return true;
        case Formula::Kind::False: return false;
        case Formula::Kind::Pred: return eval_pred(f, eqs_[eq], envs_[env_id]);
        default: return std::nullopt;
        }
    }

    // Children of a connective worth a node: none when a leaf decides it,
    // and leaves that cannot matter are dropped.
    std::vector<const Formula*> live_children(const Formula& f, int eq, int env_id, std::optional<bool>& decided)
    {
        bool is_or = f.kind == Formula::Kind::Or;
        std::vector<const Formula*> out;
        for (const Formula* c : {f.lhs.get(), f.rhs.get()}) {
            std::optional<bool> v = immediate(*c, eq, env_id);
            if (!v) out.push_back(c);
            else if (*v == is_or) {
                decided = is_or;
                return {};
            }
        }
        if (out.empty()) decided = !is_or;
        return out;
    }

    int resolve(const Formula& f, int eq, int state, int env_id)
    {
        using K = Formula::Kind;
        switch (f.kind) {
        case K::Or:
        case K::And: {
            std::optional<bool> decided;
            auto live = live_children(f, eq, env_id, decided);
            if (decided) return sink(*decided);
            if (live.size() == 1) return resolve(*live[0], eq, state, env_id);
            break;
        }
        case K::True: return sink(true);
        case K::False: return sink(false);
        case K::Pred: return sink(eval_pred(f, eqs_[eq], envs_[env_id]));
        case K::Var:
        case K::App: {
            Call c = resolve_call(f, eq, state, envs_[env_id]);
            if (c.target >= 0) return c.target;
            break;
        }
        default: break;
        }
        return node({0, pos_id(eq, &f), state, env_id, 0});
    }

    void expand(int id)
    {
        NodeKey key = nodes_[id].key;
        Player owner = Player::Verifier;
        std::vector<int> succ;
        invoked_ = false;
        auto add = [&](int target) {
            succ.push_back(target);
            if (invoked_) invocations_.emplace_back(id, target);
            invoked_ = false;
        };
        const Pos p = pos_[key.pos];
        const Formula& f = *p.f;
        const std::vector<int> env = envs_[key.env];
        using K = Formula::Kind;
        if (key.kind == 1) {
            owner = Player::Refuter;
            Call c = resolve_call(f, p.eq, key.state, env);
            std::size_t n = lts_.size();
            for (std::size_t i = 0; i < c.slots.size(); ++i) {
                std::uint64_t set = (static_cast<std::uint64_t>(key.extra) >> (i * n)) & ((std::uint64_t{1} << n) - 1);
                c.vals[c.slots[i]] = intern_val({ValRec::K::Set, {}, set, -1, {}});
            }
            add(node({0, root_pos(c.callee), key.state, intern_env(c.vals), 0}));
            for (std::size_t i = 0; i < c.slots.size(); ++i) {
                std::uint64_t set = vals_[c.vals[c.slots[i]]].set;
                for (std::size_t q = 0; q < n; ++q)
                    if (set >> q & 1) add(resolve(*c.guessed[i], p.eq, static_cast<int>(q), key.env));
            }
        } else {
            switch (f.kind) {
            case K::True: owner = Player::Refuter; break;
            case K::False: break;
            case K::Pred: owner = eval_pred(f, eqs_[p.eq], env) ? Player::Refuter : Player::Verifier; break;
            case K::Or:
            case K::And:
            {
                owner = f.kind == K::Or ? Player::Verifier : Player::Refuter;
                std::optional<bool> decided;
                auto live = live_children(f, p.eq, key.env, decided);
                if (decided) add(sink(*decided));
                for (const Formula* c : live) add(resolve(*c, p.eq, key.state, key.env));
                break;
            }
            case K::Diamond:
            case K::Box:
                owner = f.kind == K::Diamond ? Player::Verifier : Player::Refuter;
                for (StateId t : lts_.successors(key.state, f.name)) add(resolve(*f.lhs, p.eq, t, key.env));
                break;
            case K::Var:
            case K::App: {
                Call c = resolve_call(f, p.eq, key.state, env);
                if (c.target >= 0) {
                    add(c.target);
                    break;
                }
                std::size_t bits = lts_.size() * c.slots.size();
                for (std::uint64_t g = 0; g < (std::uint64_t{1} << bits); ++g)
                    add(node({1, key.pos, key.state, key.env, static_cast<int>(g)}));
                break;
            }
            default: fail(ErrorKind::Type, "unexpected formula in equation: " + to_string(f));
            }
        }
        Node& n = nodes_[id];
        n.owner = owner;
        n.succ = std::move(succ);
        n.expanded = true;
    }

public:
    static Verdict::Kind winner_kind(const GroundGame& gg, const GameSolution& s)
    {
        return s.winner[gg.game.init] == Player::Verifier ? Verdict::Kind::Valid : Verdict::Kind::Invalid;
    }
};

}  // namespace

bool closure_call_on_cycle(const GroundGame& gg)
{
    if (gg.invocations.empty()) return false;
    // iterative Tarjan
    const auto& succ = gg.game.succ;
    std::size_t n = succ.size();
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on(n, 0);
    std::vector<int> stack;
    std::vector<std::pair<int, std::size_t>> work;
    int counter = 0, comps = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (index[r] >= 0) continue;
        work.emplace_back(static_cast<int>(r), 0);
        while (!work.empty()) {
            auto& [v, i] = work.back();
            if (i == 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on[v] = 1;
            }
            if (i < succ[v].size()) {
                int w = succ[v][i++];
                if (index[w] < 0) work.emplace_back(w, 0);
                else if (on[w]) low[v] = std::min(low[v], index[w]);
                continue;
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on[w] = 0;
                    comp[w] = comps;
                } while (w != v);
                ++comps;
            }
            int done = v;
            work.pop_back();
            if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
        }
    }
    for (const auto& [u, v] : gg.invocations)
        if (comp[u] == comp[v]) return true;
    return false;
}

namespace {

// Integer half-lines first; concrete integers when they prove too coarse.
template <typename F>
auto with_abstraction(const Lts& lts, const Hes& h, F&& run)
{
    try {
        Engine e(lts, h, true);
        return run(e);
    } catch (const Ambiguous&) {
    }
    Engine e(lts, h, false);
    return run(e);
}

}  // namespace

GroundGame ground_game(const Lts& lts, const Hes& h, std::size_t budget)
{
    try {
        return with_abstraction(lts, h, [&](Engine& e) { return e.explore(budget, nullptr); });
    } catch (const NonGround& ng) {
        fail(ErrorKind::Unsupported, "non-ground configuration: " + ng.what);
    }
}

Verdict eval_hflz(const Lts& lts, const Hes& h, std::size_t budget)
{
    try {
        return with_abstraction(lts, h, [&](Engine& e) {
            std::optional<Verdict::Kind> early;
            bool cyclic = false;
            auto partial = [&](Engine& eng) {
                GroundGame pess = eng.snapshot(Player::Verifier);
                cyclic = closure_call_on_cycle(pess);
                if (cyclic) return true;
                if (solve_parity_game(pess.game).winner[pess.game.init] == Player::Verifier) {
                    early = Verdict::Kind::Valid;
                    return true;
                }
                GroundGame opt = eng.snapshot(Player::Refuter);
                if (solve_parity_game(opt.game).winner[opt.game.init] == Player::Refuter) {
                    early = Verdict::Kind::Invalid;
                    return true;
                }
                return false;
            };
            GroundGame gg = e.explore(budget, partial);
            Verdict out;
            if (!early && gg.complete) {
                cyclic = closure_call_on_cycle(gg);
                if (!cyclic) early = Engine::winner_kind(gg, solve_parity_game(gg.game));
            }
            if (!early && !cyclic) partial(e);
            if (early) out.kind = *early;
            else out.reason = cyclic ? "closure call on a cycle" : "budget";
            return out;
        });
    } catch (const NonGround&) {
        return {Verdict::Kind::Unknown, "non-ground"};
    }
}

}  // namespace hflz
