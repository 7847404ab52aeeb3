#include "hflz/formula.hpp"

#include <algorithm>
#include <sstream>

namespace hflz {

HflTypePtr Equation::type() const
{
    std::vector<HflTypePtr> ts;
    for (const auto& p : params) ts.push_back(p.second ? p.second : HflType::prop());
    return HflType::arrows(ts, HflType::prop());
}

FormulaPtr Equation::as_lambda() const
{
    FormulaPtr f = rhs;
    for (auto it = params.rbegin(); it != params.rend(); ++it) f = fml::lam(it->first, it->second, f);
    return f;
}

int Hes::index_of(const std::string& var) const
{
    for (std::size_t i = 0; i < equations.size(); ++i)
        if (equations[i].var == var) return static_cast<int>(i);
    return -1;
}

int priority(const Hes& h, std::size_t i)
{
    int n = static_cast<int>(h.equations.size());
    return 2 * (n - 1 - static_cast<int>(i)) + (h.equations[i].fix == Fix::Mu ? 1 : 0);
}

HflEnv typecheck_hes(const Hes& h)
{
    HflEnv env;
    for (const auto& e : h.equations) {
        if (env.count(e.var)) fail(ErrorKind::Type, "duplicate equation variable '" + e.var + "'");
        env[e.var] = e.type();
    }
    for (const auto& e : h.equations) {
        if (!is_fixpoint_free(*e.rhs))
            fail(ErrorKind::Type, "right-hand side of '" + e.var + "' contains a fixpoint operator");
        HflEnv local = env;
        for (const auto& [x, t] : e.params) {
            if (!t) fail(ErrorKind::Type, "parameter '" + x + "' of '" + e.var + "' has no type");
            local[x] = t;
        }
        HflTypePtr t = typecheck_formula(local, *e.rhs);
        if (t->kind != HflType::Kind::Prop)
            fail(ErrorKind::Type, "right-hand side of '" + e.var + "' has type " + to_string(*t) + ", expected prop");
    }
    if (!h.main) fail(ErrorKind::Type, "HES has no main formula");
    if (!is_fixpoint_free(*h.main)) fail(ErrorKind::Type, "main formula contains a fixpoint operator");
    HflTypePtr m = typecheck_formula(env, *h.main);
    if (m->kind != HflType::Kind::Prop) fail(ErrorKind::Type, "main formula has type " + to_string(*m));
    return env;
}

FormulaPtr hes_to_formula(const Hes& h)
{
    std::vector<FormulaPtr> bodies;
    for (const auto& e : h.equations) bodies.push_back(e.as_lambda());
    FormulaPtr main = h.main;
    for (std::size_t k = h.equations.size(); k-- > 0;) {
        const Equation& e = h.equations[k];
        FormulaPtr fx = e.fix == Fix::Mu ? fml::mu(e.var, e.type(), bodies[k]) : fml::nu(e.var, e.type(), bodies[k]);
        std::map<std::string, FormulaPtr> sub{{e.var, fx}};
        for (std::size_t j = 0; j < k; ++j) bodies[j] = substitute(bodies[j], sub);
        main = substitute(main, sub);
    }
    return main;
}

namespace {

class HesBuilder {
public:
    Hes run(const FormulaPtr& f)
    {
        collect_names(*f);
        std::vector<std::pair<std::string, HflTypePtr>> scope;
        hes_.main = lift(f, scope);
        return std::move(hes_);
    }

private:
    Hes hes_;
    std::set<std::string> taken_;

    void collect_names(const Formula& f)
    {
        if (f.kind == Formula::Kind::Var || f.kind == Formula::Kind::Mu || f.kind == Formula::Kind::Nu ||
            f.kind == Formula::Kind::Lambda)
            taken_.insert(f.name);
        for (const auto& a : f.args) collect_names(*a);
        if (f.lhs) collect_names(*f.lhs);
        if (f.rhs) collect_names(*f.rhs);
    }

    std::string fresh(const std::string& base)
    {
        std::string name = base;
        for (int i = 1; hes_.index_of(name) >= 0 || (name != base && taken_.count(name)); ++i)
            name = base + "_" + std::to_string(i);
        taken_.insert(name);
        return name;
    }

    FormulaPtr lift(const FormulaPtr& f, std::vector<std::pair<std::string, HflTypePtr>>& scope)
    {
        switch (f->kind) {
        case Formula::Kind::True:
        case Formula::Kind::False:
        case Formula::Kind::Int:
        case Formula::Kind::Var: return f;
        case Formula::Kind::Lambda: {
            scope.emplace_back(f->name, f->type);
            FormulaPtr body = lift(f->lhs, scope);
            scope.pop_back();
            return fml::lam(f->name, f->type, body);
        }
        case Formula::Kind::Mu:
        case Formula::Kind::Nu: return lift_fixpoint(f, scope);
        default: break;
        }
        auto copy = std::make_shared<Formula>(*f);
        for (auto& a : copy->args) a = lift(a, scope);
        if (copy->lhs) copy->lhs = lift(copy->lhs, scope);
        if (copy->rhs) copy->rhs = lift(copy->rhs, scope);
        return copy;
    }

    FormulaPtr lift_fixpoint(const FormulaPtr& f, std::vector<std::pair<std::string, HflTypePtr>>& scope)
    {
        if (!f->type) fail(ErrorKind::Type, "fixpoint without a type annotation: " + to_string(*f));
        std::set<std::string> fv = free_vars(*f);
        std::vector<std::pair<std::string, HflTypePtr>> captured;
        for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
            bool shadowed = std::any_of(captured.begin(), captured.end(),
                                        [&](const auto& c) { return c.first == it->first; });
            if (fv.count(it->first) && !shadowed) captured.push_back(*it);
        }
        std::reverse(captured.begin(), captured.end());

        std::string name = fresh(f->name);
        std::vector<FormulaPtr> cargs;
        for (const auto& c : captured) cargs.push_back(fml::var(c.first));
        FormulaPtr call = fml::apps(fml::var(name), cargs);

        std::size_t slot = hes_.equations.size();
        hes_.equations.push_back({});
        Equation eq;
        eq.var = name;
        eq.fix = f->kind == Formula::Kind::Mu ? Fix::Mu : Fix::Nu;
        eq.params = captured;

        FormulaPtr body = substitute(f->lhs, {{f->name, call}});
        std::vector<HflTypePtr> rest = arg_types(f->type);
        std::set<std::string> used;
        for (const auto& c : captured) used.insert(c.first);
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (body->kind == Formula::Kind::Lambda) {
                std::string x = body->name;
                FormulaPtr inner = body->lhs;
                if (used.count(x)) {
                    std::string y = x;
                    for (int k = 1; used.count(y) || free_vars(*inner).count(y); ++k) y = x + "_" + std::to_string(k);
                    inner = substitute(inner, {{x, fml::var(y)}});
                    x = y;
                }
                used.insert(x);
                eq.params.emplace_back(x, rest[i]);
                body = inner;
            } else {
                std::string y = "z";
                for (int k = 1; used.count(y) || free_vars(*body).count(y); ++k) y = "z_" + std::to_string(k);
                used.insert(y);
                eq.params.emplace_back(y, rest[i]);
                body = fml::app(body, fml::var(y));
            }
        }
        std::vector<std::pair<std::string, HflTypePtr>> inner_scope = eq.params;
        eq.rhs = lift(body, inner_scope);
        hes_.equations[slot] = eq;
        return call;
    }
};

}  // namespace

Hes formula_to_hes(const FormulaPtr& f) { return HesBuilder().run(f); }

Hes normalize_hes(const Hes& h)
{
    if (h.main->kind == Formula::Kind::Var && h.index_of(h.main->name) >= 0) return h;
    std::string name = "X0";
    for (int i = 1; h.index_of(name) >= 0; ++i) name = "X0_" + std::to_string(i);
    Hes out;
    out.equations.push_back({name, {}, Fix::Nu, h.main});
    for (const auto& e : h.equations) out.equations.push_back(e);
    out.main = fml::var(name);
    return out;
}

Hes dual_hes(const Hes& h)
{
    Hes out;
    for (const auto& e : h.equations) {
        Equation d = e;
        d.fix = e.fix == Fix::Mu ? Fix::Nu : Fix::Mu;
        d.rhs = dual_formula(e.rhs);
        out.equations.push_back(d);
    }
    out.main = dual_formula(h.main);
    return out;
}

bool alpha_equal(const Hes& a, const Hes& b)
{
    if (a.equations.size() != b.equations.size()) return false;
    std::map<std::string, FormulaPtr> rename;
    for (std::size_t i = 0; i < a.equations.size(); ++i)
        rename[b.equations[i].var] = fml::var(a.equations[i].var);
    for (std::size_t i = 0; i < a.equations.size(); ++i) {
        const Equation& x = a.equations[i];
        const Equation& y = b.equations[i];
        if (x.fix != y.fix || x.params.size() != y.params.size()) return false;
        if (!alpha_equal(*x.as_lambda(), *substitute(y.as_lambda(), rename))) return false;
    }
    return alpha_equal(*a.main, *substitute(b.main, rename));
}

FormulaPtr encode_quantifier(Quantifier q, const std::string& x, const FormulaPtr& body, const HflEnv& env)
{
    HflTypePtr int_prop = HflType::arrow(HflType::integer(), HflType::prop());
    HflTypePtr t = typecheck_formula(env, *body);
    if (!equal(*t, *int_prop))
        fail(ErrorKind::Type, "quantifier body must have type int -> prop, found " + to_string(*t));
    std::set<std::string> avoid = free_vars(*body);
    for (const auto& [k, v] : env) avoid.insert(k);
    std::string n = "n";
    for (int i = 1; avoid.count(n) || n == x; ++i) n = "n_" + std::to_string(i);
    FormulaPtr nv = fml::var(n);
    FormulaPtr inst = body->kind == Formula::Kind::Lambda ? substitute(body->lhs, {{body->name, nv}}) : fml::app(body, nv);
    FormulaPtr down = fml::app(fml::var(x), fml::arith(ArithOp::Sub, nv, fml::integer(1)));
    FormulaPtr up = fml::app(fml::var(x), fml::arith(ArithOp::Add, nv, fml::integer(1)));
    FormulaPtr step = q == Quantifier::Exists ? fml::disj(fml::disj(inst, down), up) : fml::conj(fml::conj(inst, down), up);
    FormulaPtr lam = fml::lam(n, HflType::integer(), step);
    FormulaPtr fx = q == Quantifier::Exists ? fml::mu(x, int_prop, lam) : fml::nu(x, int_prop, lam);
    return fml::app(fx, fml::integer(0));
}

std::string print_hes(const Hes& h)
{
    std::ostringstream os;
    for (const auto& e : h.equations) {
        os << e.var;
        for (const auto& [x, t] : e.params) {
            if (!t || t->kind == HflType::Kind::Prop) os << ' ' << x;
            else os << " (" << x << ':' << to_string(*t) << ')';
        }
        os << " =" << to_string(e.fix) << ' ' << to_string(*e.rhs) << ";\n";
    }
    os << "main: " << to_string(*h.main) << ";\n";
    return os.str();
}

}  // namespace hflz
