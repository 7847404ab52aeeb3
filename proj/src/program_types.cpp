#include "hflz/program.hpp"


namespace hflz {

namespace {

// Unification variables live in a union-find table.
struct UNode {
    enum class Kind { Var, Unit, Int, Arrow };
    Kind kind = Kind::Var;
    int arg = -1, res = -1;
    int parent = -1;
};

class Unifier {
public:
    int fresh()
    {
        nodes_.push_back({});
        return static_cast<int>(nodes_.size()) - 1;
    }
    int unit()
    {
        int n = fresh();
        nodes_[n].kind = UNode::Kind::Unit;
        return n;
    }
    int integer()
    {
        int n = fresh();
        nodes_[n].kind = UNode::Kind::Int;
        return n;
    }
    int arrow(int a, int r)
    {
        int n = fresh();
        nodes_[n].kind = UNode::Kind::Arrow;
        nodes_[n].arg = a;
        nodes_[n].res = r;
        return n;
    }

    int find(int n)
    {
        while (nodes_[n].parent >= 0) {
            int p = nodes_[n].parent;
            if (nodes_[p].parent >= 0) nodes_[n].parent = nodes_[p].parent;
            n = p;
        }
        return n;
    }

    bool unify(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return true;
        UNode& x = nodes_[a];
        UNode& y = nodes_[b];
        if (x.kind == UNode::Kind::Var) {
            if (occurs(a, b)) return false;
            x.parent = b;
            return true;
        }
        if (y.kind == UNode::Kind::Var) {
            if (occurs(b, a)) return false;
            y.parent = a;
            return true;
        }
        if (x.kind != y.kind) return false;
        if (x.kind != UNode::Kind::Arrow) return true;
        int xa = x.arg, xr = x.res, ya = y.arg, yr = y.res;
        nodes_[b].parent = a;
        return unify(xa, ya) && unify(xr, yr);
    }

    SimpleTypePtr resolve(int n)
    {
        n = find(n);
        const UNode& u = nodes_[n];
        switch (u.kind) {
        case UNode::Kind::Var:
        case UNode::Kind::Unit: return SimpleType::unit();
        case UNode::Kind::Int: return SimpleType::integer();
        case UNode::Kind::Arrow: return SimpleType::arrow(resolve(u.arg), resolve(u.res));
        }
        return SimpleType::unit();
    }

private:
    std::vector<UNode> nodes_;

    bool occurs(int v, int t)
    {
        t = find(t);
        if (t == v) return true;
        if (nodes_[t].kind != UNode::Kind::Arrow) return false;
        return occurs(v, nodes_[t].arg) || occurs(v, nodes_[t].res);
    }
};

class Inferencer {
public:
    explicit Inferencer(const Program& p) : p_(p) {}

    ProgramTyping run()
    {
        for (const auto& d : p_.defs) global_[d.name] = u_.fresh();
        for (const auto& d : p_.defs) {
            std::map<std::string, int> env;
            int ty = u_.unit();
            std::vector<int> ps;
            for (const auto& x : d.params) {
                int v = u_.fresh();
                env[x] = v;
                ps.push_back(v);
            }
            current_ = d.name;
            int body = infer(*d.body, env);
            expect(body, u_.unit(), *d.body, "function body must have type unit");
            for (auto it = ps.rbegin(); it != ps.rend(); ++it) ty = u_.arrow(*it, ty);
            if (!u_.unify(global_[d.name], ty))
                fail(ErrorKind::Type, "type mismatch in definition of '" + d.name + "'");
            param_vars_[d.name] = std::move(ps);
        }

        ProgramTyping out;
        for (const auto& d : p_.defs) {
            SimpleTypePtr t = u_.resolve(global_[d.name]);
            check_result_positions(*t, d.name);
            out.globals[d.name] = t;
            TypeEnv& loc = out.locals[d.name];
            for (std::size_t i = 0; i < d.params.size(); ++i) loc[d.params[i]] = u_.resolve(param_vars_[d.name][i]);
        }
        for (const auto& [t, vs] : abs_vars_) {
            std::vector<SimpleTypePtr> rs;
            for (int v : vs) {
                SimpleTypePtr r = u_.resolve(v);
                check_result_positions(*r, "an abstraction parameter");
                rs.push_back(r);
            }
            out.abs_params[t] = rs;
        }
        const Definition* main = p_.find(p_.main);
        if (main && !main->params.empty()) fail(ErrorKind::Type, "'" + p_.main + "' must not take parameters");
        return out;
    }

private:
    const Program& p_;
    Unifier u_;
    std::map<std::string, int> global_;
    std::map<std::string, std::vector<int>> param_vars_;
    std::unordered_map<const Term*, std::vector<int>> abs_vars_;
    std::string current_;

    void expect(int got, int want, const Term& at, const std::string& what)
    {
        if (!u_.unify(got, want))
            fail(ErrorKind::Type, "type mismatch in '" + current_ + "' at " + describe(at.pos) + ": " + what +
                                      " (term: " + to_string(at) + ")");
    }

    int infer(const Term& t, std::map<std::string, int>& env)
    {
        switch (t.kind) {
        case Term::Kind::Unit: return u_.unit();
        case Term::Kind::Int: return u_.integer();
        case Term::Kind::Var: {
            auto it = env.find(t.name);
            if (it != env.end()) return it->second;
            auto g = global_.find(t.name);
            if (g != global_.end()) return g->second;
            fail(ErrorKind::Type, "unbound variable '" + t.name + "' in '" + current_ + "' at " + describe(t.pos));
        }
        case Term::Kind::Arith:
            expect(infer(*t.lhs, env), u_.integer(), *t.lhs, "arithmetic operand must be int");
            expect(infer(*t.rhs, env), u_.integer(), *t.rhs, "arithmetic operand must be int");
            return u_.integer();
        case Term::Kind::If:
            for (const auto& a : t.args) expect(infer(*a, env), u_.integer(), *a, "predicate argument must be int");
            expect(infer(*t.lhs, env), u_.unit(), *t.lhs, "branch must have type unit");
            expect(infer(*t.rhs, env), u_.unit(), *t.rhs, "branch must have type unit");
            return u_.unit();
        case Term::Kind::Event:
            expect(infer(*t.lhs, env), u_.unit(), *t.lhs, "event continuation must have type unit");
            return u_.unit();
        case Term::Kind::NonDet:
            expect(infer(*t.lhs, env), u_.unit(), *t.lhs, "nondeterministic branch must have type unit");
            expect(infer(*t.rhs, env), u_.unit(), *t.rhs, "nondeterministic branch must have type unit");
            return u_.unit();
        case Term::Kind::App: {
            int f = infer(*t.lhs, env);
            int a = infer(*t.rhs, env);
            int r = u_.fresh();
            expect(f, u_.arrow(a, r), t, "argument does not match the function type");
            return r;
        }
        case Term::Kind::Abs: {
            std::map<std::string, int> inner = env;
            std::vector<int> vs;
            for (const auto& x : t.params) {
                int v = u_.fresh();
                inner[x] = v;
                vs.push_back(v);
            }
            int body = infer(*t.lhs, inner);
            expect(body, u_.unit(), *t.lhs, "abstraction body must have type unit");
            abs_vars_[&t] = vs;
            int ty = body;
            for (auto it = vs.rbegin(); it != vs.rend(); ++it) ty = u_.arrow(*it, ty);
            return ty;
        }
        }
        return u_.unit();
    }

    static void check_result_positions(const SimpleType& t, const std::string& where)
    {
        if (t.kind != SimpleType::Kind::Arrow) return;
        if (t.res->kind == SimpleType::Kind::Int)
            fail(ErrorKind::Type, "int occurs in a result position in the type of " + where);
        check_result_positions(*t.arg, where);
        check_result_positions(*t.res, where);
    }
};

}  // namespace

ProgramTyping infer_program_types(const Program& p) { return Inferencer(p).run(); }

TypeEnv typecheck_program(const Program& p) { return infer_program_types(p).globals; }

SimpleTypePtr type_of_term(const ProgramTyping& typing, const TypeEnv& locals, const Term& t)
{
    switch (t.kind) {
    case Term::Kind::Int:
    case Term::Kind::Arith: return SimpleType::integer();
    case Term::Kind::Var: {
        auto it = locals.find(t.name);
        if (it != locals.end()) return it->second;
        auto g = typing.globals.find(t.name);
        if (g != typing.globals.end()) return g->second;
        fail(ErrorKind::Type, "unbound variable '" + t.name + "'");
    }
    case Term::Kind::App: {
        SimpleTypePtr f = type_of_term(typing, locals, *t.lhs);
        if (f->kind != SimpleType::Kind::Arrow) fail(ErrorKind::Type, "application of a non-function: " + to_string(t));
        return f->res;
    }
    case Term::Kind::Abs: {
        auto it = typing.abs_params.find(&t);
        if (it == typing.abs_params.end()) fail(ErrorKind::Type, "abstraction not covered by type inference");
        SimpleTypePtr ty = SimpleType::unit();
        for (auto r = it->second.rbegin(); r != it->second.rend(); ++r) ty = SimpleType::arrow(*r, ty);
        return ty;
    }
    default: return SimpleType::unit();
    }
}

}  // namespace hflz
