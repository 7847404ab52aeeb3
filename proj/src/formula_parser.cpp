#include "hflz/formula.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

namespace hflz {

namespace {

using detail::Token;
using detail::TokenStream;

const std::set<std::string> kKeywords = {"true", "false", "mu", "nu", "even", "odd", "prop", "int"};

std::vector<std::string> formula_symbols()
{
    return {"\\/", "/\\", "\\", "->", "<=", ">=", "!=", "<", ">", "[", "]",
            "(", ")", ".", ":", ";", "=", "+", "-", "*"};
}

class FormulaParser {
public:
    explicit FormulaParser(TokenStream& ts) : ts_(ts) {}

    bool at_ident() const { return ts_.peek().kind == Token::Kind::Ident && !kKeywords.count(ts_.peek().text); }

    std::string ident()
    {
        if (!at_ident()) ts_.error("expected identifier");
        return ts_.next().text;
    }

    HflTypePtr type()
    {
        HflTypePtr a;
        if (ts_.accept("prop")) a = HflType::prop();
        else if (ts_.accept("int")) a = HflType::integer();
        else if (ts_.accept("(")) {
            a = type();
            ts_.expect(")");
        } else {
            ts_.error("expected a type");
        }
        if (ts_.accept("->")) return HflType::arrow(a, type());
        return a;
    }

    FormulaPtr formula()
    {
        if (ts_.is_symbol("\\") || ts_.is("mu") || ts_.is("nu")) {
            Token t = ts_.next();
            std::string x = ident();
            HflTypePtr ty;
            if (ts_.accept(":")) ty = type();
            ts_.expect(".");
            FormulaPtr body = formula();
            if (t.text == "\\") return fml::lam(x, ty, body);
            return t.text == "mu" ? fml::mu(x, ty, body) : fml::nu(x, ty, body);
        }
        return disjunction();
    }

private:
    TokenStream& ts_;

    FormulaPtr disjunction()
    {
        FormulaPtr left = conjunction();
        while (ts_.accept("\\/")) left = fml::disj(left, conjunction());
        return left;
    }

    FormulaPtr conjunction()
    {
        FormulaPtr left = comparison();
        while (ts_.accept("/\\")) left = fml::conj(left, comparison());
        return left;
    }

    bool at_relop() const
    {
        for (const char* s : {"=", "!=", "<", "<=", ">", ">="})
            if (ts_.is_symbol(s)) return true;
        return false;
    }

    FormulaPtr comparison()
    {
        FormulaPtr left = sum();
        if (!at_relop()) return left;
        std::string op = ts_.next().text;
        FormulaPtr right = sum();
        PredOp p = op == "=" ? PredOp::Eq
                 : op == "!=" ? PredOp::Neq
                 : op == "<" ? PredOp::Lt
                 : op == "<=" ? PredOp::Le
                 : op == ">" ? PredOp::Gt
                 : PredOp::Ge;
        return fml::pred(p, {left, right});
    }

    FormulaPtr sum()
    {
        FormulaPtr left = product();
        while (ts_.is_symbol("+") || ts_.is_symbol("-")) {
            ArithOp op = ts_.next().text == "+" ? ArithOp::Add : ArithOp::Sub;
            left = fml::arith(op, left, product());
        }
        return left;
    }

    FormulaPtr product()
    {
        FormulaPtr left = unary();
        while (ts_.accept("*")) left = fml::arith(ArithOp::Mul, left, unary());
        return left;
    }

    FormulaPtr unary()
    {
        if (ts_.is_symbol("<") || ts_.is_symbol("[")) {
            bool dia = ts_.next().text == "<";
            std::string a = ident();
            ts_.expect(dia ? ">" : "]");
            FormulaPtr body = unary();
            return dia ? fml::diamond(a, body) : fml::box(a, body);
        }
        return application();
    }

    bool starts_atom() const
    {
        return at_ident() || ts_.peek().kind == Token::Kind::Int || ts_.is_symbol("(") || ts_.is("true") ||
               ts_.is("false") || ts_.is("even") || ts_.is("odd");
    }

    FormulaPtr application()
    {
        FormulaPtr head = atom();
        while (starts_atom()) head = fml::app(head, atom());
        return head;
    }

    FormulaPtr atom()
    {
        if (ts_.accept("true")) return fml::tt();
        if (ts_.accept("false")) return fml::ff();
        if (ts_.peek().kind == Token::Kind::Int) return fml::integer(BigInt(ts_.next().text));
        if (ts_.is_symbol("-") && ts_.peek(1).kind == Token::Kind::Int) {
            ts_.next();
            return fml::integer(-BigInt(ts_.next().text));
        }
        if (ts_.is("even") || ts_.is("odd")) {
            PredOp p = ts_.next().text == "even" ? PredOp::Even : PredOp::Odd;
            ts_.expect("(");
            FormulaPtr a = formula();
            ts_.expect(")");
            return fml::pred(p, {a});
        }
        if (at_ident()) return fml::var(ident());
        if (ts_.accept("(")) {
            FormulaPtr f = formula();
            ts_.expect(")");
            return f;
        }
        ts_.error("expected a formula");
    }
};

// Unification over HFL types; unresolved variables become Prop.
class TypeInference {
public:
    int fresh()
    {
        nodes_.push_back({});
        return static_cast<int>(nodes_.size()) - 1;
    }

    int of(const HflTypePtr& t)
    {
        int n = fresh();
        nodes_[n].kind = t->kind == HflType::Kind::Prop ? K::Prop : t->kind == HflType::Kind::Int ? K::Int : K::Arrow;
        if (t->kind == HflType::Kind::Arrow) {
            int a = of(t->arg);
            int r = of(t->res);
            nodes_[n].arg = a;
            nodes_[n].res = r;
        }
        return n;
    }

    int prop() { return of(HflType::prop()); }
    int integer() { return of(HflType::integer()); }
    int arrow(int a, int r)
    {
        int n = fresh();
        nodes_[n].kind = K::Arrow;
        nodes_[n].arg = a;
        nodes_[n].res = r;
        return n;
    }

    void unify(int a, int b, const std::string& where)
    {
        if (!unify_rec(a, b)) fail(ErrorKind::Type, "ill-typed formula: type mismatch in " + where);
    }

    HflTypePtr resolve(int n)
    {
        n = find(n);
        switch (nodes_[n].kind) {
        case K::Var:
        case K::Prop: return HflType::prop();
        case K::Int: return HflType::integer();
        case K::Arrow: return HflType::arrow(resolve(nodes_[n].arg), resolve(nodes_[n].res));
        }
        return HflType::prop();
    }

    int infer(const Formula& f, std::map<std::string, int>& env)
    {
        auto where = [&] { return to_string(f); };
        switch (f.kind) {
        case Formula::Kind::True:
        case Formula::Kind::False: return prop();
        case Formula::Kind::Int: return integer();
        case Formula::Kind::Arith:
            unify(infer(*f.lhs, env), integer(), where());
            unify(infer(*f.rhs, env), integer(), where());
            return integer();
        case Formula::Kind::Pred:
            for (const auto& a : f.args) unify(infer(*a, env), integer(), where());
            return prop();
        case Formula::Kind::Or:
        case Formula::Kind::And:
            unify(infer(*f.lhs, env), prop(), where());
            unify(infer(*f.rhs, env), prop(), where());
            return prop();
        case Formula::Kind::Diamond:
        case Formula::Kind::Box: unify(infer(*f.lhs, env), prop(), where()); return prop();
        case Formula::Kind::Var: {
            auto it = env.find(f.name);
            if (it != env.end()) return it->second;
            if (strict_) fail(ErrorKind::Type, "unbound variable '" + f.name + "' in formula");
            int v = fresh();
            env[f.name] = v;
            return v;
        }
        case Formula::Kind::Mu:
        case Formula::Kind::Nu:
        case Formula::Kind::Lambda: {
            int v = f.type ? of(f.type) : fresh();
            binders_[&f] = v;
            auto saved = env.find(f.name);
            std::optional<int> old = saved == env.end() ? std::nullopt : std::optional<int>(saved->second);
            env[f.name] = v;
            int body = infer(*f.lhs, env);
            if (old) env[f.name] = *old;
            else env.erase(f.name);
            if (f.kind == Formula::Kind::Lambda) return arrow(v, body);
            unify(v, body, where());
            return v;
        }
        case Formula::Kind::App: {
            int fn = infer(*f.lhs, env);
            int a = infer(*f.rhs, env);
            int r = fresh();
            unify(fn, arrow(a, r), where());
            return r;
        }
        }
        return prop();
    }

    FormulaPtr fill(const FormulaPtr& f)
    {
        if (f->kind == Formula::Kind::True || f->kind == Formula::Kind::False || f->kind == Formula::Kind::Int ||
            f->kind == Formula::Kind::Var)
            return f;
        auto copy = std::make_shared<Formula>(*f);
        auto it = binders_.find(f.get());
        if (it != binders_.end()) copy->type = resolve(it->second);
        for (auto& a : copy->args) a = fill(a);
        if (copy->lhs) copy->lhs = fill(copy->lhs);
        if (copy->rhs) copy->rhs = fill(copy->rhs);
        return copy;
    }

    bool strict_ = true;

private:
    enum class K { Var, Prop, Int, Arrow };
    struct Node {
        K kind = K::Var;
        int arg = -1, res = -1, parent = -1;
    };
    std::vector<Node> nodes_;
    std::unordered_map<const Formula*, int> binders_;

    int find(int n)
    {
        while (nodes_[n].parent >= 0) n = nodes_[n].parent;
        return n;
    }

    bool occurs(int v, int t)
    {
        t = find(t);
        if (t == v) return true;
        return nodes_[t].kind == K::Arrow && (occurs(v, nodes_[t].arg) || occurs(v, nodes_[t].res));
    }

    bool unify_rec(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return true;
        if (nodes_[a].kind == K::Var) {
            if (occurs(a, b)) return false;
            nodes_[a].parent = b;
            return true;
        }
        if (nodes_[b].kind == K::Var) return unify_rec(b, a);
        if (nodes_[a].kind != nodes_[b].kind) return false;
        if (nodes_[a].kind != K::Arrow) return true;
        int aa = nodes_[a].arg, ar = nodes_[a].res, ba = nodes_[b].arg, br = nodes_[b].res;
        nodes_[b].parent = a;
        return unify_rec(aa, ba) && unify_rec(ar, br);
    }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text)
{
    TokenStream ts(detail::tokenize(text, formula_symbols()));
    FormulaParser p(ts);
    FormulaPtr f = p.formula();
    if (!ts.at_end()) ts.error("unexpected trailing input");
    TypeInference inf;
    inf.strict_ = false;
    std::map<std::string, int> env;
    inf.infer(*f, env);
    return inf.fill(f);
}

Hes parse_hes(const std::string& text)
{
    TokenStream ts(detail::tokenize(text, formula_symbols()));
    FormulaParser p(ts);
    Hes h;
    struct RawEq {
        Equation eq;
        std::vector<int> param_vars;
    };
    std::vector<RawEq> raw;
    while (!(ts.is("main") && ts.is_symbol(":", 1))) {
        if (ts.at_end()) ts.error("expected 'main:' footer");
        RawEq r;
        r.eq.var = p.ident();
        while (!ts.is_symbol("=")) {
            if (ts.accept("(")) {
                std::string x = p.ident();
                ts.expect(":");
                HflTypePtr t = p.type();
                ts.expect(")");
                r.eq.params.emplace_back(x, t);
            } else {
                r.eq.params.emplace_back(p.ident(), nullptr);
            }
        }
        ts.expect("=");
        if (ts.accept("mu")) r.eq.fix = Fix::Mu;
        else if (ts.accept("nu")) r.eq.fix = Fix::Nu;
        else ts.error("expected 'mu' or 'nu' after '='");
        r.eq.rhs = p.formula();
        ts.expect(";");
        if (std::any_of(raw.begin(), raw.end(), [&](const RawEq& o) { return o.eq.var == r.eq.var; }))
            fail(ErrorKind::Syntax, "duplicate equation variable '" + r.eq.var + "'");
        raw.push_back(std::move(r));
    }
    ts.next();
    ts.expect(":");
    h.main = p.formula();
    ts.expect(";");
    if (!ts.at_end()) ts.error("unexpected input after the main formula");

    TypeInference inf;
    std::map<std::string, int> globals;
    std::vector<int> eq_types;
    for (auto& r : raw) {
        std::vector<int> ps;
        for (const auto& [x, t] : r.eq.params) ps.push_back(t ? inf.of(t) : inf.fresh());
        r.param_vars = ps;
        int ty = inf.prop();
        for (auto it = ps.rbegin(); it != ps.rend(); ++it) ty = inf.arrow(*it, ty);
        globals[r.eq.var] = ty;
    }
    for (auto& r : raw) {
        std::map<std::string, int> env = globals;
        for (std::size_t i = 0; i < r.eq.params.size(); ++i) env[r.eq.params[i].first] = r.param_vars[i];
        inf.unify(inf.infer(*r.eq.rhs, env), inf.prop(), "equation '" + r.eq.var + "'");
    }
    {
        std::map<std::string, int> env = globals;
        inf.unify(inf.infer(*h.main, env), inf.prop(), "main formula");
    }
    for (auto& r : raw) {
        for (std::size_t i = 0; i < r.eq.params.size(); ++i) r.eq.params[i].second = inf.resolve(r.param_vars[i]);
        r.eq.rhs = inf.fill(r.eq.rhs);
        h.equations.push_back(r.eq);
    }
    h.main = inf.fill(h.main);
    typecheck_hes(h);
    return h;
}

}  // namespace hflz
