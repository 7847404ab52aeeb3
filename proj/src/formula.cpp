#include "hflz/formula.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace hflz {

HflTypePtr HflType::prop()
{
    static const HflTypePtr t = std::make_shared<HflType>(HflType{Kind::Prop, nullptr, nullptr});
    return t;
}

HflTypePtr HflType::integer()
{
    static const HflTypePtr t = std::make_shared<HflType>(HflType{Kind::Int, nullptr, nullptr});
    return t;
}

HflTypePtr HflType::arrow(HflTypePtr a, HflTypePtr r)
{
    return std::make_shared<HflType>(HflType{Kind::Arrow, std::move(a), std::move(r)});
}

HflTypePtr HflType::arrows(const std::vector<HflTypePtr>& args, HflTypePtr r)
{
    for (auto it = args.rbegin(); it != args.rend(); ++it) r = arrow(*it, r);
    return r;
}

bool equal(const HflType& a, const HflType& b)
{
    if (a.kind != b.kind) return false;
    if (a.kind != HflType::Kind::Arrow) return true;
    return equal(*a.arg, *b.arg) && equal(*a.res, *b.res);
}

std::string to_string(const HflType& t)
{
    switch (t.kind) {
    case HflType::Kind::Prop: return "prop";
    case HflType::Kind::Int: return "int";
    case HflType::Kind::Arrow: {
        std::string a = to_string(*t.arg);
        if (t.arg->kind == HflType::Kind::Arrow) a = "(" + a + ")";
        return a + " -> " + to_string(*t.res);
    }
    }
    return "?";
}

std::vector<HflTypePtr> arg_types(const HflTypePtr& t)
{
    std::vector<HflTypePtr> out;
    for (HflTypePtr cur = t; cur->kind == HflType::Kind::Arrow; cur = cur->res) out.push_back(cur->arg);
    return out;
}

int order(const HflType& t)
{
    if (t.kind != HflType::Kind::Arrow) return 0;
    int a = t.arg->kind == HflType::Kind::Int ? 0 : order(*t.arg) + 1;
    return std::max(a, order(*t.res));
}

namespace fml {

namespace {
std::shared_ptr<Formula> make(Formula::Kind k)
{
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
}
}  // namespace

FormulaPtr tt()
{
    static const FormulaPtr f = make(Formula::Kind::True);
    return f;
}

FormulaPtr ff()
{
    static const FormulaPtr f = make(Formula::Kind::False);
    return f;
}

FormulaPtr integer(const BigInt& v)
{
    auto f = make(Formula::Kind::Int);
    f->value = v;
    return f;
}

FormulaPtr arith(ArithOp op, FormulaPtr a, FormulaPtr b)
{
    auto f = make(Formula::Kind::Arith);
    f->arith = op;
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
}

FormulaPtr pred(PredOp p, std::vector<FormulaPtr> args)
{
    auto f = make(Formula::Kind::Pred);
    f->pred = p;
    f->args = std::move(args);
    return f;
}

FormulaPtr disj(FormulaPtr a, FormulaPtr b)
{
    auto f = make(Formula::Kind::Or);
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
}

FormulaPtr conj(FormulaPtr a, FormulaPtr b)
{
    auto f = make(Formula::Kind::And);
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
}

FormulaPtr var(const std::string& x)
{
    auto f = make(Formula::Kind::Var);
    f->name = x;
    return f;
}

FormulaPtr diamond(const std::string& a, FormulaPtr body)
{
    auto f = make(Formula::Kind::Diamond);
    f->name = a;
    f->lhs = std::move(body);
    return f;
}

FormulaPtr box(const std::string& a, FormulaPtr body)
{
    auto f = make(Formula::Kind::Box);
    f->name = a;
    f->lhs = std::move(body);
    return f;
}

namespace {
FormulaPtr binder(Formula::Kind k, const std::string& x, HflTypePtr t, FormulaPtr body)
{
    auto f = make(k);
    f->name = x;
    f->type = std::move(t);
    f->lhs = std::move(body);
    return f;
}
}  // namespace

FormulaPtr mu(const std::string& x, HflTypePtr t, FormulaPtr body)
{
    return binder(Formula::Kind::Mu, x, std::move(t), std::move(body));
}

FormulaPtr nu(const std::string& x, HflTypePtr t, FormulaPtr body)
{
    return binder(Formula::Kind::Nu, x, std::move(t), std::move(body));
}

FormulaPtr lam(const std::string& x, HflTypePtr t, FormulaPtr body)
{
    return binder(Formula::Kind::Lambda, x, std::move(t), std::move(body));
}

FormulaPtr app(FormulaPtr fn, FormulaPtr a)
{
    auto f = make(Formula::Kind::App);
    f->lhs = std::move(fn);
    f->rhs = std::move(a);
    return f;
}

FormulaPtr apps(FormulaPtr f, const std::vector<FormulaPtr>& args)
{
    for (const auto& a : args) f = app(f, a);
    return f;
}

FormulaPtr implies(PredOp p, const std::vector<FormulaPtr>& args, FormulaPtr body)
{
    return disj(pred(negate(p), args), std::move(body));
}

}  // namespace fml

void spine(const FormulaPtr& f, FormulaPtr& head, std::vector<FormulaPtr>& args)
{
    args.clear();
    FormulaPtr cur = f;
    while (cur->kind == Formula::Kind::App) {
        args.push_back(cur->rhs);
        cur = cur->lhs;
    }
    std::reverse(args.begin(), args.end());
    head = cur;
}

namespace {

bool is_binder(Formula::Kind k)
{
    return k == Formula::Kind::Mu || k == Formula::Kind::Nu || k == Formula::Kind::Lambda;
}

void free_vars_rec(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out)
{
    if (f.kind == Formula::Kind::Var) {
        if (!bound.count(f.name)) out.insert(f.name);
        return;
    }
    if (is_binder(f.kind)) {
        bool added = bound.insert(f.name).second;
        free_vars_rec(*f.lhs, bound, out);
        if (added) bound.erase(f.name);
        return;
    }
    for (const auto& a : f.args) free_vars_rec(*a, bound, out);
    if (f.lhs) free_vars_rec(*f.lhs, bound, out);
    if (f.rhs) free_vars_rec(*f.rhs, bound, out);
}

}  // namespace

bool is_fixpoint_free(const Formula& f)
{
    if (f.kind == Formula::Kind::Mu || f.kind == Formula::Kind::Nu) return false;
    for (const auto& a : f.args)
        if (!is_fixpoint_free(*a)) return false;
    return (!f.lhs || is_fixpoint_free(*f.lhs)) && (!f.rhs || is_fixpoint_free(*f.rhs));
}

std::set<std::string> free_vars(const Formula& f)
{
    std::set<std::string> bound, out;
    free_vars_rec(f, bound, out);
    return out;
}

FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, FormulaPtr>& sub)
{
    if (sub.empty()) return f;
    switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Int: return f;
    case Formula::Kind::Var: {
        auto it = sub.find(f->name);
        return it == sub.end() ? f : it->second;
    }
    default: break;
    }
    if (is_binder(f->kind)) {
        std::map<std::string, FormulaPtr> inner = sub;
        inner.erase(f->name);
        if (inner.empty()) return f;
        std::set<std::string> body_fv = free_vars(*f->lhs);
        std::set<std::string> avoid;
        bool clash = false;
        for (const auto& [k, v] : inner) {
            if (!body_fv.count(k)) continue;
            std::set<std::string> fv = free_vars(*v);
            avoid.insert(fv.begin(), fv.end());
            if (fv.count(f->name)) clash = true;
        }
        auto copy = std::make_shared<Formula>(*f);
        if (clash) {
            avoid.insert(body_fv.begin(), body_fv.end());
            for (const auto& [k, v] : inner) avoid.insert(k);
            std::string fresh;
            for (int i = 1;; ++i) {
                fresh = f->name + "_" + std::to_string(i);
                if (!avoid.count(fresh)) break;
            }
            copy->name = fresh;
            inner[f->name] = fml::var(fresh);
        }
        copy->lhs = substitute(f->lhs, inner);
        return copy;
    }
    auto copy = std::make_shared<Formula>(*f);
    for (auto& a : copy->args) a = substitute(a, sub);
    if (copy->lhs) copy->lhs = substitute(copy->lhs, sub);
    if (copy->rhs) copy->rhs = substitute(copy->rhs, sub);
    return copy;
}

namespace {

bool same_type(const HflTypePtr& a, const HflTypePtr& b)
{
    if (!a || !b) return !a && !b;
    return equal(*a, *b);
}

bool alpha_rec(const Formula& a, const Formula& b, std::vector<std::pair<std::string, std::string>>& scope)
{
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Int: return a.value == b.value;
    case Formula::Kind::Var:
        for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
            if (it->first == a.name || it->second == b.name) return it->first == a.name && it->second == b.name;
        }
        return a.name == b.name;
    case Formula::Kind::Arith:
        return a.arith == b.arith && alpha_rec(*a.lhs, *b.lhs, scope) && alpha_rec(*a.rhs, *b.rhs, scope);
    case Formula::Kind::Pred:
        if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
        for (std::size_t i = 0; i < a.args.size(); ++i)
            if (!alpha_rec(*a.args[i], *b.args[i], scope)) return false;
        return true;
    case Formula::Kind::Or:
    case Formula::Kind::And:
    case Formula::Kind::App: return alpha_rec(*a.lhs, *b.lhs, scope) && alpha_rec(*a.rhs, *b.rhs, scope);
    case Formula::Kind::Diamond:
    case Formula::Kind::Box: return a.name == b.name && alpha_rec(*a.lhs, *b.lhs, scope);
    case Formula::Kind::Mu:
    case Formula::Kind::Nu:
    case Formula::Kind::Lambda: {
        if (!same_type(a.type, b.type)) return false;
        scope.emplace_back(a.name, b.name);
        bool r = alpha_rec(*a.lhs, *b.lhs, scope);
        scope.pop_back();
        return r;
    }
    }
    return false;
}

}  // namespace

bool alpha_equal(const Formula& a, const Formula& b)
{
    std::vector<std::pair<std::string, std::string>> scope;
    return alpha_rec(a, b, scope);
}

bool equal(const Formula& a, const Formula& b)
{
    if (a.kind != b.kind || a.name != b.name) return false;
    if (is_binder(a.kind) && !same_type(a.type, b.type)) return false;
    switch (a.kind) {
    case Formula::Kind::Int: return a.value == b.value;
    case Formula::Kind::Arith:
        if (a.arith != b.arith) return false;
        break;
    case Formula::Kind::Pred:
        if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
        for (std::size_t i = 0; i < a.args.size(); ++i)
            if (!equal(*a.args[i], *b.args[i])) return false;
        return true;
    default: break;
    }
    if (!a.lhs != !b.lhs || !a.rhs != !b.rhs) return false;
    return (!a.lhs || equal(*a.lhs, *b.lhs)) && (!a.rhs || equal(*a.rhs, *b.rhs));
}

namespace {

[[noreturn]] void type_error(const Formula& f, const std::string& msg)
{
    fail(ErrorKind::Type, "ill-typed formula: " + msg + " in " + to_string(f));
}

void check_valid_type(const HflType& t, const Formula& at)
{
    if (t.kind != HflType::Kind::Arrow) return;
    if (t.res->kind == HflType::Kind::Int) type_error(at, "int in a result position");
    check_valid_type(*t.arg, at);
    check_valid_type(*t.res, at);
}

HflTypePtr tc(HflEnv& env, const Formula& f)
{
    auto expect = [&](const Formula& sub, HflType::Kind k, const char* what) {
        HflTypePtr t = tc(env, sub);
        if (t->kind != k) type_error(f, what);
    };
    switch (f.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return HflType::prop();
    case Formula::Kind::Int: return HflType::integer();
    case Formula::Kind::Arith:
        expect(*f.lhs, HflType::Kind::Int, "arithmetic on a non-integer");
        expect(*f.rhs, HflType::Kind::Int, "arithmetic on a non-integer");
        return HflType::integer();
    case Formula::Kind::Pred:
        if (f.args.size() != pred_arity(f.pred)) type_error(f, "wrong predicate arity");
        for (const auto& a : f.args) expect(*a, HflType::Kind::Int, "predicate argument is not an integer");
        return HflType::prop();
    case Formula::Kind::Or:
    case Formula::Kind::And:
        expect(*f.lhs, HflType::Kind::Prop, "operand of a connective is not a proposition");
        expect(*f.rhs, HflType::Kind::Prop, "operand of a connective is not a proposition");
        return HflType::prop();
    case Formula::Kind::Diamond:
    case Formula::Kind::Box:
        expect(*f.lhs, HflType::Kind::Prop, "modal body is not a proposition");
        return HflType::prop();
    case Formula::Kind::Var: {
        auto it = env.find(f.name);
        if (it == env.end()) fail(ErrorKind::Type, "unbound variable '" + f.name + "' in formula");
        return it->second;
    }
    case Formula::Kind::Mu:
    case Formula::Kind::Nu: {
        if (!f.type) type_error(f, "missing fixpoint type");
        if (f.type->kind == HflType::Kind::Int) type_error(f, "fixpoint of integer type");
        check_valid_type(*f.type, f);
        auto saved = env.find(f.name) != env.end() ? std::optional<HflTypePtr>(env[f.name]) : std::nullopt;
        env[f.name] = f.type;
        HflTypePtr body = tc(env, *f.lhs);
        if (saved) env[f.name] = *saved;
        else env.erase(f.name);
        if (!equal(*body, *f.type)) type_error(f, "fixpoint body has type " + to_string(*body));
        return f.type;
    }
    case Formula::Kind::Lambda: {
        if (!f.type) type_error(f, "missing parameter type");
        check_valid_type(*f.type, f);
        auto saved = env.find(f.name) != env.end() ? std::optional<HflTypePtr>(env[f.name]) : std::nullopt;
        env[f.name] = f.type;
        HflTypePtr body = tc(env, *f.lhs);
        if (saved) env[f.name] = *saved;
        else env.erase(f.name);
        if (body->kind == HflType::Kind::Int) type_error(f, "abstraction returning an integer");
        return HflType::arrow(f.type, body);
    }
    case Formula::Kind::App: {
        HflTypePtr fn = tc(env, *f.lhs);
        if (fn->kind != HflType::Kind::Arrow) type_error(f, "application of a non-function");
        HflTypePtr a = tc(env, *f.rhs);
        if (!equal(*a, *fn->arg)) type_error(f, "argument type " + to_string(*a) + " does not match " + to_string(*fn->arg));
        return fn->res;
    }
    }
    type_error(f, "unknown formula");
}

}  // namespace

HflTypePtr typecheck_formula(const HflEnv& env, const Formula& f)
{
    HflEnv e = env;
    return tc(e, f);
}

FormulaPtr dual_formula(const FormulaPtr& f)
{
    switch (f->kind) {
    case Formula::Kind::True: return fml::ff();
    case Formula::Kind::False: return fml::tt();
    case Formula::Kind::Int:
    case Formula::Kind::Arith:
    case Formula::Kind::Var: return f;
    case Formula::Kind::Pred: return fml::pred(negate(f->pred), f->args);
    case Formula::Kind::Or: return fml::conj(dual_formula(f->lhs), dual_formula(f->rhs));
    case Formula::Kind::And: return fml::disj(dual_formula(f->lhs), dual_formula(f->rhs));
    case Formula::Kind::Diamond: return fml::box(f->name, dual_formula(f->lhs));
    case Formula::Kind::Box: return fml::diamond(f->name, dual_formula(f->lhs));
    case Formula::Kind::Mu: return fml::nu(f->name, f->type, dual_formula(f->lhs));
    case Formula::Kind::Nu: return fml::mu(f->name, f->type, dual_formula(f->lhs));
    case Formula::Kind::Lambda: return fml::lam(f->name, f->type, dual_formula(f->lhs));
    case Formula::Kind::App: return fml::app(dual_formula(f->lhs), dual_formula(f->rhs));
    }
    return f;
}

namespace {

enum Level { kBind = 0, kOr = 1, kAnd = 2, kCmp = 3, kSum = 4, kProd = 5, kModal = 6, kApp = 7, kAtom = 8 };

void print(std::ostream& os, const Formula& f, int ctx)
{
    auto open = [&](int level) {
        bool p = ctx > level;
        if (p) os << '(';
        return p;
    };
    switch (f.kind) {
    case Formula::Kind::True: os << "true"; return;
    case Formula::Kind::False: os << "false"; return;
    case Formula::Kind::Var: os << f.name; return;
    case Formula::Kind::Int:
        if (f.value < 0) os << '(' << f.value << ')';
        else os << f.value;
        return;
    case Formula::Kind::Arith: {
        int level = f.arith == ArithOp::Mul ? kProd : kSum;
        bool p = open(level);
        print(os, *f.lhs, level);
        os << ' ' << arith_symbol(f.arith) << ' ';
        print(os, *f.rhs, level + 1);
        if (p) os << ')';
        return;
    }
    case Formula::Kind::Pred: {
        if (pred_is_infix(f.pred) && f.args.size() == 2) {
            bool p = open(kCmp);
            print(os, *f.args[0], kSum);
            os << ' ' << pred_symbol(f.pred) << ' ';
            print(os, *f.args[1], kSum);
            if (p) os << ')';
        } else {
            os << pred_symbol(f.pred) << '(';
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (i) os << ", ";
                print(os, *f.args[i], kBind);
            }
            os << ')';
        }
        return;
    }
    case Formula::Kind::Or:
    case Formula::Kind::And: {
        int level = f.kind == Formula::Kind::Or ? kOr : kAnd;
        bool p = open(level);
        print(os, *f.lhs, level);
        os << (f.kind == Formula::Kind::Or ? " \\/ " : " /\\ ");
        print(os, *f.rhs, level + 1);
        if (p) os << ')';
        return;
    }
    case Formula::Kind::Diamond:
    case Formula::Kind::Box: {
        bool p = open(kModal);
        os << (f.kind == Formula::Kind::Diamond ? "<" : "[") << f.name
           << (f.kind == Formula::Kind::Diamond ? "> " : "] ");
        print(os, *f.lhs, kModal);
        if (p) os << ')';
        return;
    }
    case Formula::Kind::App: {
        bool p = open(kApp);
        print(os, *f.lhs, kApp);
        os << ' ';
        print(os, *f.rhs, kAtom);
        if (p) os << ')';
        return;
    }
    case Formula::Kind::Mu:
    case Formula::Kind::Nu:
    case Formula::Kind::Lambda: {
        bool p = open(kBind);
        os << (f.kind == Formula::Kind::Mu ? "mu " : f.kind == Formula::Kind::Nu ? "nu " : "\\") << f.name;
        if (f.type) os << ':' << to_string(*f.type);
        os << ". ";
        print(os, *f.lhs, kBind);
        if (p) os << ')';
        return;
    }
    }
}

}  // namespace

std::string to_string(const Formula& f)
{
    std::ostringstream os;
    print(os, f, kBind);
    return os.str();
}

std::string to_string(Fix f) { return f == Fix::Mu ? "mu" : "nu"; }

}  // namespace hflz
