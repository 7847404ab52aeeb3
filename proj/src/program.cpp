#include "hflz/program.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace hflz {

SimpleTypePtr SimpleType::unit()
{
    static const SimpleTypePtr t = std::make_shared<SimpleType>(SimpleType{Kind::Unit, nullptr, nullptr});
    return t;
}

SimpleTypePtr SimpleType::integer()
{
    static const SimpleTypePtr t = std::make_shared<SimpleType>(SimpleType{Kind::Int, nullptr, nullptr});
    return t;
}

SimpleTypePtr SimpleType::arrow(SimpleTypePtr a, SimpleTypePtr r)
{
    return std::make_shared<SimpleType>(SimpleType{Kind::Arrow, std::move(a), std::move(r)});
}

bool equal(const SimpleType& a, const SimpleType& b)
{
    if (a.kind != b.kind) return false;
    if (a.kind != SimpleType::Kind::Arrow) return true;
    return equal(*a.arg, *b.arg) && equal(*a.res, *b.res);
}

std::string to_string(const SimpleType& t)
{
    switch (t.kind) {
    case SimpleType::Kind::Unit: return "unit";
    case SimpleType::Kind::Int: return "int";
    case SimpleType::Kind::Arrow: {
        std::string a = to_string(*t.arg);
        if (t.arg->kind == SimpleType::Kind::Arrow) a = "(" + a + ")";
        return a + " -> " + to_string(*t.res);
    }
    }
    return "?";
}

std::vector<SimpleTypePtr> arg_types(const SimpleTypePtr& t)
{
    std::vector<SimpleTypePtr> out;
    for (SimpleTypePtr cur = t; cur->kind == SimpleType::Kind::Arrow; cur = cur->res) out.push_back(cur->arg);
    return out;
}

namespace term {

namespace {
std::shared_ptr<Term> make(Term::Kind k, SourcePos pos)
{
    auto t = std::make_shared<Term>();
    t->kind = k;
    t->pos = pos;
    return t;
}
}  // namespace

TermPtr unit(SourcePos pos) { return make(Term::Kind::Unit, pos); }

TermPtr var(const std::string& name, SourcePos pos)
{
    auto t = make(Term::Kind::Var, pos);
    t->name = name;
    return t;
}

TermPtr integer(const BigInt& v, SourcePos pos)
{
    auto t = make(Term::Kind::Int, pos);
    t->value = v;
    return t;
}

TermPtr arith(ArithOp op, TermPtr a, TermPtr b, SourcePos pos)
{
    auto t = make(Term::Kind::Arith, pos);
    t->arith = op;
    t->lhs = std::move(a);
    t->rhs = std::move(b);
    return t;
}

TermPtr ite(PredOp p, std::vector<TermPtr> args, TermPtr then_branch, TermPtr else_branch, SourcePos pos)
{
    auto t = make(Term::Kind::If, pos);
    t->pred = p;
    t->args = std::move(args);
    t->lhs = std::move(then_branch);
    t->rhs = std::move(else_branch);
    return t;
}

TermPtr event(const std::string& label, TermPtr body, SourcePos pos)
{
    auto t = make(Term::Kind::Event, pos);
    t->name = label;
    t->lhs = std::move(body);
    return t;
}

TermPtr app(TermPtr f, TermPtr a, SourcePos pos)
{
    auto t = make(Term::Kind::App, pos);
    t->lhs = std::move(f);
    t->rhs = std::move(a);
    return t;
}

TermPtr apps(TermPtr f, const std::vector<TermPtr>& args)
{
    for (const auto& a : args) f = app(f, a, f->pos);
    return f;
}

TermPtr nondet(TermPtr a, TermPtr b, SourcePos pos)
{
    auto t = make(Term::Kind::NonDet, pos);
    t->lhs = std::move(a);
    t->rhs = std::move(b);
    return t;
}

TermPtr abs(std::vector<std::string> params, TermPtr body, SourcePos pos)
{
    auto t = make(Term::Kind::Abs, pos);
    t->params = std::move(params);
    t->lhs = std::move(body);
    return t;
}

}  // namespace term

void spine(const TermPtr& t, TermPtr& head, std::vector<TermPtr>& args)
{
    args.clear();
    TermPtr cur = t;
    while (cur->kind == Term::Kind::App) {
        args.push_back(cur->rhs);
        cur = cur->lhs;
    }
    std::reverse(args.begin(), args.end());
    head = cur;
}

bool equal(const Term& a, const Term& b)
{
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Term::Kind::Unit: return true;
    case Term::Kind::Var: return a.name == b.name;
    case Term::Kind::Int: return a.value == b.value;
    case Term::Kind::Arith: return a.arith == b.arith && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    case Term::Kind::If:
        if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
        for (std::size_t i = 0; i < a.args.size(); ++i)
            if (!equal(*a.args[i], *b.args[i])) return false;
        return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    case Term::Kind::Event: return a.name == b.name && equal(*a.lhs, *b.lhs);
    case Term::Kind::App:
    case Term::Kind::NonDet: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    case Term::Kind::Abs: return a.params == b.params && equal(*a.lhs, *b.lhs);
    }
    return false;
}

namespace {

enum Level { kTop = 0, kNd = 1, kSum = 2, kProd = 3, kApp = 4, kAtom = 5 };

void print(std::ostream& os, const Term& t, int ctx);

void print_guard(std::ostream& os, const Term& t)
{
    if (pred_is_infix(t.pred)) {
        print(os, *t.args[0], kSum);
        os << ' ' << pred_symbol(t.pred) << ' ';
        print(os, *t.args[1], kSum);
    } else {
        os << pred_symbol(t.pred) << '(';
        print(os, *t.args[0], kTop);
        os << ')';
    }
}

void print(std::ostream& os, const Term& t, int ctx)
{
    switch (t.kind) {
    case Term::Kind::Unit: os << "()"; return;
    case Term::Kind::Var: os << t.name; return;
    case Term::Kind::Int:
        if (t.value < 0) os << '(' << t.value << ')';
        else os << t.value;
        return;
    case Term::Kind::Arith: {
        int level = t.arith == ArithOp::Mul ? kProd : kSum;
        bool paren = ctx > level;
        if (paren) os << '(';
        print(os, *t.lhs, level);
        os << ' ' << arith_symbol(t.arith) << ' ';
        print(os, *t.rhs, level + 1);
        if (paren) os << ')';
        return;
    }
    case Term::Kind::App: {
        bool paren = ctx > kApp;
        if (paren) os << '(';
        print(os, *t.lhs, kApp);
        os << ' ';
        print(os, *t.rhs, kAtom);
        if (paren) os << ')';
        return;
    }
    case Term::Kind::NonDet: {
        bool paren = ctx > kNd;
        if (paren) os << '(';
        print(os, *t.lhs, kNd);
        os << " <> ";
        print(os, *t.rhs, kNd + 1);
        if (paren) os << ')';
        return;
    }
    default: break;
    }
    bool paren = ctx > kTop;
    if (paren) os << '(';
    switch (t.kind) {
    case Term::Kind::If:
        os << "if ";
        print_guard(os, t);
        os << " then ";
        print(os, *t.lhs, kTop);
        os << " else ";
        print(os, *t.rhs, kTop);
        break;
    case Term::Kind::Event:
        os << "event " << t.name << "; ";
        print(os, *t.lhs, kTop);
        break;
    case Term::Kind::Abs:
        os << "fun";
        for (const auto& p : t.params) os << ' ' << p;
        os << " -> ";
        print(os, *t.lhs, kTop);
        break;
    default: break;
    }
    if (paren) os << ')';
}

}  // namespace

std::string to_string(const Term& t)
{
    std::ostringstream os;
    print(os, t, kTop);
    return os.str();
}

const Definition* Program::find(const std::string& name) const
{
    for (const auto& d : defs)
        if (d.name == name) return &d;
    return nullptr;
}

Definition* Program::find(const std::string& name)
{
    for (auto& d : defs)
        if (d.name == name) return &d;
    return nullptr;
}

namespace {
void collect_events(const Term& t, std::set<std::string>& out)
{
    if (t.kind == Term::Kind::Event) out.insert(t.name);
    for (const auto& a : t.args) collect_events(*a, out);
    if (t.lhs) collect_events(*t.lhs, out);
    if (t.rhs) collect_events(*t.rhs, out);
}
}  // namespace

std::vector<std::string> Program::events() const
{
    std::set<std::string> out;
    for (const auto& d : defs) collect_events(*d.body, out);
    return {out.begin(), out.end()};
}

bool equal(const Program& a, const Program& b)
{
    if (a.main != b.main || a.defs.size() != b.defs.size()) return false;
    for (std::size_t i = 0; i < a.defs.size(); ++i) {
        const auto& x = a.defs[i];
        const auto& y = b.defs[i];
        if (x.name != y.name || x.params != y.params || !equal(*x.body, *y.body)) return false;
    }
    return true;
}

std::string print_program(const Program& p)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < p.defs.size(); ++i) {
        const auto& d = p.defs[i];
        os << d.name;
        for (const auto& x : d.params) os << ' ' << x;
        os << " = " << to_string(*d.body);
        os << (i + 1 < p.defs.size() ? ";\n" : "\n");
    }
    return os.str();
}

namespace {
void free_locals_rec(const Term& t, const Program& p, std::set<std::string>& bound, std::vector<std::string>& out)
{
    switch (t.kind) {
    case Term::Kind::Var:
        if (!bound.count(t.name) && !p.find(t.name) &&
            std::find(out.begin(), out.end(), t.name) == out.end())
            out.push_back(t.name);
        return;
    case Term::Kind::Abs: {
        std::vector<std::string> added;
        for (const auto& x : t.params)
            if (bound.insert(x).second) added.push_back(x);
        free_locals_rec(*t.lhs, p, bound, out);
        for (const auto& x : added) bound.erase(x);
        return;
    }
    default: break;
    }
    for (const auto& a : t.args) free_locals_rec(*a, p, bound, out);
    if (t.lhs) free_locals_rec(*t.lhs, p, bound, out);
    if (t.rhs) free_locals_rec(*t.rhs, p, bound, out);
}
}  // namespace

std::vector<std::string> free_locals(const Term& t, const Program& p)
{
    std::set<std::string> bound;
    std::vector<std::string> out;
    free_locals_rec(t, p, bound, out);
    return out;
}

TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& sub)
{
    if (sub.empty()) return t;
    switch (t->kind) {
    case Term::Kind::Unit:
    case Term::Kind::Int: return t;
    case Term::Kind::Var: {
        auto it = sub.find(t->name);
        return it == sub.end() ? t : it->second;
    }
    case Term::Kind::Abs: {
        std::map<std::string, TermPtr> inner = sub;
        for (const auto& x : t->params) inner.erase(x);
        auto copy = std::make_shared<Term>(*t);
        copy->lhs = substitute(t->lhs, inner);
        return copy;
    }
    default: break;
    }
    auto copy = std::make_shared<Term>(*t);
    for (auto& a : copy->args) a = substitute(a, sub);
    if (copy->lhs) copy->lhs = substitute(copy->lhs, sub);
    if (copy->rhs) copy->rhs = substitute(copy->rhs, sub);
    return copy;
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& taken)
{
    auto used = [&](const std::string& s) { return std::find(taken.begin(), taken.end(), s) != taken.end(); };
    if (!used(base)) return base;
    for (int i = 1;; ++i) {
        std::string cand = base + "_" + std::to_string(i);
        if (!used(cand)) return cand;
    }
}

}  // namespace hflz
