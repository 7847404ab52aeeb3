#include "hflz/translate.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace hflz {

namespace {

enum class Mode { May, Must, Path, Csa };

const std::set<std::string> kHflKeywords = {"true", "false", "mu", "nu", "even", "odd", "prop", "int"};

std::string hfl_name(const std::string& x) { return kHflKeywords.count(x) ? x + "_" : x; }

HflTypePtr hfl_type(const SimpleType& t)
{
    switch (t.kind) {
    case SimpleType::Kind::Unit: return HflType::prop();
    case SimpleType::Kind::Int: return HflType::integer();
    case SimpleType::Kind::Arrow: return HflType::arrow(hfl_type(*t.arg), hfl_type(*t.res));
    }
    return HflType::prop();
}

bool mentions(const Term& t, const std::string& x)
{
    if (t.kind == Term::Kind::Var) return t.name == x;
    if (t.kind == Term::Kind::Abs && std::find(t.params.begin(), t.params.end(), x) != t.params.end()) return false;
    for (const auto& a : t.args)
        if (mentions(*a, x)) return true;
    return (t.lhs && mentions(*t.lhs, x)) || (t.rhs && mentions(*t.rhs, x));
}

class Translator {
public:
    Translator(const Program& p, Mode mode, std::string event)
        : p_(p), typing_(infer_program_types(p)), mode_(mode), event_(std::move(event))
    {
    }

    FormulaPtr term(const Term& t)
    {
        switch (t.kind) {
        case Term::Kind::Unit: return mode_ == Mode::May || mode_ == Mode::Must ? fml::ff() : fml::tt();
        case Term::Kind::Var: return fml::var(hfl_name(t.name));
        case Term::Kind::Int: return fml::integer(t.value);
        case Term::Kind::Arith: return fml::arith(t.arith, term(*t.lhs), term(*t.rhs));
        case Term::Kind::If: {
            std::vector<FormulaPtr> args;
            for (const auto& a : t.args) args.push_back(term(*a));
            FormulaPtr yes = term(*t.lhs);
            FormulaPtr no = term(*t.rhs);
            if (mode_ == Mode::May)
                return fml::disj(fml::conj(fml::pred(t.pred, args), yes), fml::conj(fml::pred(negate(t.pred), args), no));
            return fml::conj(fml::implies(t.pred, args, yes), fml::implies(negate(t.pred), args, no));
        }
        case Term::Kind::Event:
            switch (mode_) {
            case Mode::May:
            case Mode::Must: return t.name == event_ ? fml::tt() : term(*t.lhs);
            case Mode::Path: return fml::diamond(t.name, term(*t.lhs));
            case Mode::Csa: return term(*t.lhs);
            }
            break;
        case Term::Kind::NonDet:
            return mode_ == Mode::May ? fml::disj(term(*t.lhs), term(*t.rhs)) : fml::conj(term(*t.lhs), term(*t.rhs));
        case Term::Kind::App: return fml::app(term(*t.lhs), term(*t.rhs));
        case Term::Kind::Abs: {
            auto it = typing_.abs_params.find(&t);
            if (it == typing_.abs_params.end()) fail(ErrorKind::Type, "untyped abstraction: " + to_string(t));
            FormulaPtr body = term(*t.lhs);
            for (std::size_t i = t.params.size(); i-- > 0;)
                body = fml::lam(hfl_name(t.params[i]), hfl_type(*it->second[i]), body);
            return body;
        }
        }
        fail(ErrorKind::Semantic, "cannot translate term " + to_string(t));
    }

    Equation equation(const Definition& d, Fix fix)
    {
        Equation e;
        e.var = hfl_name(d.name);
        e.fix = fix;
        const TypeEnv& locals = typing_.locals.at(d.name);
        for (const auto& x : d.params) e.params.emplace_back(hfl_name(x), hfl_type(*locals.at(x)));
        e.rhs = term(*d.body);
        return e;
    }

    // Definitions that become equations, in program order.
    std::vector<const Definition*> equation_defs() const
    {
        bool keep_main = main_is_referenced(p_);
        std::vector<const Definition*> out;
        for (const auto& d : p_.defs)
            if (keep_main || d.name != p_.main) out.push_back(&d);
        return out;
    }

    Hes finish(std::vector<Equation> eqs)
    {
        Hes h;
        h.equations = std::move(eqs);
        const Definition* m = p_.find(p_.main);
        h.main = main_is_referenced(p_) ? fml::var(hfl_name(p_.main)) : term(*m->body);
        typecheck_hes(h);
        return h;
    }

private:
    const Program& p_;
    ProgramTyping typing_;
    Mode mode_;
    std::string event_;
};

void require_main(const Program& p)
{
    if (!p.find(p.main)) fail(ErrorKind::Semantic, "program has no definition for '" + p.main + "'");
}

Hes uniform(const Program& p, Mode mode, Fix fix, const std::string& event)
{
    require_main(p);
    Translator tr(p, mode, event);
    std::vector<Equation> eqs;
    for (const Definition* d : tr.equation_defs()) eqs.push_back(tr.equation(*d, fix));
    return tr.finish(std::move(eqs));
}

}  // namespace

bool main_is_referenced(const Program& p)
{
    for (const auto& d : p.defs)
        if (std::find(d.params.begin(), d.params.end(), p.main) == d.params.end() && mentions(*d.body, p.main))
            return true;
    return false;
}

Hes translate_may(const Program& p, const std::string& event) { return uniform(p, Mode::May, Fix::Mu, event); }

Hes translate_must(const Program& p, const std::string& event) { return uniform(p, Mode::Must, Fix::Mu, event); }

Hes translate_path(const Program& p) { return uniform(p, Mode::Path, Fix::Nu, ""); }

PriorityAssignment parse_priorities(const std::string& text)
{
    PriorityAssignment omega;
    std::istringstream in(text);
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ws(line);
        std::vector<std::string> words;
        for (std::string w; ws >> w;) words.push_back(w);
        if (words.empty()) continue;
        auto bad = [&](const std::string& msg) { fail(ErrorKind::Syntax, "line " + std::to_string(n) + ": " + msg); };
        if (words.size() != 2) bad("expected '<function> <priority>'");
        int v = -1;
        try {
            std::size_t used = 0;
            v = std::stoi(words[1], &used);
            if (used != words[1].size()) v = -1;
        } catch (const std::exception&) {
        }
        if (v < 0) bad("invalid priority '" + words[1] + "'");
        if (!omega.emplace(words[0], v).second) bad("duplicate priority for '" + words[0] + "'");
    }
    return omega;
}

std::string print_priorities(const PriorityAssignment& omega)
{
    std::ostringstream os;
    for (const auto& [f, v] : omega) os << f << ' ' << v << '\n';
    return os.str();
}

PriorityAssignment normalize_priorities(const PriorityAssignment& omega, const std::vector<std::string>& order)
{
    std::set<std::string> seen;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto it = omega.find(order[i]);
        if (it == omega.end()) fail(ErrorKind::Semantic, "'" + order[i] + "' has no priority");
        if (!seen.insert(order[i]).second) fail(ErrorKind::Semantic, "'" + order[i] + "' listed twice");
        if (i > 0 && omega.at(order[i - 1]) < it->second)
            fail(ErrorKind::Semantic, "order is not by non-increasing priority at '" + order[i] + "'");
    }
    if (seen.size() != omega.size()) fail(ErrorKind::Semantic, "order does not cover every function");
    PriorityAssignment out;
    const int n = static_cast<int>(order.size());
    for (int i = 1; i <= n; ++i) {
        const std::string& f = order[static_cast<std::size_t>(i - 1)];
        out[f] = 2 * (n - i) + omega.at(f) % 2;
    }
    return out;
}

Hes translate_csa(const Program& p, const PriorityAssignment& omega)
{
    require_main(p);
    Translator tr(p, Mode::Csa, "");
    std::vector<const Definition*> defs = tr.equation_defs();
    std::vector<std::string> missing;
    for (const Definition* d : defs)
        if (!omega.count(d->name)) missing.push_back(d->name);
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
        fail(ErrorKind::Semantic, "priority assignment is missing: " + names);
    }
    std::stable_sort(defs.begin(), defs.end(),
                     [&](const Definition* a, const Definition* b) { return omega.at(a->name) > omega.at(b->name); });
    std::vector<Equation> eqs;
    for (const Definition* d : defs) eqs.push_back(tr.equation(*d, omega.at(d->name) % 2 == 0 ? Fix::Nu : Fix::Mu));
    return tr.finish(std::move(eqs));
}

}  // namespace hflz
