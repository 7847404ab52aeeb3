#include "hflz/checker.hpp"

namespace hflz {

namespace {

bool agrees(const Lts& lts, const Hes& h, std::size_t budget, bool& den, Verdict& game)
{
    den = denotational_check(lts, h).count(lts.init) > 0;
    game = eval_hflz(lts, h, budget);
    return game.kind == (den ? Verdict::Kind::Valid : Verdict::Kind::Invalid);
}

void subformulas(const FormulaPtr& f, std::vector<FormulaPtr>& out)
{
    out.push_back(f);
    for (const auto& a : f->args) subformulas(a, out);
    if (f->lhs) subformulas(f->lhs, out);
    if (f->rhs) subformulas(f->rhs, out);
}

}  // namespace

CrossCheckReport cross_check(const Lts& lts, const Hes& h, std::size_t budget)
{
    CrossCheckReport r;
    r.agree = agrees(lts, h, budget, r.denotational, r.game);
    if (r.agree) return r;
    r.detail = to_string(*h.main);
    HflEnv env = typecheck_hes(h);
    std::vector<FormulaPtr> subs;
    subformulas(h.main, subs);
    for (const auto& s : subs) {
        std::string text = to_string(*s);
        if (text.size() >= r.detail.size()) continue;
        bool closed = true;
        for (const auto& x : free_vars(*s)) closed = closed && env.count(x);
        if (!closed) continue;
        try {
            if (typecheck_formula(env, *s)->kind != HflType::Kind::Prop) continue;
            Hes part{h.equations, s};
            bool den;
            Verdict game;
            if (!agrees(lts, part, budget, den, game)) r.detail = text;
        } catch (const Error&) {
        }
    }
    return r;
}

}  // namespace hflz
