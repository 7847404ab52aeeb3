#include "hflz/program.hpp"
#include "lexer.hpp"

#include <set>

namespace hflz {

namespace {

using detail::Token;
using detail::TokenStream;

const char* const kOmegaPlaceholder = "$Omega";

const std::set<std::string> kKeywords = {"let", "in",   "and",  "if",    "then", "else", "event",
                                          "assert", "fun", "true", "false", "not",  "even", "odd"};

struct Guard {
    enum class Kind { Cmp, And, Or, Not, True, False };
    Kind kind = Kind::True;
    PredOp op = PredOp::Eq;
    std::vector<TermPtr> args;
    std::shared_ptr<Guard> a, b;
};
using GuardPtr = std::shared_ptr<Guard>;

TermPtr desugar_if(const GuardPtr& g, const TermPtr& t, const TermPtr& e, SourcePos pos)
{
    switch (g->kind) {
    case Guard::Kind::Cmp: return term::ite(g->op, g->args, t, e, pos);
    case Guard::Kind::True: return term::ite(PredOp::Eq, {term::integer(0), term::integer(0)}, t, e, pos);
    case Guard::Kind::False: return term::ite(PredOp::Eq, {term::integer(0), term::integer(1)}, t, e, pos);
    case Guard::Kind::Not: return desugar_if(g->a, e, t, pos);
    case Guard::Kind::And: return desugar_if(g->a, desugar_if(g->b, t, e, pos), e, pos);
    case Guard::Kind::Or: return desugar_if(g->a, t, desugar_if(g->b, t, e, pos), pos);
    }
    return t;
}

class Parser {
public:
    explicit Parser(const std::string& text)
        : ts_(detail::tokenize(text, {"(", ")", ";", "=", "<>", "<=", ">=", "<", ">", "!=", "+", "-", "*", "->",
                                      "||", "&&", ","}))
    {
    }

    Program parse_program()
    {
        Program p;
        if (ts_.is("let")) {
            while (ts_.accept("let")) {
                do {
                    add_def(p, parse_def());
                } while (ts_.accept("and"));
                ts_.expect("in");
            }
            Definition main;
            main.pos = ts_.peek().pos;
            main.body = parse_term();
            main.name = "main";
            if (p.find("main")) fail(ErrorKind::Semantic, "duplicate function name 'main'");
            p.defs.push_back(main);
        } else {
            while (true) {
                add_def(p, parse_def());
                if (!ts_.accept(";")) break;
                if (ts_.at_end()) break;
            }
        }
        if (!ts_.at_end()) ts_.error("unexpected trailing input");
        const Definition* main = p.find("main");
        if (!main) fail(ErrorKind::Syntax, "program has no 'main' definition");
        if (!main->params.empty()) fail(ErrorKind::Syntax, "'main' must not take parameters");
        if (uses_omega_) install_omega(p);
        return p;
    }

private:
    TokenStream ts_;
    bool uses_omega_ = false;

    void add_def(Program& p, Definition d)
    {
        if (p.find(d.name))
            fail(ErrorKind::Semantic, "duplicate function name '" + d.name + "' at " + describe(d.pos));
        p.defs.push_back(std::move(d));
    }

    static void install_omega(Program& p)
    {
        std::vector<std::string> taken;
        for (const auto& d : p.defs) taken.push_back(d.name);
        std::string name = fresh_name("Omega", taken);
        std::map<std::string, TermPtr> sub{{kOmegaPlaceholder, term::var(name)}};
        for (auto& d : p.defs) d.body = substitute(d.body, sub);
        Definition omega;
        omega.name = name;
        omega.params = {"u"};
        omega.body = term::app(term::var(name), term::var("u"));
        p.defs.push_back(omega);
    }

    std::string ident()
    {
        if (ts_.peek().kind != Token::Kind::Ident || kKeywords.count(ts_.peek().text)) ts_.error("expected identifier");
        return ts_.next().text;
    }

    bool at_ident() const { return ts_.peek().kind == Token::Kind::Ident && !kKeywords.count(ts_.peek().text); }

    Definition parse_def()
    {
        Definition d;
        d.pos = ts_.peek().pos;
        d.name = ident();
        while (at_ident()) d.params.push_back(ident());
        ts_.expect("=");
        d.body = parse_term();
        while (d.body->kind == Term::Kind::Abs) {
            for (const auto& x : d.body->params) d.params.push_back(x);
            d.body = d.body->lhs;
        }
        std::set<std::string> seen;
        for (const auto& x : d.params)
            if (!seen.insert(x).second)
                fail(ErrorKind::Semantic, "duplicate parameter '" + x + "' in definition of '" + d.name + "'");
        return d;
    }

    bool starts_prefix() const
    {
        return ts_.is("event") || ts_.is("assert") || ts_.is("if") || ts_.is("fun");
    }

    // After `assert(g);` decide whether the semicolon separates definitions.
    bool looks_like_def_header() const
    {
        std::size_t k = 0;
        while (ts_.peek(k).kind == Token::Kind::Ident && !kKeywords.count(ts_.peek(k).text)) ++k;
        return k >= 1 && ts_.is_symbol("=", k);
    }

    TermPtr parse_term()
    {
        if (starts_prefix()) return parse_prefix();
        return parse_nondet();
    }

    TermPtr parse_prefix()
    {
        SourcePos pos = ts_.peek().pos;
        if (ts_.accept("event")) {
            std::string label = ident();
            ts_.expect(";");
            return term::event(label, parse_term(), pos);
        }
        if (ts_.accept("assert")) {
            ts_.expect("(");
            GuardPtr g = parse_guard();
            ts_.expect(")");
            TermPtr cont = term::unit(pos);
            if (ts_.is_symbol(";") && ts_.peek(1).kind != Token::Kind::End && !looks_like_def_header_after_semicolon()) {
                ts_.next();
                cont = parse_term();
            }
            uses_omega_ = true;
            TermPtr failure =
                term::event("fail", term::app(term::var(kOmegaPlaceholder, pos), term::unit(pos), pos), pos);
            return desugar_if(g, cont, failure, pos);
        }
        if (ts_.accept("if")) {
            GuardPtr g = parse_guard();
            ts_.expect("then");
            TermPtr t = parse_term();
            ts_.expect("else");
            TermPtr e = parse_term();
            return desugar_if(g, t, e, pos);
        }
        ts_.expect("fun");
        std::vector<std::string> params;
        params.push_back(ident());
        while (at_ident()) params.push_back(ident());
        ts_.expect("->");
        return term::abs(params, parse_term(), pos);
    }

    bool looks_like_def_header_after_semicolon()
    {
        std::size_t m = ts_.mark();
        ts_.next();
        bool r = looks_like_def_header();
        ts_.reset(m);
        return r;
    }

    TermPtr parse_nondet()
    {
        TermPtr left = parse_arith();
        while (ts_.is_symbol("<>")) {
            SourcePos pos = ts_.next().pos;
            TermPtr right = starts_prefix() ? parse_prefix() : parse_arith();
            left = term::nondet(left, right, pos);
        }
        return left;
    }

    TermPtr parse_arith()
    {
        TermPtr left = parse_mul();
        while (ts_.is_symbol("+") || ts_.is_symbol("-")) {
            Token op = ts_.next();
            TermPtr right = parse_mul();
            left = term::arith(op.text == "+" ? ArithOp::Add : ArithOp::Sub, left, right, op.pos);
        }
        return left;
    }

    TermPtr parse_mul()
    {
        TermPtr left = parse_app();
        while (ts_.is_symbol("*")) {
            Token op = ts_.next();
            left = term::arith(ArithOp::Mul, left, parse_app(), op.pos);
        }
        return left;
    }

    bool starts_atom() const
    {
        return at_ident() || ts_.peek().kind == Token::Kind::Int || ts_.is_symbol("(");
    }

    TermPtr parse_app()
    {
        TermPtr head = parse_atom();
        while (starts_atom()) {
            SourcePos pos = ts_.peek().pos;
            head = term::app(head, parse_atom(), pos);
        }
        return head;
    }

    TermPtr parse_atom()
    {
        const Token& t = ts_.peek();
        SourcePos pos = t.pos;
        if (t.kind == Token::Kind::Int) return term::integer(BigInt(ts_.next().text), pos);
        if (ts_.is_symbol("-") && ts_.peek(1).kind == Token::Kind::Int) {
            ts_.next();
            return term::integer(-BigInt(ts_.next().text), pos);
        }
        if (at_ident()) return term::var(ident(), pos);
        if (ts_.accept("(")) {
            if (ts_.accept(")")) return term::unit(pos);
            TermPtr inner = parse_term();
            ts_.expect(")");
            return inner;
        }
        ts_.error("expected a term");
    }

    GuardPtr parse_guard()
    {
        GuardPtr left = parse_guard_and();
        while (ts_.accept("||")) {
            auto g = std::make_shared<Guard>();
            g->kind = Guard::Kind::Or;
            g->a = left;
            g->b = parse_guard_and();
            left = g;
        }
        return left;
    }

    GuardPtr parse_guard_and()
    {
        GuardPtr left = parse_guard_atom();
        while (ts_.accept("&&")) {
            auto g = std::make_shared<Guard>();
            g->kind = Guard::Kind::And;
            g->a = left;
            g->b = parse_guard_atom();
            left = g;
        }
        return left;
    }

    GuardPtr parse_guard_atom()
    {
        auto g = std::make_shared<Guard>();
        if (ts_.accept("not")) {
            g->kind = Guard::Kind::Not;
            g->a = parse_guard_atom();
            return g;
        }
        if (ts_.accept("true")) return g;
        if (ts_.accept("false")) {
            g->kind = Guard::Kind::False;
            return g;
        }
        if (ts_.is("even") || ts_.is("odd")) {
            g->kind = Guard::Kind::Cmp;
            g->op = ts_.next().text == "even" ? PredOp::Even : PredOp::Odd;
            ts_.expect("(");
            g->args.push_back(parse_arith());
            ts_.expect(")");
            return g;
        }
        if (ts_.is_symbol("(")) {
            std::size_t m = ts_.mark();
            try {
                ts_.next();
                GuardPtr inner = parse_guard();
                ts_.expect(")");
                if (!at_relop()) return inner;
            } catch (const Error&) {
            }
            ts_.reset(m);
        }
        TermPtr lhs = parse_arith();
        if (!at_relop()) ts_.error("expected a comparison operator");
        std::string op = ts_.next().text;
        TermPtr rhs = parse_arith();
        g->kind = Guard::Kind::Cmp;
        g->op = op == "=" ? PredOp::Eq
              : (op == "!=" || op == "<>") ? PredOp::Neq
              : op == "<" ? PredOp::Lt
              : op == "<=" ? PredOp::Le
              : op == ">" ? PredOp::Gt
              : PredOp::Ge;
        g->args = {lhs, rhs};
        return g;
    }

    bool at_relop() const
    {
        for (const char* s : {"=", "!=", "<>", "<", "<=", ">", ">="})
            if (ts_.is_symbol(s)) return true;
        return false;
    }
};

}  // namespace

Program parse_program(const std::string& text) { return Parser(text).parse_program(); }

}  // namespace hflz
