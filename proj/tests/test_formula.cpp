#include "doctest.h"
#include "hflz/formula.hpp"

using namespace hflz;

namespace {

const char* kPhiAb = "mu X:prop -> prop. \\Y:prop. Y \\/ <a> X (<b> Y)";
const char* kPhiEven = "nu X:prop -> int -> prop. \\Y:prop. \\Z:int. even(Z) /\\ Y \\/ <a> X (<b> Y) (Z + 1)";

std::string ty(const std::string& src) { return to_string(*typecheck_formula({}, *parse_formula(src))); }

}  // namespace

TEST_CASE("typecheck_formula")
{
    CHECK(ty("<a> true") == "prop");
    CHECK(ty(kPhiAb) == "prop -> prop");
    CHECK(ty(kPhiEven) == "prop -> int -> prop");
    CHECK(ty("(\\x:int. x = 1) 3") == "prop");
    CHECK_THROWS_AS(ty("(<a> true) + 1"), Error);
    CHECK_THROWS_AS(typecheck_formula({}, *fml::var("X")), Error);
    CHECK_THROWS_AS(typecheck_formula({}, *fml::pred(PredOp::Eq, {fml::integer(1)})), Error);
    CHECK_THROWS_AS(typecheck_formula({}, *fml::lam("x", HflType::prop(), fml::integer(1))), Error);
}

TEST_CASE("formula printer and parser round trip")
{
    for (const char* src : {kPhiAb, kPhiEven, "true", "<a> [b] false", "x + 2 * (y - 1) <= (-3)",
                            "(a \\/ b) /\\ (c \\/ d)", "a \\/ b /\\ c", "F (\\r. <end> true) (x - 1)",
                            "even(x * 2) /\\ odd(x + 1)", "nu X. mu Y. <b> X \\/ <a> Y"}) {
        FormulaPtr f = parse_formula(src);
        FormulaPtr g = parse_formula(to_string(*f));
        CHECK_MESSAGE(equal(*f, *g), src);
        CHECK(to_string(*f) == to_string(*g));
    }
    CHECK(to_string(*parse_formula("a \\/ b /\\ c")) == "a \\/ b /\\ c");
    CHECK(to_string(*parse_formula("(a \\/ b) /\\ c")) == "(a \\/ b) /\\ c");
    CHECK(to_string(*fml::integer(-3)) == "(-3)");
}

TEST_CASE("alpha equivalence and capture-avoiding substitution")
{
    CHECK(alpha_equal(*parse_formula("\\x:int. x = 1"), *parse_formula("\\y:int. y = 1")));
    CHECK_FALSE(alpha_equal(*parse_formula("\\x:int. x = y"), *parse_formula("\\y:int. y = y")));
    FormulaPtr f = parse_formula("\\x:prop. x /\\ y");
    FormulaPtr g = substitute(f, {{"y", fml::var("x")}});
    CHECK(alpha_equal(*g, *parse_formula("\\z:prop. z /\\ x")));
}

TEST_CASE("hes_to_formula back-substitutes from the last equation")
{
    Hes h = parse_hes("X =nu Y; Y =mu <b> X \\/ <a> Y; main: X;");
    FormulaPtr f = hes_to_formula(h);
    CHECK(alpha_equal(*f, *parse_formula("nu X:prop. mu Y:prop. <b> X \\/ <a> Y")));

    Hes empty;
    empty.main = parse_formula("<a> true");
    CHECK(equal(*hes_to_formula(empty), *empty.main));

    Hes loop = parse_hes("loop x =mu loop x; main: loop true;");
    CHECK(alpha_equal(*hes_to_formula(loop), *parse_formula("(mu loop:prop -> prop. \\x:prop. loop x) true")));
}

TEST_CASE("formula_to_hes orders equations outermost first")
{
    Hes h = formula_to_hes(parse_formula("nu X:prop. mu Y:prop. <b> X \\/ <a> Y"));
    REQUIRE(h.equations.size() == 2);
    CHECK(h.equations[0].var == "X");
    CHECK(h.equations[0].fix == Fix::Nu);
    CHECK(h.equations[1].fix == Fix::Mu);
    CHECK(alpha_equal(h, parse_hes("X =nu Y; Y =mu <b> X \\/ <a> Y; main: X;")));

    Hes plain = formula_to_hes(parse_formula("<a> true"));
    CHECK(plain.equations.empty());

    Hes one = formula_to_hes(parse_formula("mu X:prop. <a> X"));
    CHECK(alpha_equal(one, parse_hes("X =mu <a> X; main: X;")));
}

TEST_CASE("formula_to_hes lifts captured lambda variables")
{
    FormulaPtr f = parse_formula("(\\y:prop. mu X:prop. y \\/ <a> X) (<b> true)");
    Hes h = formula_to_hes(f);
    REQUIRE(h.equations.size() == 1);
    CHECK(h.equations[0].params.size() == 1);
    CHECK_NOTHROW(typecheck_hes(h));
    CHECK(alpha_equal(*hes_to_formula(h), *parse_formula("(\\y:prop. (mu X:prop -> prop. \\y:prop. y \\/ <a> X y) y) (<b> true)")));

    for (std::string src : {"(" + std::string(kPhiAb) + ") (<c> true)", "(" + std::string(kPhiEven) + ") (<c> true) 0"}) {
        Hes g = formula_to_hes(parse_formula(src));
        CHECK_NOTHROW(typecheck_hes(g));
        CHECK(alpha_equal(*hes_to_formula(g), *parse_formula(src)));
    }
}

TEST_CASE("normalize_hes")
{
    Hes v = parse_hes("X =mu <a> X; main: X;");
    CHECK(alpha_equal(normalize_hes(v), v));
    Hes m = normalize_hes(parse_hes("X =mu <a> X; main: X \\/ true;"));
    REQUIRE(m.equations.size() == 2);
    CHECK(m.equations[0].var == "X0");
    CHECK(m.equations[0].fix == Fix::Nu);
    CHECK(m.main->kind == Formula::Kind::Var);
    Hes t;
    t.main = fml::tt();
    Hes n = normalize_hes(t);
    REQUIRE(n.equations.size() == 1);
    CHECK(n.equations[0].rhs->kind == Formula::Kind::True);
}

TEST_CASE("dual_hes")
{
    Hes h = parse_hes("X =mu <a> X; main: X;");
    CHECK(alpha_equal(dual_hes(h), parse_hes("X =nu [a] X; main: X;")));
    Hes g = parse_hes("F (y:int) x k =mu (y != 0 \\/ <close> k x) /\\ (y = 0 \\/ <read> F (y - 1) x k);"
                      "main: F 3 true (\\r. <end> true);");
    CHECK(print_hes(dual_hes(dual_hes(g))) == print_hes(g));
    Hes d = dual_hes(g);
    CHECK(d.equations[0].fix == Fix::Nu);
    CHECK(to_string(*d.equations[0].rhs) == "y = 0 /\\ [close] k x \\/ y != 0 /\\ [read] F (y - 1) x k");
    CHECK(to_string(*d.main) == "F 3 false (\\r:prop. [end] false)");
}

TEST_CASE("priorities")
{
    Hes h = parse_hes("A =nu B; B =mu C; C =nu true; D =mu true; main: A;");
    CHECK(priority(h, 0) == 6);
    CHECK(priority(h, 1) == 5);
    CHECK(priority(h, 2) == 2);
    CHECK(priority(h, 3) == 1);
}

TEST_CASE("HES text format")
{
    Hes h = parse_hes("(* comment *) F y x k =mu (y != 0 \\/ <close> k x) /\\ (y = 0 \\/ <read> F (y - 1) x k);\n"
                      "main: F (-1) true (\\r. <end> true);");
    CHECK(print_hes(h) ==
          "F (y:int) x (k:prop -> prop) =mu (y != 0 \\/ <close> k x) /\\ (y = 0 \\/ <read> F (y - 1) x k);\n"
          "main: F (-1) true (\\r:prop. <end> true);\n");
    CHECK(print_hes(parse_hes(print_hes(h))) == print_hes(h));
    CHECK_THROWS_AS(parse_hes("X =mu X; main: Y;"), Error);
    CHECK_THROWS_AS(parse_hes("X =mu X 1; main: X;"), Error);
    CHECK_THROWS_AS(parse_hes("X =mu mu Y. Y; main: X;"), Error);
    CHECK_THROWS_AS(parse_hes("X =mu true"), Error);
}

TEST_CASE("encode_quantifier")
{
    FormulaPtr ex = encode_quantifier(Quantifier::Exists, "X", parse_formula("\\x:int. x = 5"));
    CHECK(alpha_equal(*ex, *parse_formula("(mu X:int -> prop. \\n:int. (n = 5 \\/ X (n - 1)) \\/ X (n + 1)) 0")));
    FormulaPtr all = encode_quantifier(Quantifier::Forall, "X", parse_formula("\\x:int. x >= 0"));
    CHECK(all->lhs->kind == Formula::Kind::Nu);
    CHECK(to_string(*typecheck_formula({}, *all)) == "prop");
    CHECK_THROWS_AS(encode_quantifier(Quantifier::Exists, "X", parse_formula("<a> true")), Error);
}
