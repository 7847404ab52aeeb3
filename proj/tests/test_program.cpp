#include "doctest.h"
#include "hflz/program.hpp"

using namespace hflz;

namespace {

const char* kLoop = "loop x = loop x; main = loop (event a; ())";
const char* kSum =
    "main = Sum 3 (fun r -> assert(r >= 3));\n"
    "Sum x k = if x = 0 then k 0 else Sum (x - 1) (fun r -> k (x + r))";

std::string type_of(const TypeEnv& env, const std::string& f) { return to_string(*env.at(f)); }

}  // namespace

TEST_CASE("parse: let form builds a main wrapper")
{
    Program p = parse_program("let f x = f x in f 0");
    REQUIRE(p.defs.size() == 2);
    CHECK(p.defs[0].name == "f");
    CHECK(p.defs[0].params == std::vector<std::string>{"x"});
    CHECK(to_string(*p.defs[0].body) == "f x");
    CHECK(p.defs[1].name == "main");
    CHECK(to_string(*p.defs[1].body) == "f 0");
}

TEST_CASE("parse: loop program")
{
    Program p = parse_program(kLoop);
    REQUIRE(p.defs.size() == 2);
    CHECK(to_string(*p.find("main")->body) == "loop (event a; ())");
}

TEST_CASE("parse: assert desugars to a failure branch with a shared diverging helper")
{
    Program p = parse_program("main = assert(3 >= 0)");
    const Term& b = *p.find("main")->body;
    REQUIRE(b.kind == Term::Kind::If);
    CHECK(b.pred == PredOp::Ge);
    CHECK(b.lhs->kind == Term::Kind::Unit);
    REQUIRE(b.rhs->kind == Term::Kind::Event);
    CHECK(b.rhs->name == "fail");
    CHECK(to_string(*b.rhs->lhs) == "Omega ()");
    const Definition* om = p.find("Omega");
    REQUIRE(om != nullptr);
    CHECK(to_string(*om->body) == "Omega u");
}

TEST_CASE("parse: helper name avoids user definitions")
{
    Program p = parse_program("Omega = (); main = assert(1 = 1); event x; Omega");
    CHECK(p.find("Omega_1") != nullptr);
    CHECK(to_string(*p.find("main")->body) == "if 1 = 1 then event x; Omega else event fail; Omega_1 ()");
}

TEST_CASE("parse: assert followed by a definition header ends the body")
{
    Program p = parse_program("f x = assert(x > 0); main = f 1");
    CHECK(p.find("main") != nullptr);
    CHECK(p.find("f")->body->lhs->kind == Term::Kind::Unit);
}

TEST_CASE("parse: boolean guards become nested conditionals")
{
    Program p = parse_program("loop x y = if x <= 0 || y <= 0 then event end; () else loop (x - 1) (y * y) <> loop x (y - 1);"
                              "main = loop 1 1");
    const Term& b = *p.find("loop")->body;
    REQUIRE(b.kind == Term::Kind::If);
    CHECK(b.pred == PredOp::Le);
    CHECK(to_string(*b.lhs) == "event end; ()");
    REQUIRE(b.rhs->kind == Term::Kind::If);
    CHECK(to_string(*b.rhs->rhs) == "loop (x - 1) (y * y) <> loop x (y - 1)");

    Program q = parse_program("main = if not (1 = 2 && true) then event a; () else ()");
    CHECK(to_string(*q.find("main")->body) ==
          "if 1 = 2 then if 0 = 0 then () else event a; () else event a; ()");
}

TEST_CASE("parse: nested comments, negative literals and precedence")
{
    Program p = parse_program("(* outer (* inner *) *) main = f (-3) (1 + 2 * 3); f x y = ()");
    CHECK(to_string(*p.find("main")->body) == "f (-3) (1 + 2 * 3)");
}

TEST_CASE("parse: errors")
{
    CHECK_THROWS_WITH_AS(parse_program("main = (("), doctest::Contains("line 1"), Error);
    CHECK_THROWS_AS(parse_program("f = (); f = (); main = ()"), Error);
    CHECK_THROWS_AS(parse_program("f = ()"), Error);
    CHECK_THROWS_AS(parse_program("main = () (* open"), Error);
}

TEST_CASE("print/parse round trip")
{
    for (const char* src : {kLoop, kSum,
                            "f x = (event close; ()) <> (event read; event read; f x); main = f ()",
                            "g k = (event a; k) <> (event b; k); f x = if x > 0 then g (f (x - 1)) else event b; f 5;"
                            " main = f 5",
                            "main = (() <> ()) <> (event a; ()) <> (if even(2 - 1) then () else ())"}) {
        Program p = parse_program(src);
        Program q = parse_program(print_program(p));
        CHECK(equal(p, q));
        CHECK(print_program(p) == print_program(q));
    }
}

TEST_CASE("typecheck: higher-order examples")
{
    TypeEnv e = typecheck_program(parse_program(kLoop));
    CHECK(type_of(e, "loop") == "unit -> unit");
    CHECK(type_of(e, "main") == "unit");

    TypeEnv s = typecheck_program(parse_program(kSum));
    CHECK(type_of(s, "Sum") == "int -> (int -> unit) -> unit");
    CHECK(type_of(s, "main") == "unit");
}

TEST_CASE("typecheck: errors")
{
    CHECK_THROWS_WITH_AS(typecheck_program(parse_program("f = 1 + (); main = f")), doctest::Contains("mismatch"),
                         Error);
    CHECK_THROWS_WITH_AS(typecheck_program(parse_program("main = g ()")), doctest::Contains("unbound"), Error);
    CHECK_THROWS_AS(typecheck_program(parse_program("f x = x x; main = ()")), Error);
    CHECK_THROWS_AS(typecheck_program(parse_program("main = if () = 1 then () else ()")), Error);
}

TEST_CASE("normalize: lambdas become top-level definitions")
{
    Program p = parse_program(kSum);
    Program n = normalize_program(p);
    CHECK(n.find("lam_1") != nullptr);
    CHECK(n.find("lam_2") != nullptr);
    CHECK(to_string(*n.find("main")->body) == "Sum 3 lam_1");
    CHECK(n.find("lam_2")->params == std::vector<std::string>{"x", "k", "r"});
    CHECK(to_string(*n.find("Sum")->body) == "if x = 0 then k 0 else Sum (x - 1) (lam_2 x k)");
    CHECK_NOTHROW(typecheck_program(n));
    CHECK(equal(normalize_program(n), n));
}

TEST_CASE("normalize: preserves typability")
{
    for (const char* src : {kLoop, kSum, "f = (); main = f"}) {
        Program p = parse_program(src);
        CHECK_NOTHROW(typecheck_program(normalize_program(p)));
    }
}

TEST_CASE("instrument_total")
{
    Program p = instrument_total(parse_program("main = ()"), "dummy");
    CHECK(print_program(p) == "main = Loop ();\nLoop x = event dummy; Loop x\n");

    Program q = instrument_total(parse_program("f = if true then (event a; f) else (event b; f); main = f"), "dummy");
    CHECK(to_string(*q.find("f")->body) == "event dummy; if 0 = 0 then event a; f else event b; f");
    CHECK(to_string(*q.find("main")->body) == "f");
    CHECK_THROWS_AS(instrument_total(parse_program("main = event dummy; ()"), "dummy"), Error);
}
