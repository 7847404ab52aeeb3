#include "doctest.h"
#include "fuzz_support.hpp"
#include "hflz/checker.hpp"
#include "hflz/opsem.hpp"
#include "hflz/translate.hpp"

#include <chrono>
#include <map>
#include <random>

using namespace hflz;
using namespace hflz::fuzz;

namespace {

const char* kLoop = "loop x = loop x; main = loop (event a; ())";
const char* kSum =
    "main = Sum %d (fun r -> assert(r >= %d));\n"
    "Sum x k = if x = 0 then k 0 else Sum (x - 1) (fun r -> k (x + r))";
const char* kLoopXY =
    "loop x y = if x <= 0 || y <= 0 then event end; () else loop (x - 1) (y * y) <> loop x (y - 1);"
    "main = loop %d %d";
const char* kP2 =
    "f y k = if y = 0 then (event close; k ()) else (event read; f (y - 1) k);\n"
    "g r = event end; ();\n"
    "main = f (%d) g";
const char* kApp =
    "app h x = h x;\n"
    "fb x = if x > 0 then event a; app fa (x - 1) else event b; app fb 5;\n"
    "fa x = if x > 0 then event a; app fa (x - 1) else event b; app fb 5;\n"
    "main = fb 5";
const char* kFileDfa = "state q0 init\nstate q1\nstate q2\ntrans q0 read q0\ntrans q0 close q1\ntrans q1 end q2\n";

Program prog(const char* fmt, int a = 0, int b = 0)
{
    char buf[1024];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return normalize_program(parse_program(buf));
}

Verdict::Kind check(const Lts& l, const Hes& h) { return eval_hflz(l, h).kind; }

constexpr auto Valid = Verdict::Kind::Valid;
constexpr auto Invalid = Verdict::Kind::Invalid;

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST_CASE("may: looping program never raises its event")
{
    Hes h = translate_may(prog(kLoop), "a");
    CHECK(alpha_equal(h, parse_hes("loop x =mu loop x; main: loop true;")));
    CHECK(check(trivial_lts(), h) == Invalid);
    CHECK(check(trivial_lts(), dual_hes(h)) == Valid);
    CHECK(denotational_check(trivial_lts(), h).empty());
}

TEST_CASE("may: summation never fails its assertion")
{
    auto t0 = std::chrono::steady_clock::now();
    for (int n : {0, 1, 3}) {
        Program p = prog(kSum, n, n);
        Hes h = translate_may(p, "fail");
        CHECK_MESSAGE(check(trivial_lts(), h) == Invalid, n);
        TraceSet ts = enumerate_traces(p, 200);
        CHECK(ts.frontier.empty());
        for (const auto& t : ts.finite) CHECK(std::find(t.begin(), t.end(), "fail") == t.end());
    }
    CHECK(seconds_since(t0) < 5.0);
}

TEST_CASE("may: reachable failure is found")
{
    Program p = normalize_program(parse_program("main = Sum 2 (fun r -> assert(r >= 4));\n"
                                                "Sum x k = if x = 0 then k 0 else Sum (x - 1) (fun r -> k (x + r))"));
    CHECK(check(trivial_lts(), translate_may(p, "fail")) == Valid);
}

TEST_CASE("must: nested loop always ends")
{
    auto t0 = std::chrono::steady_clock::now();
    for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {3, 1}}) {
        Program p = prog(kLoopXY, m, n);
        CHECK(check(trivial_lts(), translate_must(p, "end")) == Valid);
        CHECK(must_reach_bounded(p, "end", 60) == Verdict3::Yes);
    }
    CHECK(seconds_since(t0) < 10.0);
    Program never = normalize_program(parse_program("main = (event end; ()) <> ()"));
    CHECK(check(trivial_lts(), translate_must(never, "end")) == Invalid);
}

TEST_CASE("path: file protocol program")
{
    Lts l = det_automaton_to_lts(parse_det_automaton(kFileDfa));
    Hes h = translate_path(prog(kP2, 2));
    CHECK(alpha_equal(h, parse_hes("f (y:int) (k:prop -> prop) =nu (y != 0 \\/ <close> k true) /\\ (y = 0 \\/ <read> f (y - 1) k);"
                                   "g r =nu <end> true; main: f 2 g;")));
    for (int m : {0, 2, 5, -1}) CHECK_MESSAGE(check(l, translate_path(prog(kP2, m))) == Valid, m);
    Program bad = normalize_program(parse_program("main = event close; event read; ()"));
    CHECK(check(l, translate_path(bad)) == Invalid);
}

TEST_CASE("csa: application program")
{
    Program p = prog(kApp);
    PriorityAssignment omega{{"app", 3}, {"fa", 1}, {"fb", 2}};
    Hes h = translate_csa(p, omega);
    Hes expected = parse_hes(
        "app (h:int -> prop) (x:int) =mu h x;\n"
        "fb (x:int) =nu (x <= 0 \\/ app fa (x - 1)) /\\ (x > 0 \\/ app fb 5);\n"
        "fa (x:int) =mu (x <= 0 \\/ app fa (x - 1)) /\\ (x > 0 \\/ app fb 5);\n"
        "main: fb 5;");
    CHECK(alpha_equal(h, expected));
    CHECK(h.equations[0].var == "app");
    CHECK(h.equations[1].var == "fb");
    auto t0 = std::chrono::steady_clock::now();
    CHECK(check(trivial_lts(), h) == Valid);
    CHECK(seconds_since(t0) < 5.0);
    // fa recurring with the top priority breaks the parity condition
    CHECK(check(trivial_lts(), translate_csa(p, {{"app", 0}, {"fa", 3}, {"fb", 2}})) == Invalid);
    CHECK_THROWS_AS(translate_csa(p, {{"app", 3}, {"fa", 1}}), Error);
}

TEST_CASE("csa: priority normalization")
{
    PriorityAssignment omega{{"app", 3}, {"fa", 1}, {"fb", 2}};
    PriorityAssignment n = normalize_priorities(omega, {"app", "fb", "fa"});
    CHECK(n == PriorityAssignment{{"app", 5}, {"fb", 2}, {"fa", 1}});
    CHECK(parse_priorities(print_priorities(omega)) == omega);
    CHECK(parse_priorities("# comment\napp 3\nfa 1\n\nfb 2\n") == omega);
    CHECK_THROWS_AS(parse_priorities("app -1\n"), Error);
}

TEST_CASE("translations keep main as an equation only when referenced")
{
    Program self = normalize_program(parse_program("main = event a; main"));
    CHECK(main_is_referenced(self));
    Hes h = translate_may(self, "a");
    CHECK(h.index_of("main") >= 0);
    Program plain = normalize_program(parse_program("main = ()"));
    CHECK_FALSE(main_is_referenced(plain));
    CHECK(to_string(*translate_may(plain, "a").main) == "false");
    CHECK(translate_may(plain, "a").equations.empty());
}

TEST_CASE("property: translations agree with exhaustive reduction on terminating programs")
{
    ProgramFuzzer fz(31337);
    int mismatches = 0;
    std::map<std::string, int> seen;
    for (int i = 0; i < 100; ++i) {
        std::string src = fz.program();
        Program p = normalize_program(parse_program(src));
        TraceSet ts = enumerate_traces(p, 400);
        REQUIRE_MESSAGE(ts.frontier.empty(), src);
        bool may = false, must = true;
        for (const auto& t : ts.finite)
            if (std::find(t.begin(), t.end(), "a") != t.end()) may = true;
        for (const auto& t : ts.maximal)
            if (std::find(t.begin(), t.end(), "a") == t.end()) must = false;
        DetAutomaton d = fz.dfa();
        bool path = true;
        for (const auto& t : ts.finite) path = path && d.accepts(t);

        bool got_may = check(trivial_lts(), translate_may(p, "a")) == Valid;
        bool got_must = check(trivial_lts(), translate_must(p, "a")) == Valid;
        bool got_path = check(det_automaton_to_lts(d), translate_path(p)) == Valid;
        ++seen[std::string("may") + (may ? "+" : "-")];
        ++seen[std::string("must") + (must ? "+" : "-")];
        ++seen[std::string("path") + (path ? "+" : "-")];
        if (got_may != may || got_must != must || got_path != path) {
            ++mismatches;
            MESSAGE("program:\n" << src << "\nmay " << may << " must " << must << " path " << path);
        }
        CHECK(must_reach_bounded(p, "a", 400) == (must ? Verdict3::Yes : Verdict3::No));
    }
    CHECK(mismatches == 0);
    for (const char* k : {"may+", "may-", "must+", "must-", "path+", "path-"}) CHECK_MESSAGE(seen[k] >= 10, k << " " << seen[k]);
}
