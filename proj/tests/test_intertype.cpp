#include "doctest.h"
#include "fuzz_support.hpp"
#include "hflz/checker.hpp"
#include "hflz/intertype.hpp"
#include "hflz/opsem.hpp"

#include <chrono>
#include <random>
#include <tuple>

using namespace hflz;
using namespace hflz::fuzz;

namespace {

const char* kAab = "state qa prio 0 init\nstate qb prio 1\n"
                   "trans qa a qa\ntrans qb a qa\ntrans qa b qb\ntrans qb b qb\n";
const char* kP2 = "g k = (event a; k) <> (event b; k);\n"
                  "f x = if x > 0 then g (f (x - 1)) else (event b; f 5);\n"
                  "main = f 5";
const char* kP0 = "f = if %s then (event a; f) else (event b; f);\nmain = f";

Program prog(const std::string& text) { return normalize_program(parse_program(text)); }

Program p0(bool c)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, kP0, c ? "0 = 0" : "0 = 1");
    return prog(buf);
}

ParityAutomaton aab() { return parse_parity_automaton(kAab); }

InterTypePtr q(const ParityAutomaton& a, const char* name) { return InterType::at(a.find(name)); }

std::vector<std::string> names(const Program& p)
{
    std::vector<std::string> out;
    for (const auto& d : p.defs) out.push_back(d.name);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("intersection types: order and printing")
{
    ParityAutomaton a = aab();
    InterTypePtr qa = q(a, "qa"), qb = q(a, "qb");
    CHECK(compare(*qa, *qb) < 0);
    InterTypePtr t = InterType::arrow({{qb, 1}, {qa, 0}, {qa, 0}}, qa);
    REQUIRE(t->conj.size() == 2);
    CHECK(t->conj[0].first->state == a.find("qa"));
    CHECK(compare(*qb, *t) < 0);
    CHECK(compare(*InterType::int_arrow(qb), *t) < 0);
    CHECK(to_string(*t, a) == "(qa, 0) /\\ (qb, 1) -> qa");
    CHECK(mangle("g", *t, 0, a) == "g__qa_0_and_qb_1_to_qa__0");
    CHECK(mangle("f", *InterType::int_arrow(qb), 1, a) == "f__int_to_qb__1");
    CHECK(final_state(*InterType::arrow({}, InterType::int_arrow(qb))) == a.find("qb"));
}

TEST_CASE("env_raise")
{
    ParityAutomaton a = aab();
    InterTypeEnv g;
    g.add("k", q(a, "qa"), 0, 0);
    g.add_int("x");
    InterTypeEnv r0 = env_raise(g, 0);
    CHECK(r0.bindings.at("k")[0].raised == 0);
    InterTypeEnv r1 = env_raise(g, 1);
    CHECK(r1.bindings.at("k")[0].m == 0);
    CHECK(r1.bindings.at("k")[0].raised == 1);
    CHECK(r1.ints == std::set<std::string>{"x"});
    CHECK(env_raise(r1, 0).bindings.at("k")[0].raised == 1);
    CHECK_THROWS_AS(g.add("x", q(a, "qa"), 0, 0), Error);
}

TEST_CASE("transform_term: rule instances")
{
    ParityAutomaton a = aab();
    Program p = prog(kP2);
    InterTypeEnv g0;
    g0.add("k", q(a, "qa"), 0, 0);
    g0.add("k", q(a, "qb"), 1, 0);
    TermPtr tg = transform_term(g0, p.find("g")->body, q(a, "qa"), a);
    CHECK(to_string(*tg) == to_string(*parse_program("main = (event a; k__qa__0) <> (event b; k__qb__1)").find("main")->body));

    CHECK(to_string(*transform_term({}, term::unit(), q(a, "qb"), a)) == "()");

    InterTypeEnv only_a;
    only_a.add("k", q(a, "qa"), 0, 0);
    CHECK_THROWS_AS(transform_term(only_a, p.find("g")->body, q(a, "qa"), a), Error);

    InterTypePtr gt = InterType::arrow({{q(a, "qa"), 0}, {q(a, "qb"), 1}}, q(a, "qa"));
    InterTypeEnv g1;
    g1.add("g", gt, 0, 0);
    g1.add("f", InterType::int_arrow(q(a, "qa")), 0, 0);
    g1.add("f", InterType::int_arrow(q(a, "qb")), 1, 0);
    g1.add_int("x");
    TermPtr tf = transform_term(g1, p.find("f")->body, q(a, "qa"), a);
    CHECK(to_string(*tf) ==
          to_string(*parse_program("main = if x > 0 then g__qa_0_and_qb_1_to_qa__0 (f__int_to_qa__0 (x - 1)) "
                                   "(f__int_to_qb__1 (x - 1)) else (event b; f__int_to_qb__1 5)")
                         .find("main")
                         ->body));
}

TEST_CASE("inference on the duplication example: four copies")
{
    ParityAutomaton a = aab();
    Program p = prog(kP2);
    InterResult r = infer_intersection_transform(p, a);
    CHECK(names(r.program) == std::vector<std::string>{"f__int_to_qa__0", "f__int_to_qb__1",
                                                       "g__qa_0_and_qb_1_to_qa__0", "g__qa_0_and_qb_1_to_qb__0",
                                                       "main"});
    CHECK(r.omega == PriorityAssignment{{"f__int_to_qa__0", 1},
                                        {"f__int_to_qb__1", 2},
                                        {"g__qa_0_and_qb_1_to_qa__0", 1},
                                        {"g__qa_0_and_qb_1_to_qb__0", 1}});
    CHECK(r.xi.size() == 4);
    CHECK(to_string(*r.program.find("main")->body) == "f__int_to_qa__0 5");
    const Definition* gq = r.program.find("g__qa_0_and_qb_1_to_qb__0");
    REQUIRE(gq);
    CHECK(gq->params == std::vector<std::string>{"k__qa__0", "k__qb__1"});
    CHECK(to_string(*r.program.find("f__int_to_qa__0")->body) ==
          to_string(*parse_program("main = if x > 0 then g__qa_0_and_qb_1_to_qa__0 (f__int_to_qa__0 (x - 1)) "
                                   "(f__int_to_qb__1 (x - 1)) else (event b; f__int_to_qb__1 5)")
                         .find("main")
                         ->body));

    typecheck_program(r.program);
    Program back = parse_program(print_program(r.program));
    CHECK(equal(back, r.program));
    CHECK(prune_environment(r.xi, p, a).size() == 4);
}

TEST_CASE("the transformed program has the same traces")
{
    ParityAutomaton a = aab();
    Program p = prog(kP2);
    for (bool canonical : {false, true}) {
        InterResult r = infer_intersection_transform(p, a, {canonical});
        TraceSet src = enumerate_traces(p, 12);
        TraceSet dst = enumerate_traces(r.program, 12);
        CHECK(src.finite == dst.finite);
        CHECK_FALSE(src.finite.empty());
    }
}

TEST_CASE("canonical inference keeps every copy")
{
    ParityAutomaton a = aab();
    Program p = prog(kP2);
    InterResult r = infer_intersection_transform(p, a, {true});
    CHECK(r.xi.size() == 8);
    CHECK(r.program.defs.size() == 9);
    for (const auto& b : r.xi)
        if (b.name == "g") CHECK(b.type->conj.size() == 4);
    CHECK(prune_environment(r.xi, p, a).size() == 8);
    CHECK(prune_environment({}, p, a).empty());
}

TEST_CASE("prune_environment removes underivable bindings")
{
    ParityAutomaton a = aab();
    Program p = prog(kP2);
    InterResult r = infer_intersection_transform(p, a);
    TopLevelEnv xi = r.xi;
    xi.push_back({"g", InterType::arrow({{q(a, "qa"), 0}}, q(a, "qa")), 0});
    TopLevelEnv pruned = prune_environment(xi, p, a);
    CHECK(pruned == r.xi);

    TopLevelEnv no_fb;
    for (const auto& b : r.xi)
        if (!(b.name == "f" && b.m == 1)) no_fb.push_back(b);
    TopLevelEnv left = prune_environment(no_fb, p, a);
    REQUIRE(left.size() == 2);
    for (const auto& b : left) CHECK(b.name == "g");
}

TEST_CASE("temporal pipeline on the branching loop")
{
    auto t0 = std::chrono::steady_clock::now();
    ParityAutomaton a = aab();
    for (bool c : {true, false}) {
        Program p = p0(c);
        InterResult r = infer_intersection_transform(p, a);
        CHECK(r.omega == PriorityAssignment{{"f__qa__0", 1}, {"f__qb__1", 2}});
        Hes h = temporal_pipeline(p, a);
        CHECK(h.equations.size() == 2);
        CHECK(h.equations[0].var == "f__qb__1");
        CHECK(h.equations[0].fix == Fix::Nu);
        CHECK(h.equations[1].fix == Fix::Mu);
        Verdict v = eval_hflz(trivial_lts(), h);
        CHECK_MESSAGE(v.kind == (c ? Verdict::Kind::Invalid : Verdict::Kind::Valid), c);
        CHECK(eval_hflz(trivial_lts(), temporal_pipeline(p, a, {true})).kind == v.kind);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 10.0);
}

TEST_CASE("temporal pipeline: lasso membership decides small programs")
{
    ParityAutomaton a = aab();
    struct Case {
        const char* text;
        bool empty;  // no infinite trace accepted by the automaton
    };
    const Case cases[] = {
        {"f = event a; f; main = f", false},
        {"f = event b; f; main = f", true},
        {"f = event a; event b; f; main = f", true},
        {"f = (event a; f) <> (event b; f); main = f", false},
        {"f k = event b; k; h = event a; h; main = f h", false},
        {"f k = event a; k; h = event b; h; main = f h", true},
        {"f x = if x > 0 then event b; f (x - 1) else (event a; f 0); main = f 3", false},
        {"twice k = k; loop = event b; twice loop; main = twice loop", true},
        {"app h x = h x; fa x = event a; app fa x; main = app fa 1", false},
        {"main = event b; main", true},
        {"main = event a; main", false},
    };
    for (const auto& c : cases) {
        Program p = prog(c.text);
        for (bool canonical : {false, true}) {
            Verdict v = eval_hflz(trivial_lts(), temporal_pipeline(p, a, {canonical}));
            CHECK_MESSAGE(v.kind == (c.empty ? Verdict::Kind::Valid : Verdict::Kind::Invalid),
                          c.text << " canonical=" << canonical);
        }
    }
}

TEST_CASE("totality is required")
{
    ParityAutomaton a = aab();
    CHECK_THROWS_AS(infer_intersection_transform(prog("main = event a; ()"), a), Error);
    CHECK_THROWS_AS(infer_intersection_transform(prog("f x = if x > 0 then () else f x; main = f 1"), a), Error);
    Program total = instrument_total(prog("main = event a; ()"), "tick");
    ParityAutomaton ta = ignore_event(a, "tick");
    InterResult r = infer_intersection_transform(total, ta);
    CHECK_FALSE(r.program.defs.empty());
    CHECK(eval_hflz(trivial_lts(), temporal_pipeline(total, ta)).kind == Verdict::Kind::Valid);
    Program forever = instrument_total(prog("f x = event a; f x; main = f ()"), "tick");
    CHECK(eval_hflz(trivial_lts(), temporal_pipeline(forever, ta)).kind == Verdict::Kind::Invalid);
}

TEST_CASE("ignore_event")
{
    ParityAutomaton a = ignore_event(aab(), "tick");
    auto w = [](std::initializer_list<const char*> xs) { return Word(xs.begin(), xs.end()); };
    CHECK(a.is_total());
    CHECK(parity_accepts_lasso(a, {}, w({"a", "tick"})));
    CHECK(parity_accepts_lasso(a, w({"b", "tick"}), w({"tick", "a"})));
    CHECK_FALSE(parity_accepts_lasso(a, w({"a"}), w({"tick"})));
    CHECK_FALSE(parity_accepts_lasso(a, {}, w({"tick", "b"})));
    CHECK_THROWS_AS(ignore_event(aab(), "a"), Error);
}

TEST_CASE("temporal pipeline agrees with a product-graph oracle on random programs")
{
    std::mt19937 rng(4242);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const char* events[] = {"a", "b", "c"};
    int valid = 0, invalid = 0;
    for (int iter = 0; iter < 150; ++iter) {
        GraphProgram g;
        int n = pick(1, 3);
        g.defs.resize(n);
        for (auto& alts : g.defs) {
            int k = pick(1, 2);
            for (int j = 0; j < k; ++j) {
                GraphProgram::Alt alt;
                int len = pick(1, 2);
                for (int e = 0; e < len; ++e) alt.word.push_back(events[pick(0, 2)]);
                alt.target = pick(0, n - 1);
                alts.push_back(alt);
            }
        }
        ParityAutomaton a;
        int states = pick(1, 3);
        for (int s = 0; s < states; ++s) a.add_state("s" + std::to_string(s), pick(0, 2));
        a.alphabet = {"a", "b", "c"};
        for (int s = 0; s < states; ++s)
            for (const char* e : events) {
                a.delta[{s, e}].insert(pick(0, states - 1));
                if (pick(0, 3) == 0) a.delta[{s, e}].insert(pick(0, states - 1));
            }
        bool bad = accepting_lasso(g, a);
        Program p = prog(g.text());
        Verdict v = eval_hflz(trivial_lts(), temporal_pipeline(p, a));
        CHECK_MESSAGE(v.kind == (bad ? Verdict::Kind::Invalid : Verdict::Kind::Valid), g.text() << "\n"
                                                                                            << print_parity_automaton(a));
        if (iter % 5 == 0) CHECK(eval_hflz(trivial_lts(), temporal_pipeline(p, a, {true})).kind == v.kind);
        (bad ? invalid : valid)++;
    }
    CHECK(valid >= 20);
    CHECK(invalid >= 20);
}
