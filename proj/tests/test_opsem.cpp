#include "doctest.h"
#include "hflz/opsem.hpp"

using namespace hflz;

namespace {

const char* kFile = "f x = (event close; ()) <> (event read; event read; f x); main = f ()";
const char* kLoop = "loop x = loop x; main = loop (event a; ())";
const char* kApp =
    "app h x = h x;\n"
    "fb x = if x > 0 then event a; app fa (x - 1) else event b; app fb 5;\n"
    "fa x = if x > 0 then event a; app fa (x - 1) else event b; app fb 5;\n"
    "main = fb 5";

Program prog(const char* src) { return normalize_program(parse_program(src)); }

Trace tr(std::initializer_list<const char*> xs) { return Trace(xs.begin(), xs.end()); }

}  // namespace

TEST_CASE("step: individual rules")
{
    Program p = prog("main = ()");
    auto ev = step(p, term::event("a", term::unit()));
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].label == "a");
    CHECK(ev[0].term->kind == Term::Kind::Unit);

    auto nd = step(p, parse_program("main = (event a; ()) <> (event b; ())").defs[0].body);
    CHECK(nd.size() == 2);
    CHECK(nd[0].label.empty());

    auto br = step(p, parse_program("main = if 0 = 0 then event a; () else ()").defs[0].body);
    REQUIRE(br.size() == 1);
    CHECK(to_string(*br[0].term) == "event a; ()");
    CHECK(step(p, term::unit()).empty());
}

TEST_CASE("step: beta folds integer arguments")
{
    Program p = prog("f x k = if x = 0 then k else f (x - 1) k; main = f (2 * 3) ()");
    auto s = step(p, p.find("main")->body);
    REQUIRE(s.size() == 1);
    CHECK(to_string(*s[0].term) == "if 6 = 0 then () else f (6 - 1) ()");
}

TEST_CASE("step: partial application is reported")
{
    Program p = prog("f x y = (); main = ()");
    CHECK_THROWS_AS(step(p, term::app(term::var("f"), term::unit())), Error);
}

TEST_CASE("traces: file program")
{
    TraceSet ts = enumerate_traces(prog(kFile), 8);
    for (const auto& t : {tr({}), tr({"read"}), tr({"read", "read"}), tr({"close"}), tr({"read", "read", "close"})})
        CHECK(ts.finite.count(t) == 1);
    CHECK(ts.maximal.count(tr({"close"})) == 1);
    CHECK(ts.maximal.count(tr({"read"})) == 0);
    CHECK_FALSE(ts.frontier.empty());
}

TEST_CASE("traces: trivial and looping programs")
{
    TraceSet unit = enumerate_traces(prog("main = ()"), 4);
    CHECK(unit.maximal == std::set<Trace>{tr({})});
    CHECK(unit.frontier.empty());
    for (int d = 1; d <= 6; ++d) {
        TraceSet loop = enumerate_traces(prog(kLoop), d);
        CHECK(loop.finite == std::set<Trace>{tr({})});
        CHECK_FALSE(loop.frontier.empty());
    }
}

TEST_CASE("traces: exploration is monotone in depth")
{
    Program p = prog(kFile);
    for (int d = 0; d < 10; ++d) {
        TraceSet a = enumerate_traces(p, d);
        TraceSet b = enumerate_traces(p, d + 1);
        CHECK(std::includes(b.finite.begin(), b.finite.end(), a.finite.begin(), a.finite.end()));
    }
}

TEST_CASE("reduce_with_choice")
{
    Program p = prog("main = (event a; ()) <> (event b; ())");
    ChoiceRun r = reduce_with_choice(p, term::var("main"), {Choice::L});
    CHECK(r.status == ChoiceRun::Status::NormalForm);
    CHECK(r.events == tr({"a"}));
    CHECK(r.remaining.empty());

    ChoiceRun e = reduce_with_choice(p, term::var("main"), {});
    CHECK(e.status == ChoiceRun::Status::Exhausted);

    Program p0 = prog("f = if true then (event a; f) else (event b; f); main = f");
    ChoiceRun d = reduce_with_choice(p0, term::var("main"), {}, 6);
    CHECK(d.status == ChoiceRun::Status::StepBound);
    REQUIRE_FALSE(d.events.empty());
    CHECK(d.events[0] == "a");
}

TEST_CASE("reduce_with_choice agrees with step")
{
    Program p = prog(kFile);
    std::vector<Choice> pi{Choice::R, Choice::R, Choice::L};
    TermPtr t = term::var("main");
    for (int k = 1; k < 12; ++k) {
        ChoiceRun prev = reduce_with_choice(p, term::var("main"), pi, k - 1);
        ChoiceRun cur = reduce_with_choice(p, term::var("main"), pi, k);
        if (cur.steps == prev.steps) break;
        bool found = false;
        for (const auto& s : step(p, prev.term)) found = found || to_string(*s.term) == to_string(*cur.term);
        CHECK(found);
    }
}

TEST_CASE("call sequences: app program against its closed form")
{
    auto seqs = call_sequence_prefixes(prog(kApp), 40);
    std::set<std::vector<std::string>> got;
    for (const auto& s : seqs) {
        REQUIRE(s.symbols.front() == "main");
        std::vector<std::string> rest(s.symbols.begin() + 1, s.symbols.end());
        if (rest.size() <= 8) got.insert(rest);
    }
    // prefixes of (fb fa^5)^w, and s.app for nonempty such prefixes s
    std::set<std::vector<std::string>> expected;
    std::vector<std::string> word;
    for (int i = 0; i < 8; ++i) word.push_back(i % 6 == 0 ? "fb" : "fa");
    for (std::size_t n = 0; n <= 8; ++n) {
        std::vector<std::string> pre(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(n));
        expected.insert(pre);
        if (n >= 1 && n + 1 <= 8) {
            pre.push_back("app");
            expected.insert(pre);
        }
    }
    CHECK(got == expected);
}

TEST_CASE("call sequences: trivial and duplicated programs")
{
    auto triv = call_sequence_prefixes(prog("main = ()"), 10);
    REQUIRE(triv.size() == 1);
    CHECK(triv.begin()->symbols == std::vector<std::string>{"main"});

    auto dup = call_sequence_prefixes(
        prog("fb = if true then (event a; fa) else (event b; fb); fa = if true then (event a; fa) else (event b; fb);"
             " main = fb"),
        12);
    std::size_t longest = 0;
    for (const auto& s : dup) {
        for (std::size_t i = 2; i < s.symbols.size(); ++i) CHECK(s.symbols[i] == "fa");
        for (int k : std::vector<int>(s.steps.begin() + (s.steps.empty() ? 0 : 1), s.steps.end())) CHECK(k == 3);
        longest = std::max(longest, s.symbols.size());
    }
    CHECK(longest >= 4);
}

TEST_CASE("call sequences embed into the reduction path")
{
    // deterministic program: one path, whose head symbols must contain every call sequence in order
    Program p = prog(kApp);
    std::vector<std::string> heads;
    TermPtr t = term::var("main");
    for (int k = 0; k <= 40; ++k) {
        TermPtr h;
        std::vector<TermPtr> as;
        spine(t, h, as);
        if (h->kind == Term::Kind::Var) heads.push_back(h->name);
        auto s = step(p, t);
        if (s.empty()) break;
        t = s[0].term;
    }
    for (const auto& s : call_sequence_prefixes(p, 40)) {
        std::size_t i = 0;
        for (const auto& h : heads)
            if (i < s.symbols.size() && h == s.symbols[i]) ++i;
        CHECK(i == s.symbols.size());
    }
}

TEST_CASE("must_reach_bounded")
{
    const char* loopxy =
        "loop x y = if x <= 0 || y <= 0 then event end; () else loop (x - 1) (y * y) <> loop x (y - 1);"
        "main = loop %d %d";
    for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {3, 1}}) {
        char buf[256];
        std::snprintf(buf, sizeof buf, loopxy, m, n);
        CHECK(must_reach_bounded(prog(buf), "end", 50) == Verdict3::Yes);
    }
    CHECK(must_reach_bounded(prog("main = ()"), "end", 10) == Verdict3::No);
    CHECK(must_reach_bounded(prog(kLoop), "a", 5) == Verdict3::Unknown);
    CHECK(must_reach_bounded(prog("main = (event end; ()) <> ()"), "end", 10) == Verdict3::No);
}
