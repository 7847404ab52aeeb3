#include "doctest.h"
#include "fuzz_support.hpp"
#include "hflz/checker.hpp"

#include <chrono>
#include <random>

using namespace hflz;
using namespace hflz::fuzz;

namespace {

const char* kFile = "state q0 init\nstate q1\ntrans q0 read q0\ntrans q0 close q1\n";
const char* kFile2 = "state q0 init\nstate q1\nstate q2\ntrans q0 read q0\ntrans q0 close q1\ntrans q1 end q2\n";
const char* kL1 = "state q0 init\nstate q1\nstate q2\ntrans q0 a q1\ntrans q1 b q2\ntrans q2 c q1\n";
const char* kPhiAb = "mu X:prop -> prop. \\Y:prop. Y \\/ <a> X (<b> Y)";
const char* kPhiEven = "nu X:prop -> int -> prop. \\Y:prop. \\Z:int. even(Z) /\\ Y \\/ <a> X (<b> Y) (Z + 1)";
const char* kHesPrime = "F (y:int) x (k:prop -> prop) =mu (y != 0 \\/ <close> k x) /\\ (y = 0 \\/ <read> F (y - 1) x k);\n"
                        "main: F (%d) true (\\r:prop. <end> true);";

std::set<StateId> den(const char* lts, const std::string& f) { return denotational_eval(parse_lts(lts), parse_formula(f)); }

Hes hes_prime(int n)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, kHesPrime, n);
    return parse_hes(buf);
}

Hes of_formula(const std::string& f) { return formula_to_hes(parse_formula(f)); }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool has_cycle(const ParityGame& g)
{
    std::vector<int> color(g.size(), 0);
    std::function<bool(int)> dfs = [&](int v) {
        color[v] = 1;
        for (int w : g.succ[v]) {
            if (color[w] == 1) return true;
            if (color[w] == 0 && dfs(w)) return true;
        }
        color[v] = 2;
        return false;
    };
    for (std::size_t v = 0; v < g.size(); ++v)
        if (color[v] == 0 && dfs(static_cast<int>(v))) return true;
    return false;
}

}  // namespace

TEST_CASE("denotational: worked examples")
{
    auto t0 = std::chrono::steady_clock::now();
    CHECK(den(kFile, "nu X:prop. <close> true /\\ <read> X") == std::set<StateId>{0});
    CHECK(den(kL1, std::string("(") + kPhiAb + ") (<c> true)") == std::set<StateId>{0, 2});
    CHECK(den(kL1, std::string("(") + kPhiEven + ") (<c> true) 0") == std::set<StateId>{2});
    CHECK(den(kL1, "true") == std::set<StateId>{0, 1, 2});
    CHECK(seconds_since(t0) < 1.0);
}

TEST_CASE("denotational: hierarchical systems and free propositions")
{
    Lts l = parse_lts(kFile);
    CHECK(denotational_check(l, parse_hes("X =nu <close> true /\\ <read> X; main: X;")) == std::set<StateId>{0});
    CHECK(denotational_check(l, parse_hes("X =mu <read> X; main: X;")).empty());
    CHECK(denotational_eval(l, parse_formula("<read> p"), {{"p", {0}}}) == std::set<StateId>{0});
    CHECK(denotational_eval(l, parse_formula("[close] p"), {{"p", {}}}) == std::set<StateId>{1});
}

TEST_CASE("denotational: integer demand stays finite only where states allow")
{
    Lts l = parse_lts(kFile);
    Hes h = parse_hes("F (y:int) =mu <read> F (y + 1); main: F 0;");
    CHECK_THROWS_AS(denotational_check(l, h, {1000, 4096}), Error);
}

TEST_CASE("denotational: fixpoints are fixed and functionals monotone")
{
    Fuzzer fz(11);
    for (int round = 0; round < 100; ++round) {
        Lts l = fz.lts();
        Hes h;
        h.equations.push_back({"Z", {}, Fix::Nu, fml::tt()});
        FormulaPtr body = fz.formula(h, {"X"}, 3);
        body = substitute(body, {{"Z", fml::var("X")}});
        std::set<StateId> all;
        for (std::size_t q = 0; q < l.size(); ++q) all.insert(static_cast<StateId>(q));
        std::vector<std::set<StateId>> subsets;
        for (unsigned m = 0; m < (1u << l.size()); ++m) {
            std::set<StateId> s;
            for (std::size_t q = 0; q < l.size(); ++q)
                if (m >> q & 1) s.insert(static_cast<StateId>(q));
            subsets.push_back(s);
        }
        for (const auto& a : subsets)
            for (const auto& b : subsets) {
                if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) continue;
                auto fa = denotational_eval(l, body, {{"X", a}});
                auto fb = denotational_eval(l, body, {{"X", b}});
                CHECK(std::includes(fb.begin(), fb.end(), fa.begin(), fa.end()));
            }
        for (bool mu : {true, false}) {
            FormulaPtr fx = mu ? fml::mu("X", HflType::prop(), body) : fml::nu("X", HflType::prop(), body);
            auto r = denotational_eval(l, fx);
            CHECK(denotational_eval(l, body, {{"X", r}}) == r);
            // Kleene chain from the bottom (top) stays below (above) the result
            std::set<StateId> x = mu ? std::set<StateId>{} : all;
            for (std::size_t i = 0; i <= l.size(); ++i) {
                if (mu) CHECK(std::includes(r.begin(), r.end(), x.begin(), x.end()));
                else CHECK(std::includes(x.begin(), x.end(), r.begin(), r.end()));
                x = denotational_eval(l, body, {{"X", x}});
            }
            CHECK(x == r);
        }
    }
}

TEST_CASE("ground game shapes")
{
    Hes loop = parse_hes("loop x =mu loop x; main: loop true;");
    GroundGame g = ground_game(trivial_lts(), loop);
    CHECK(g.complete);
    CHECK(has_cycle(g.game));
    bool odd_loop = false;
    for (std::size_t v = 0; v < g.game.size(); ++v)
        for (int w : g.game.succ[v])
            if (w == static_cast<int>(v) && g.game.priority[v] % 2 == 1) odd_loop = true;
    CHECK(odd_loop);
    CHECK(g.game.size() <= 3);
    CHECK(solve_parity_game(g.game).winner[g.game.init] == Player::Refuter);

    Hes dead = parse_hes("X =nu <b> X; main: X;");
    GroundGame d = ground_game(parse_lts(kFile), dead);
    CHECK(solve_parity_game(d.game).winner[d.game.init] == Player::Refuter);

    GroundGame p = ground_game(parse_lts(kFile2), hes_prime(1));
    CHECK(p.complete);
    CHECK_FALSE(has_cycle(p.game));
    CHECK(p.game.size() <= 30);
    CHECK(solve_parity_game(p.game).winner[p.game.init] == Player::Verifier);
}

TEST_CASE("ground games are deterministic")
{
    Hes h = hes_prime(3);
    CHECK(print_game(ground_game(parse_lts(kFile2), h).game) == print_game(ground_game(parse_lts(kFile2), h).game));
}

TEST_CASE("eval_hflz: file protocol with integers")
{
    Lts l = parse_lts(kFile2);
    auto t0 = std::chrono::steady_clock::now();
    for (int n : {0, 1, 2, 5}) CHECK_MESSAGE(eval_hflz(l, hes_prime(n)).kind == Verdict::Kind::Valid, n);
    for (int n : {-1, -3}) CHECK_MESSAGE(eval_hflz(l, hes_prime(n)).kind == Verdict::Kind::Invalid, n);
    CHECK(seconds_since(t0) < 5.0);
}

TEST_CASE("eval_hflz: quantifier encodings")
{
    Lts l = trivial_lts();
    auto q = [](Quantifier k, const char* body) {
        Hes h;
        h.main = encode_quantifier(k, "Q", parse_formula(body));
        return formula_to_hes(h.main);
    };
    CHECK(eval_hflz(l, q(Quantifier::Forall, "\\x:int. 0 = 0")).kind == Verdict::Kind::Valid);
    CHECK(eval_hflz(l, q(Quantifier::Forall, "\\x:int. x >= 0")).kind == Verdict::Kind::Invalid);
    CHECK(eval_hflz(l, q(Quantifier::Exists, "\\x:int. x = 5")).kind == Verdict::Kind::Valid);
    CHECK(eval_hflz(l, q(Quantifier::Exists, "\\x:int. x = x + 1")).kind == Verdict::Kind::Unknown);
}

TEST_CASE("eval_hflz: budget exhaustion is unknown")
{
    Hes h = parse_hes("F (x:int) (y:int) =nu x != y /\\ F y (x + y); main: F 1 2;");
    Verdict v = eval_hflz(trivial_lts(), h, 500);
    CHECK(v.kind == Verdict::Kind::Unknown);
    CHECK(v.reason == "budget");
}

TEST_CASE("eval_hflz: calls through non-recursive equations do not count as recursion")
{
    const char* src =
        "app (h:int -> prop) (x:int) =%s h x;\n"
        "fb (x:int) =nu (x <= 0 \\/ app fa (x - 1)) /\\ (x > 0 \\/ app fb 5);\n"
        "fa (x:int) =mu (x <= 0 \\/ app fa (x - 1)) /\\ (x > 0 \\/ app fb 5);\n"
        "main: fb 5;";
    for (const char* fix : {"mu", "nu"}) {
        char buf[512];
        std::snprintf(buf, sizeof buf, src, fix);
        CHECK(eval_hflz(trivial_lts(), parse_hes(buf)).kind == Verdict::Kind::Valid);
    }
}

TEST_CASE("eval_hflz: a closure called around a cycle is not decided")
{
    // app's unfoldings sit between the creation of h and its call; a plain parity
    // condition would count them and wrongly report invalid
    Hes h = parse_hes(
        "app (h:int -> prop) (x:int) =mu (x <= 0 \\/ app h (x - 1)) /\\ h x;\n"
        "fb (x:int) =nu app fb x;\n"
        "main: fb 1;");
    Verdict v = eval_hflz(trivial_lts(), h);
    CHECK(v.kind == Verdict::Kind::Unknown);
    CHECK(v.reason == "closure call on a cycle");
    GroundGame gg = ground_game(trivial_lts(), h);
    CHECK(closure_call_on_cycle(gg));
}

TEST_CASE("cross_check: worked examples through both backends")
{
    CHECK(cross_check(parse_lts(kFile), of_formula("nu X:prop. <close> true /\\ <read> X")).agree);
    auto ab = cross_check(parse_lts(kL1), of_formula(std::string("(") + kPhiAb + ") (<c> true)"));
    CHECK(ab.agree);
    CHECK(ab.denotational);
    auto even = cross_check(parse_lts(kL1), of_formula(std::string("(") + kPhiEven + ") (<c> true) 0"));
    CHECK(even.agree);
    CHECK_FALSE(even.denotational);
    Lts l1 = parse_lts(kL1);
    l1.init = 2;
    CHECK(cross_check(l1, of_formula(std::string("(") + kPhiEven + ") (<c> true) 0")).denotational);
    CHECK(cross_check(l1, of_formula("true")).agree);
}

TEST_CASE("fuzz: denotational and game backends agree on pure order-1 systems")
{
    Fuzzer fz(2024);
    int mismatches = 0;
    for (int i = 0; i < 200; ++i) {
        Lts l = fz.lts();
        Hes h = fz.hes();
        CrossCheckReport r = cross_check(l, h);
        if (!r.agree) {
            ++mismatches;
            MESSAGE("mismatch on\n" << print_lts(l) << print_hes(h) << "smallest: " << r.detail);
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("fuzz: duals are involutive and complementary")
{
    Fuzzer fz(99);
    int decided = 0;
    for (int i = 0; i < 200; ++i) {
        Lts l = fz.lts();
        Hes h = fz.hes();
        Hes d = dual_hes(h);
        CHECK(alpha_equal(dual_hes(d), h));
        Verdict a = eval_hflz(l, h), b = eval_hflz(l, d);
        CHECK_FALSE((a.kind == Verdict::Kind::Valid && b.kind == Verdict::Kind::Valid));
        CHECK_FALSE((a.kind == Verdict::Kind::Invalid && b.kind == Verdict::Kind::Invalid));
        if (a.kind != Verdict::Kind::Unknown && b.kind != Verdict::Kind::Unknown) ++decided;
        auto sa = denotational_check(l, h), sb = denotational_check(l, d);
        for (std::size_t q = 0; q < l.size(); ++q) CHECK(sa.count(static_cast<StateId>(q)) != sb.count(static_cast<StateId>(q)));
    }
    CHECK(decided == 200);
}
