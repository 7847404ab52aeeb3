#include "hflz/parity_game.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace hflz {

Player opponent(Player p) { return p == Player::Verifier ? Player::Refuter : Player::Verifier; }

int ParityGame::add_node(Player who, int prio)
{
    owner.push_back(who);
    priority.push_back(prio);
    succ.emplace_back();
    return static_cast<int>(owner.size()) - 1;
}

void ParityGame::add_edge(int from, int to) { succ.at(from).push_back(to); }

int ParityGame::max_priority() const
{
    return priority.empty() ? 0 : *std::max_element(priority.begin(), priority.end());
}

namespace {

using Set = std::vector<char>;

class Zielonka {
public:
    explicit Zielonka(const ParityGame& g) : g_(g), pred_(g.size())
    {
        for (std::size_t v = 0; v < g.size(); ++v)
            for (int w : g.succ[v]) pred_[w].push_back(static_cast<int>(v));
    }

    GameSolution run()
    {
        const std::size_t n = g_.size();
        GameSolution sol;
        sol.winner.assign(n, Player::Verifier);
        Set alive(n, 1);
        // strip nodes from which a stuck owner can be forced, until none remain
        for (bool changed = true; changed;) {
            changed = false;
            for (Player p : {Player::Verifier, Player::Refuter}) {
                Set target(n, 0);
                bool any = false;
                for (std::size_t v = 0; v < n; ++v)
                    if (alive[v] && g_.owner[v] == opponent(p) && live_degree(static_cast<int>(v), alive) == 0) {
                        target[v] = 1;
                        any = true;
                    }
                if (!any) continue;
                Set won = attractor(alive, target, p);
                for (std::size_t v = 0; v < n; ++v)
                    if (won[v]) {
                        sol.winner[v] = p;
                        alive[v] = 0;
                    }
                changed = true;
            }
        }
        auto [w0, w1] = solve(alive);
        for (std::size_t v = 0; v < n; ++v) {
            if (w0[v]) sol.winner[v] = Player::Verifier;
            if (w1[v]) sol.winner[v] = Player::Refuter;
        }
        return sol;
    }

private:
    const ParityGame& g_;
    std::vector<std::vector<int>> pred_;

    int live_degree(int v, const Set& alive) const
    {
        int d = 0;
        for (int w : g_.succ[v]) d += alive[w] ? 1 : 0;
        return d;
    }

    // Nodes in `arena` from which p forces a visit to `target`.
    Set attractor(const Set& arena, const Set& target, Player p) const
    {
        const std::size_t n = g_.size();
        Set in(n, 0);
        std::vector<int> count(n, 0);
        std::deque<int> work;
        for (std::size_t v = 0; v < n; ++v) {
            if (!arena[v]) continue;
            count[v] = live_degree(static_cast<int>(v), arena);
            if (target[v]) {
                in[v] = 1;
                work.push_back(static_cast<int>(v));
            }
        }
        while (!work.empty()) {
            int w = work.front();
            work.pop_front();
            for (int v : pred_[w]) {
                if (!arena[v] || in[v]) continue;
                if (g_.owner[v] == p || --count[v] == 0) {
                    in[v] = 1;
                    work.push_back(v);
                }
            }
        }
        return in;
    }

    // Returns the winning regions of Verifier and Refuter inside `arena`.
    std::pair<Set, Set> solve(const Set& arena) const
    {
        const std::size_t n = g_.size();
        Set w0(n, 0), w1(n, 0);
        int top = -1;
        for (std::size_t v = 0; v < n; ++v)
            if (arena[v]) top = std::max(top, g_.priority[v]);
        if (top < 0) return {w0, w1};

        Player p = top % 2 == 0 ? Player::Verifier : Player::Refuter;
        Set target(n, 0);
        for (std::size_t v = 0; v < n; ++v) target[v] = arena[v] && g_.priority[v] == top;
        Set a = attractor(arena, target, p);
        Set rest(n, 0);
        for (std::size_t v = 0; v < n; ++v) rest[v] = arena[v] && !a[v];
        auto [r0, r1] = solve(rest);
        Set& theirs = p == Player::Verifier ? r1 : r0;
        if (std::none_of(theirs.begin(), theirs.end(), [](char c) { return c != 0; })) {
            Set& mine = p == Player::Verifier ? w0 : w1;
            mine = arena;
            return {w0, w1};
        }
        Set b = attractor(arena, theirs, opponent(p));
        Set rest2(n, 0);
        for (std::size_t v = 0; v < n; ++v) rest2[v] = arena[v] && !b[v];
        auto [s0, s1] = solve(rest2);
        for (std::size_t v = 0; v < n; ++v) {
            bool opp = b[v] || (p == Player::Verifier ? s1[v] : s0[v]);
            bool own = !b[v] && (p == Player::Verifier ? s0[v] : s1[v]);
            if (p == Player::Verifier) {
                w1[v] = opp;
                w0[v] = own;
            } else {
                w0[v] = opp;
                w1[v] = own;
            }
        }
        return {w0, w1};
    }
};

}  // namespace

GameSolution solve_parity_game(const ParityGame& g) { return Zielonka(g).run(); }

std::string print_game(const ParityGame& g)
{
    std::ostringstream os;
    os << "init " << g.init << '\n';
    for (std::size_t v = 0; v < g.size(); ++v) {
        os << "node " << v << ' ' << (g.owner[v] == Player::Verifier ? 'V' : 'R') << ' ' << g.priority[v] << " ->";
        for (int w : g.succ[v]) os << ' ' << w;
        os << '\n';
    }
    return os.str();
}

}  // namespace hflz
