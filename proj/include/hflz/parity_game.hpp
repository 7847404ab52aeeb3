#pragma once

#include <string>
#include <vector>

namespace hflz {

// Verifier wins plays whose largest infinitely recurring priority is even;
// a player who cannot move loses.
enum class Player { Verifier, Refuter };

Player opponent(Player p);

struct ParityGame {
    std::vector<Player> owner;
    std::vector<int> priority;
    std::vector<std::vector<int>> succ;
    int init = 0;

    std::size_t size() const { return owner.size(); }
    int add_node(Player who, int prio);
    void add_edge(int from, int to);
    int max_priority() const;
};

struct GameSolution {
    std::vector<Player> winner;  // per node
};

// Recursive attractor decomposition.
GameSolution solve_parity_game(const ParityGame& g);

// `node <id> <V|R> <priority> -> <succ>...`, with `init <id>` first.
std::string print_game(const ParityGame& g);

}  // namespace hflz
