#pragma once

#include "wmdp/model.hpp"

#include <vector>

namespace wmdp {

struct GameEdge {
    int to;
    Int weight;
};

struct MeanPayoffGame {
    std::vector<int> owner;  // 1 = maximizer of mean payoff, 2 = minimizer
    std::vector<std::vector<GameEdge>> edges;

    int size() const { return static_cast<int>(owner.size()); }
    int add_vertex(int player);
    void add_edge(int u, int v, const Int& w) { edges[u].push_back({v, w}); }
};

struct GameSolution {
    std::vector<bool> winning;  // player 1 ensures mean payoff >= 0
    std::vector<int> strategy;  // edge index for player-1 vertices in the winning region, else -1
};

GameSolution solve_mp_ge0(const MeanPayoffGame& g);

// Vertex maps shared by the MDP-to-game constructions.
struct MdpGame {
    MeanPayoffGame game;
    std::vector<int> state_vertex;                // state -> vertex
    std::vector<std::vector<int>> pair_vertex;    // (state, action) -> vertex
};

// Scheduler owns states, chance owns pairs; weights negated. Traps loop with weight 0.
MdpGame mdp_as_game_for_sinf(const Mdp& m);

// Weights kept; good states loop with 0, goal returns to init with -K, other traps loop with -1.
MdpGame mdp_as_game_for_easdwr(const Mdp& m, int goal, const std::vector<bool>& good, int init,
                               const Int& K);

}  // namespace wmdp
