#include "wmdp/games.hpp"

#include <algorithm>
#include <deque>

namespace wmdp {

int MeanPayoffGame::add_vertex(int player) {
    owner.push_back(player);
    edges.emplace_back();
    return size() - 1;
}

GameSolution solve_mp_ge0(const MeanPayoffGame& g) {
    const int n = g.size();
    constexpr long long TOP = -1;
    std::vector<std::vector<std::pair<int, long long>>> adj(n);
    std::vector<std::vector<int>> pred(n);
    long long bound = 0;
    for (int v = 0; v < n; ++v) {
        long long worst = 0;
        for (const auto& e : g.edges[v]) {
            if (!e.weight.fits_slong_p() || abs(e.weight) > Int(1) << 40)
                throw Error(ErrorKind::TooLarge, "game weight out of range");
            long long w = e.weight.get_si();
            adj[v].push_back({e.to, w});
            pred[e.to].push_back(v);
            worst = std::max(worst, -w);
        }
        if (adj[v].empty()) throw Error(ErrorKind::AssumptionViolated, "game vertex without successor");
        bound += worst;
    }
    auto sub = [bound](long long a, long long w) -> long long {
        if (a == TOP) return TOP;
        long long x = std::max(0LL, a - w);
        return x > bound ? TOP : x;
    };
    auto less = [](long long a, long long b) {  // order with TOP as the maximum
        if (a == TOP) return false;
        if (b == TOP) return true;
        return a < b;
    };
    std::vector<long long> f(n, 0);
    std::deque<int> work;
    std::vector<bool> queued(n, true);
    for (int v = 0; v < n; ++v) work.push_back(v);
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        queued[v] = false;
        if (f[v] == TOP) continue;
        long long best = sub(f[adj[v][0].first], adj[v][0].second);
        for (std::size_t i = 1; i < adj[v].size(); ++i) {
            long long c = sub(f[adj[v][i].first], adj[v][i].second);
            if (g.owner[v] == 1 ? less(c, best) : less(best, c)) best = c;
        }
        if (less(f[v], best)) {
            f[v] = best;
            for (int u : pred[v])
                if (!queued[u]) {
                    queued[u] = true;
                    work.push_back(u);
                }
        }
    }
    GameSolution sol;
    sol.winning.assign(n, false);
    sol.strategy.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        sol.winning[v] = f[v] != TOP;
        if (!sol.winning[v] || g.owner[v] != 1) continue;
        for (std::size_t i = 0; i < adj[v].size(); ++i)
            if (sub(f[adj[v][i].first], adj[v][i].second) == f[v]) {
                sol.strategy[v] = static_cast<int>(i);
                break;
            }
    }
    return sol;
}

namespace {

MdpGame skeleton(const Mdp& m, bool negate) {
    MdpGame r;
    r.state_vertex.resize(m.size());
    r.pair_vertex.resize(m.size());
    for (int s = 0; s < m.size(); ++s) r.state_vertex[s] = r.game.add_vertex(1);
    for (int s = 0; s < m.size(); ++s)
        for (const auto& act : m.actions[s]) {
            int pv = r.game.add_vertex(2);
            r.pair_vertex[s].push_back(pv);
            r.game.add_edge(r.state_vertex[s], pv, negate ? Int(-act.weight) : act.weight);
            for (const auto& tr : act.succ) r.game.add_edge(pv, r.state_vertex[tr.target], 0);
        }
    return r;
}

}  // namespace

MdpGame mdp_as_game_for_sinf(const Mdp& m) {
    MdpGame r = skeleton(m, true);
    for (int s = 0; s < m.size(); ++s)
        if (m.is_trap(s)) r.game.add_edge(r.state_vertex[s], r.state_vertex[s], 0);
    return r;
}

MdpGame mdp_as_game_for_easdwr(const Mdp& m, int goal, const std::vector<bool>& good, int init,
                               const Int& K) {
    if (goal >= 0 && !m.is_trap(goal)) throw Error(ErrorKind::AssumptionViolated, "goal is not a trap");
    for (int s = 0; s < m.size(); ++s)
        if (good[s] && !m.is_trap(s)) throw Error(ErrorKind::AssumptionViolated, "good state is not a trap");
    MdpGame r = skeleton(m, false);
    for (int s = 0; s < m.size(); ++s) {
        if (!m.is_trap(s)) continue;
        int v = r.state_vertex[s];
        if (good[s])
            r.game.add_edge(v, v, 0);
        else if (s == goal)
            r.game.add_edge(v, r.state_vertex[init], -K);
        else
            r.game.add_edge(v, v, -1);
    }
    return r;
}

}  // namespace wmdp
