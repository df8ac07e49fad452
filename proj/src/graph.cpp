#include "wmdp/graph.hpp"

#include <algorithm>
#include <deque>

namespace wmdp {

void Digraph::add_edge(int u, int v, const Int& w, Aggregate agg) {
    for (auto& e : adj[u]) {
        if (e.to != v) continue;
        if (agg == Aggregate::Max ? w > e.weight : w < e.weight) e.weight = w;
        return;
    }
    adj[u].push_back({v, w});
}

Digraph weight_graph(const Mdp& m, Aggregate agg, const std::vector<bool>* keep) {
    Digraph g(m.size());
    for (int s = 0; s < m.size(); ++s) {
        if (keep && !(*keep)[s]) continue;
        for (const auto& act : m.actions[s])
            for (const auto& tr : act.succ)
                if (!keep || (*keep)[tr.target]) g.add_edge(s, tr.target, act.weight, agg);
    }
    return g;
}

SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    SccResult r;
    r.comp.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    int counter = 0;
    struct Frame {
        int v;
        std::size_t next;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next < adj[f.v].size()) {
                int w = adj[f.v][f.next++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            int v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    r.comp[w] = r.count;
                } while (w != v);
                ++r.count;
            }
        }
    }
    return r;
}

std::vector<EndComponent> decompose_mecs(const Mdp& m, const std::vector<std::vector<bool>>* allowed) {
    const int n = m.size();
    std::vector<std::vector<bool>> on(n);
    for (int s = 0; s < n; ++s) {
        on[s].assign(m.actions[s].size(), true);
        if (allowed)
            for (std::size_t a = 0; a < on[s].size(); ++a) on[s][a] = (*allowed)[s][a];
    }
    SccResult scc;
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::vector<int>> adj(n);
        for (int s = 0; s < n; ++s)
            for (std::size_t a = 0; a < on[s].size(); ++a)
                if (on[s][a])
                    for (const auto& tr : m.actions[s][a].succ) adj[s].push_back(tr.target);
        scc = strongly_connected_components(adj);
        std::vector<bool> alive(n, false);
        for (int s = 0; s < n; ++s)
            for (bool b : on[s]) alive[s] = alive[s] || b;
        for (int s = 0; s < n; ++s)
            for (std::size_t a = 0; a < on[s].size(); ++a) {
                if (!on[s][a]) continue;
                for (const auto& tr : m.actions[s][a].succ)
                    if (scc.comp[tr.target] != scc.comp[s] || !alive[tr.target]) {
                        on[s][a] = false;
                        changed = true;
                        break;
                    }
            }
    }
    std::vector<EndComponent> by_comp(scc.count);
    for (int s = 0; s < n; ++s)
        for (std::size_t a = 0; a < on[s].size(); ++a)
            if (on[s][a]) by_comp[scc.comp[s]].pairs.push_back({s, static_cast<int>(a)});
    std::vector<EndComponent> out;
    for (auto& ec : by_comp)
        if (!ec.pairs.empty()) out.push_back(std::move(ec));
    std::sort(out.begin(), out.end(), [](const EndComponent& x, const EndComponent& y) {
        return x.pairs.front().first < y.pairs.front().first;
    });
    return out;
}

bool is_strongly_connected(const Mdp& m) {
    if (m.size() == 0) return false;
    std::vector<std::vector<int>> adj(m.size());
    for (int s = 0; s < m.size(); ++s) {
        if (m.is_trap(s)) return false;
        for (const auto& act : m.actions[s])
            for (const auto& tr : act.succ) adj[s].push_back(tr.target);
    }
    return strongly_connected_components(adj).count == 1;
}

std::vector<bool> reachable_from(const Mdp& m, const std::vector<int>& sources) {
    std::vector<bool> seen(m.size(), false);
    std::deque<int> q;
    for (int s : sources)
        if (!seen[s]) {
            seen[s] = true;
            q.push_back(s);
        }
    while (!q.empty()) {
        int s = q.front();
        q.pop_front();
        for (const auto& act : m.actions[s])
            for (const auto& tr : act.succ)
                if (!seen[tr.target]) {
                    seen[tr.target] = true;
                    q.push_back(tr.target);
                }
    }
    return seen;
}

namespace {

// Backward closure: states with a path into `from` whose intermediate states satisfy `through`.
std::vector<bool> backward_closure(const Mdp& m, const std::vector<bool>& from,
                                   const std::vector<bool>& through) {
    const int n = m.size();
    std::vector<std::vector<int>> pred(n);
    for (int s = 0; s < n; ++s)
        for (const auto& act : m.actions[s])
            for (const auto& tr : act.succ) pred[tr.target].push_back(s);
    std::vector<bool> in = from;
    std::deque<int> q;
    for (int s = 0; s < n; ++s)
        if (in[s]) q.push_back(s);
    while (!q.empty()) {
        int t = q.front();
        q.pop_front();
        for (int s : pred[t])
            if (!in[s] && through[s]) {
                in[s] = true;
                q.push_back(s);
            }
    }
    return in;
}

// Greatest set of non-target states from which the targets can be avoided surely.
std::vector<bool> sure_avoid(const Mdp& m, const std::vector<bool>& targets) {
    const int n = m.size();
    std::vector<bool> z(n);
    for (int s = 0; s < n; ++s) z[s] = !targets[s];
    for (bool changed = true; changed;) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (!z[s] || m.is_trap(s)) continue;
            bool ok = false;
            for (const auto& act : m.actions[s]) {
                bool inside = true;
                for (const auto& tr : act.succ) inside = inside && z[tr.target];
                if (inside) {
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                z[s] = false;
                changed = true;
            }
        }
    }
    return z;
}

}  // namespace

std::vector<bool> qualitative_reach(const Mdp& m, const std::vector<bool>& targets, Quant q, Bound b) {
    const int n = m.size();
    std::vector<bool> all(n, true);
    if (q == Quant::Max && b == Bound::Positive) return backward_closure(m, targets, all);
    if (q == Quant::Min && b == Bound::Positive) {
        auto z = sure_avoid(m, targets);
        for (int s = 0; s < n; ++s) z[s] = !z[s];
        return z;
    }
    if (q == Quant::Min) {
        auto z = sure_avoid(m, targets);
        std::vector<bool> non_target(n);
        for (int s = 0; s < n; ++s) non_target[s] = !targets[s];
        auto bad = backward_closure(m, z, non_target);
        for (int s = 0; s < n; ++s) bad[s] = !bad[s];
        return bad;
    }
    std::vector<bool> u(n, true);
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<bool> x(n, false);
        for (int s = 0; s < n; ++s) x[s] = targets[s] && u[s];
        for (bool grew = true; grew;) {
            grew = false;
            for (int s = 0; s < n; ++s) {
                if (x[s] || !u[s]) continue;
                for (const auto& act : m.actions[s]) {
                    bool inside = true, hits = false;
                    for (const auto& tr : act.succ) {
                        inside = inside && u[tr.target];
                        hits = hits || x[tr.target];
                    }
                    if (inside && hits) {
                        x[s] = true;
                        grew = true;
                        break;
                    }
                }
            }
        }
        if (x != u) {
            u = x;
            changed = true;
        }
    }
    return u;
}

std::string PathWeight::str() const {
    switch (kind) {
    case Kind::Unreachable: return "unreachable";
    case Kind::NegInf: return "-inf";
    case Kind::PosInf: return "+inf";
    case Kind::Finite: return value.get_str();
    }
    return "";
}

std::vector<PathWeight> extremal_path_weights(const Digraph& g, int source, Extremum mode) {
    const int n = g.size();
    const bool mx = mode == Extremum::Max;
    auto better = [mx](const Int& a, const Int& b) { return mx ? a > b : a < b; };
    std::vector<bool> set(n, false);
    std::vector<Int> d(n, 0);
    set[source] = true;
    for (int round = 0; round + 1 < n; ++round) {
        bool moved = false;
        for (int u = 0; u < n; ++u) {
            if (!set[u]) continue;
            for (const auto& e : g.adj[u]) {
                Int c = d[u] + e.weight;
                if (!set[e.to] || better(c, d[e.to])) {
                    set[e.to] = true;
                    d[e.to] = c;
                    moved = true;
                }
            }
        }
        if (!moved) break;
    }
    std::vector<bool> inf(n, false);
    std::deque<int> q;
    for (int u = 0; u < n; ++u) {
        if (!set[u]) continue;
        for (const auto& e : g.adj[u])
            if (better(d[u] + e.weight, d[e.to]) && !inf[e.to]) {
                inf[e.to] = true;
                q.push_back(e.to);
            }
    }
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (const auto& e : g.adj[u])
            if (!inf[e.to]) {
                inf[e.to] = true;
                q.push_back(e.to);
            }
    }
    std::vector<PathWeight> out(n);
    for (int v = 0; v < n; ++v) {
        if (inf[v])
            out[v].kind = mx ? PathWeight::Kind::PosInf : PathWeight::Kind::NegInf;
        else if (set[v]) {
            out[v].kind = PathWeight::Kind::Finite;
            out[v].value = d[v];
        }
    }
    return out;
}

PathWeight extremal_path_weight(const Digraph& g, int source, int target, Extremum mode) {
    return extremal_path_weights(g, source, mode)[target];
}

std::optional<std::vector<int>> detect_sign_cycle(const Digraph& g, Sign sign, std::optional<int> from) {
    const int n = g.size();
    // Look for a negative cycle of the sign-adjusted weights.
    auto w = [sign](const Int& x) { return sign == Sign::Negative ? x : Int(-x); };
    std::vector<bool> set(n, !from.has_value());
    std::vector<Int> d(n, 0);
    std::vector<int> pred(n, -1);
    if (from) set[*from] = true;
    int last = -1;
    for (int round = 0; round < n; ++round) {
        last = -1;
        for (int u = 0; u < n; ++u) {
            if (!set[u]) continue;
            for (const auto& e : g.adj[u]) {
                Int c = d[u] + w(e.weight);
                if (!set[e.to] || c < d[e.to]) {
                    set[e.to] = true;
                    d[e.to] = c;
                    pred[e.to] = u;
                    last = e.to;
                }
            }
        }
        if (last < 0) return std::nullopt;
    }
    int v = last;
    for (int i = 0; i < n; ++i) v = pred[v];
    std::vector<int> cycle{v};
    for (int u = pred[v]; u != v; u = pred[u]) cycle.push_back(u);
    std::reverse(cycle.begin(), cycle.end());
    return cycle;
}

}  // namespace wmdp
