#include "wmdp/spider.hpp"

#include "wmdp/classify.hpp"
#include "wmdp/graph.hpp"
#include "wmdp/numeric.hpp"

#include <algorithm>
#include <deque>

namespace wmdp {

std::optional<std::map<int, Int>> zero_ec_potential(const Mdp& m, const EndComponent& ec, int anchor) {
    std::map<int, std::vector<std::pair<int, Int>>> adj;
    for (const auto& [s, a] : ec.pairs)
        for (const auto& tr : m.actions[s][a].succ) {
            adj[s].push_back({tr.target, m.actions[s][a].weight});
            adj[tr.target].push_back({s, -m.actions[s][a].weight});
        }
    std::map<int, Int> pot{{anchor, 0}};
    std::deque<int> q{anchor};
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (const auto& [v, w] : adj[u]) {
            Int p = pot[u] + w;
            auto it = pot.find(v);
            if (it == pot.end()) {
                pot[v] = p;
                q.push_back(v);
            } else if (it->second != p) {
                return std::nullopt;
            }
        }
    }
    return pot;
}

SpiderResult spider(const Mdp& m, const EndComponent& ec, int s0, int step) {
    std::vector<int> choice(m.size(), -1);
    for (const auto& [s, a] : ec.pairs) {
        if (choice[s] >= 0) throw Error(ErrorKind::NotZeroBscc, "two actions at '" + m.names[s] + "'");
        choice[s] = a;
    }
    if (s0 < 0 || s0 >= m.size() || choice[s0] < 0)
        throw Error(ErrorKind::ReferenceOutsideEc, "reference state not in the component");
    for (const auto& [s, a] : ec.pairs)
        for (const auto& tr : m.actions[s][a].succ)
            if (choice[tr.target] < 0) throw Error(ErrorKind::NotZeroBscc, "component is not closed");
    {
        std::vector<std::vector<int>> adj(m.size());
        for (const auto& [s, a] : ec.pairs)
            for (const auto& tr : m.actions[s][a].succ) adj[s].push_back(tr.target);
        auto scc = strongly_connected_components(adj);
        for (const auto& [s, a] : ec.pairs)
            if (scc.comp[s] != scc.comp[s0])
                throw Error(ErrorKind::NotZeroBscc, "component is not strongly connected");
    }
    auto pot = zero_ec_potential(m, ec, s0);
    if (!pot) throw Error(ErrorKind::NotZeroBscc, "component has a cycle of nonzero weight");
    const std::string tau = "τ" + std::to_string(step);

    SpiderResult r;
    r.mdp.names = m.names;
    r.mdp.actions.resize(m.size());
    r.origin.resize(m.size());
    for (int s = 0; s < m.size(); ++s) {
        if (choice[s] >= 0 && s != s0) {
            // w(s, s0) = pot(s0) - pot(s)
            r.mdp.actions[s].push_back({tau, -pot->at(s), {{s0, Rat(1)}}});
            r.origin[s].push_back({s, -1});
            continue;
        }
        for (int a = 0; a < static_cast<int>(m.actions[s].size()); ++a) {
            if (a == choice[s]) continue;
            r.mdp.actions[s].push_back(m.actions[s][a]);
            r.origin[s].push_back({s, a});
        }
    }
    for (const auto& [s, a0] : ec.pairs) {
        if (s == s0) continue;
        for (int a = 0; a < static_cast<int>(m.actions[s].size()); ++a) {
            if (a == choice[s]) continue;
            Action moved = m.actions[s][a];
            moved.weight = pot->at(s) + moved.weight;
            bool clash = false;
            for (const auto& other : r.mdp.actions[s0]) clash = clash || other.name == moved.name;
            if (clash) moved.name += "@" + m.names[s];
            r.mdp.actions[s0].push_back(std::move(moved));
            r.origin[s0].push_back({s, a});
        }
    }
    return r;
}

SpiderTrace flatten_zero_ecs(const Mdp& m) {
    SpiderTrace trace;
    trace.final_mdp = m;
    for (bool again = true; again;) {
        again = false;
        for (const auto& mec : decompose_mecs(trace.final_mdp)) {
            Restriction r = restrict(trace.final_mdp, mec);
            Rat mp = mdp_mean_payoff(r.mdp, Opt::Max).value;
            if (mp > 0)
                throw Error(ErrorKind::PositiveMeanPayoffMec,
                            "end component at '" + r.mdp.names[0] + "' has mean payoff " + mp.get_str());
            if (mp < 0) continue;
            auto found = zero_ec_search(r.mdp).bscc;
            if (!found) continue;
            SpiderStep st;
            for (const auto& [s, a] : found->pairs) st.bscc.pairs.push_back({r.to_orig[s], r.action_orig[s][a]});
            std::sort(st.bscc.pairs.begin(), st.bscc.pairs.end());
            st.reference = st.bscc.pairs.front().first;
            st.result = spider(trace.final_mdp, st.bscc, st.reference, static_cast<int>(trace.steps.size()));
            for (int s : st.bscc.states())
                if (s != st.reference) st.tau_edges.push_back({s, st.result.mdp.actions[s][0].weight});
            trace.final_mdp = st.result.mdp;
            trace.steps.push_back(std::move(st));
            again = true;
            break;
        }
    }
    return trace;
}

MdScheduler lift_scheduler(const Mdp& before, const SpiderStep& step, const MdScheduler& t) {
    MdScheduler s(before.size(), -1);
    for (int x = 0; x < before.size(); ++x)
        if (t[x] >= 0) s[x] = step.result.origin[x][t[x]].second;
    for (const auto& [x, a] : step.bscc.pairs) s[x] = a;
    if (t[step.reference] >= 0) {
        const auto [src, beta] = step.result.origin[step.reference][t[step.reference]];
        s[src] = beta;
    }
    return s;
}

PurgedPath purge(const Mdp& m, const FinitePath& path, const EndComponent& ec) {
    path_weight(m, path);
    PurgedPath out;
    const std::size_t n = path.actions.size();
    auto in_ec = [&](int s, int a) {
        return std::binary_search(ec.pairs.begin(), ec.pairs.end(), std::make_pair(s, a));
    };
    std::optional<std::map<int, Int>> pot;
    if (!ec.pairs.empty()) pot = zero_ec_potential(m, ec, ec.pairs.front().first);
    auto w = [&](int s, int t) { return pot->at(t) - pot->at(s); };
    out.states.push_back(path.states[0]);
    std::size_t i = 0;
    while (i < n) {
        int start = path.states[i];
        if (!ec.contains_state(start) || !pot) {
            out.weights.push_back(m.actions[start][path.actions[i]].weight);
            out.states.push_back(path.states[i + 1]);
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && in_ec(path.states[j], path.actions[j])) ++j;
        if (j == n) {
            if (j > i) {
                out.weights.push_back(w(start, path.states[n]));
                out.states.push_back(path.states[n]);
            }
            break;
        }
        out.weights.push_back(w(start, path.states[j]) + m.actions[path.states[j]][path.actions[j]].weight);
        out.states.push_back(path.states[j + 1]);
        i = j + 1;
    }
    return out;
}

}  // namespace wmdp
