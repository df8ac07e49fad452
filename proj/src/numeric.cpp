#include "wmdp/numeric.hpp"

#include "wmdp/graph.hpp"

#include <algorithm>

namespace wmdp {

RatVector solve_linear(const RatMatrix& a, const RatVector& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw Error(ErrorKind::Singular, "dimension mismatch");
    std::vector<std::vector<Int>> m(n, std::vector<Int>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw Error(ErrorKind::Singular, "matrix not square");
        Int scale = 1;
        for (std::size_t j = 0; j < n; ++j) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), a[i][j].get_den_mpz_t());
        mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), b[i].get_den_mpz_t());
        for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i][j].get_num() * (scale / a[i][j].get_den());
        m[i][n] = b[i].get_num() * (scale / b[i].get_den());
    }
    Int prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && m[p][k] == 0) ++p;
        if (p == n) throw Error(ErrorKind::Singular, "no pivot in column " + std::to_string(k));
        std::swap(m[p], m[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j <= n; ++j) {
                Int v = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                m[i][j] = v;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    RatVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        Rat acc = Rat(m[i][n]);
        for (std::size_t j = i + 1; j < n; ++j) acc -= Rat(m[i][j]) * x[j];
        x[i] = acc / Rat(m[i][i]);
        x[i].canonicalize();
    }
    return x;
}

namespace {

std::vector<std::vector<int>> chain_adj(const MarkovChain& c) {
    std::vector<std::vector<int>> adj(c.size());
    for (int s = 0; s < c.size(); ++s)
        for (const auto& tr : c.rows[s]) adj[s].push_back(tr.target);
    return adj;
}

// Stationary distribution of the closed class `cls` (sorted state list).
RatVector stationary_on(const MarkovChain& c, const std::vector<int>& cls) {
    const std::size_t k = cls.size();
    std::vector<int> idx(c.size(), -1);
    for (std::size_t i = 0; i < k; ++i) idx[cls[i]] = static_cast<int>(i);
    // Rows j of (P^T - I) pi = 0, last row replaced by sum(pi) = 1.
    RatMatrix a(k, RatVector(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
        for (const auto& tr : c.rows[cls[i]]) a[idx[tr.target]][i] += tr.prob;
        a[i][i] -= 1;
    }
    RatVector b(k, 0);
    for (std::size_t j = 0; j < k; ++j) a[k - 1][j] = 1;
    b[k - 1] = 1;
    return solve_linear(a, b);
}

}  // namespace

bool chain_strongly_connected(const MarkovChain& c) {
    if (c.size() == 0) return false;
    for (const auto& row : c.rows)
        if (row.empty()) return false;
    return strongly_connected_components(chain_adj(c)).count == 1;
}

RatVector stationary_distribution(const MarkovChain& c) {
    if (!chain_strongly_connected(c)) throw Error(ErrorKind::NotStronglyConnected, "chain");
    std::vector<int> all(c.size());
    for (int i = 0; i < c.size(); ++i) all[i] = i;
    return stationary_on(c, all);
}

Rat mc_mean_payoff(const MarkovChain& c) {
    RatVector pi = stationary_distribution(c);
    Rat v = 0;
    for (int s = 0; s < c.size(); ++s) v += pi[s] * Rat(c.weight[s]);
    return v;
}

RatVector expected_until(const MarkovChain& c, int anchor, UntilKind kind) {
    if (!chain_strongly_connected(c)) throw Error(ErrorKind::NotStronglyConnected, "chain");
    const int n = c.size();
    std::vector<int> idx(n, -1), rev;
    for (int s = 0; s < n; ++s)
        if (s != anchor) {
            idx[s] = static_cast<int>(rev.size());
            rev.push_back(s);
        }
    const std::size_t k = rev.size();
    RatMatrix a(k, RatVector(k, 0));
    RatVector b(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        int s = rev[i];
        a[i][i] += 1;
        for (const auto& tr : c.rows[s])
            if (tr.target != anchor) a[i][idx[tr.target]] -= tr.prob;
        b[i] = kind == UntilKind::Weight ? Rat(c.weight[s]) : Rat(1);
    }
    RatVector x = k ? solve_linear(a, b) : RatVector{};
    RatVector out(n, 0);
    for (std::size_t i = 0; i < k; ++i) out[rev[i]] = x[i];
    return out;
}

std::vector<std::vector<int>> chain_bsccs(const MarkovChain& c) {
    auto adj = chain_adj(c);
    auto scc = strongly_connected_components(adj);
    std::vector<bool> bottom(scc.count, true);
    for (int s = 0; s < c.size(); ++s) {
        if (c.rows[s].empty()) bottom[scc.comp[s]] = false;
        for (int t : adj[s])
            if (scc.comp[t] != scc.comp[s]) bottom[scc.comp[s]] = false;
    }
    std::vector<std::vector<int>> by(scc.count);
    for (int s = 0; s < c.size(); ++s)
        if (bottom[scc.comp[s]]) by[scc.comp[s]].push_back(s);
    std::vector<std::vector<int>> out;
    for (auto& b : by)
        if (!b.empty()) out.push_back(std::move(b));
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct Evaluation {
    std::vector<Rat> gain, bias;
};

Evaluation evaluate(const MarkovChain& c) {
    const int n = c.size();
    Evaluation ev;
    ev.gain.assign(n, 0);
    ev.bias.assign(n, 0);
    std::vector<bool> recurrent(n, false);
    for (const auto& cls : chain_bsccs(c)) {
        RatVector pi = stationary_on(c, cls);
        Rat g = 0;
        for (std::size_t i = 0; i < cls.size(); ++i) g += pi[i] * Rat(c.weight[cls[i]]);
        std::vector<int> idx(n, -1);
        for (std::size_t i = 0; i < cls.size(); ++i) idx[cls[i]] = static_cast<int>(i);
        const std::size_t k = cls.size();
        RatMatrix a(k, RatVector(k, 0));
        RatVector b(k, 0);
        a[0][0] = 1;  // h(ref) = 0
        for (std::size_t i = 1; i < k; ++i) {
            a[i][i] += 1;
            for (const auto& tr : c.rows[cls[i]]) a[i][idx[tr.target]] -= tr.prob;
            b[i] = Rat(c.weight[cls[i]]) - g;
        }
        RatVector h = solve_linear(a, b);
        for (std::size_t i = 0; i < k; ++i) {
            recurrent[cls[i]] = true;
            ev.gain[cls[i]] = g;
            ev.bias[cls[i]] = h[i];
        }
    }
    std::vector<int> idx(n, -1), rev;
    for (int s = 0; s < n; ++s)
        if (!recurrent[s]) {
            idx[s] = static_cast<int>(rev.size());
            rev.push_back(s);
        }
    const std::size_t k = rev.size();
    if (k == 0) return ev;
    RatMatrix a(k, RatVector(k, 0));
    RatVector bg(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        a[i][i] += 1;
        for (const auto& tr : c.rows[rev[i]]) {
            if (recurrent[tr.target])
                bg[i] += tr.prob * ev.gain[tr.target];
            else
                a[i][idx[tr.target]] -= tr.prob;
        }
    }
    RatVector g = solve_linear(a, bg);
    for (std::size_t i = 0; i < k; ++i) ev.gain[rev[i]] = g[i];
    RatVector bh(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        bh[i] = Rat(c.weight[rev[i]]) - g[i];
        for (const auto& tr : c.rows[rev[i]])
            if (recurrent[tr.target]) bh[i] += tr.prob * ev.bias[tr.target];
    }
    RatVector h = solve_linear(a, bh);
    for (std::size_t i = 0; i < k; ++i) ev.bias[rev[i]] = h[i];
    return ev;
}

Rat expect(const Action& act, const std::vector<Rat>& v) {
    Rat x = 0;
    for (const auto& tr : act.succ) x += tr.prob * v[tr.target];
    return x;
}

}  // namespace

MdScheduler reroute_to(const Mdp& m, const MdScheduler& sched, const std::vector<bool>& closed) {
    MdScheduler out(m.size(), -1);
    std::vector<bool> in = closed;
    for (int s = 0; s < m.size(); ++s)
        if (in[s]) out[s] = sched[s];
    for (bool grew = true; grew;) {
        grew = false;
        for (int s = 0; s < m.size(); ++s) {
            if (in[s] || m.is_trap(s)) continue;
            for (int a = 0; a < static_cast<int>(m.actions[s].size()); ++a) {
                bool hits = false;
                for (const auto& tr : m.actions[s][a].succ) hits = hits || in[tr.target];
                if (hits) {
                    out[s] = a;
                    in[s] = true;
                    grew = true;
                    break;
                }
            }
        }
    }
    for (int s = 0; s < m.size(); ++s)
        if (out[s] < 0 && !m.is_trap(s)) out[s] = sched[s] >= 0 ? sched[s] : 0;
    return out;
}

MeanPayoffResult optimal_mean_payoff(const Mdp& input, Opt mode) {
    const Mdp m = mode == Opt::Max ? input : negate_weights(input);
    const int n = m.size();
    for (int s = 0; s < n; ++s)
        if (m.is_trap(s)) throw Error(ErrorKind::TrapPresent, "mean payoff needs a trap-free MDP");
    MdScheduler sigma(n, 0);
    Evaluation ev;
    for (;;) {
        ev = evaluate(induced_chain(m, sigma));
        bool changed = false;
        for (int s = 0; s < n; ++s) {
            Rat best = expect(m.actions[s][sigma[s]], ev.gain);
            int arg = sigma[s];
            for (int a = 0; a < static_cast<int>(m.actions[s].size()); ++a) {
                Rat q = expect(m.actions[s][a], ev.gain);
                if (q > best) {
                    best = q;
                    arg = a;
                }
            }
            if (arg != sigma[s]) {
                sigma[s] = arg;
                changed = true;
            }
        }
        if (changed) continue;
        for (int s = 0; s < n; ++s) {
            Rat best = Rat(m.actions[s][sigma[s]].weight) + expect(m.actions[s][sigma[s]], ev.bias);
            int arg = sigma[s];
            for (int a = 0; a < static_cast<int>(m.actions[s].size()); ++a) {
                if (expect(m.actions[s][a], ev.gain) != ev.gain[s]) continue;
                Rat v = Rat(m.actions[s][a].weight) + expect(m.actions[s][a], ev.bias);
                if (v > best) {
                    best = v;
                    arg = a;
                }
            }
            if (arg != sigma[s]) {
                sigma[s] = arg;
                changed = true;
            }
        }
        if (!changed) break;
    }
    MeanPayoffResult r;
    r.policy = sigma;
    r.gain = ev.gain;
    if (mode == Opt::Min)
        for (auto& g : r.gain) g = -g;
    r.value = n ? r.gain[0] : Rat(0);
    auto bsccs = chain_bsccs(induced_chain(m, sigma));
    // Prefer a BSCC attaining the best gain, then the one with the smallest state.
    std::size_t pick = 0;
    for (std::size_t i = 1; i < bsccs.size(); ++i)
        if (ev.gain[bsccs[i][0]] > ev.gain[bsccs[pick][0]]) pick = i;
    std::vector<bool> closed(n, false);
    if (!bsccs.empty())
        for (int s : bsccs[pick]) closed[s] = true;
    r.witness = reroute_to(m, sigma, closed);
    r.witness_has_single_bscc = chain_bsccs(induced_chain(m, r.witness)).size() == 1;
    return r;
}

MeanPayoffResult mdp_mean_payoff(const Mdp& scmdp, Opt mode) {
    if (!is_strongly_connected(scmdp))
        throw Error(ErrorKind::NotStronglyConnected, "mean payoff optimization");
    return optimal_mean_payoff(scmdp, mode);
}

}  // namespace wmdp
