#include "wmdp/oracle.hpp"

#include "wmdp/graph.hpp"
#include "wmdp/numeric.hpp"
#include "wmdp/rng.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace wmdp {

void enumerate_md(const Mdp& m, const std::function<bool(const MdScheduler&)>& visit, double cap) {
    double count = 1;
    for (int s = 0; s < m.size(); ++s) count *= std::max<std::size_t>(1, m.actions[s].size());
    if (count > cap) throw Error(ErrorKind::TooLarge, "MD scheduler count exceeds the cap");
    MdScheduler sched(m.size());
    for (int s = 0; s < m.size(); ++s) sched[s] = m.is_trap(s) ? -1 : 0;
    for (;;) {
        if (!visit(sched)) return;
        int s = m.size() - 1;
        for (; s >= 0; --s) {
            if (m.is_trap(s)) continue;
            if (++sched[s] < static_cast<int>(m.actions[s].size())) break;
            sched[s] = 0;
        }
        if (s < 0) return;
    }
}

namespace {

struct BsccFacts {
    Rat mp;
    bool all_cycles_zero;
};

BsccFacts analyze_bscc(const MarkovChain& c, const std::vector<int>& states) {
    std::map<int, int> idx;
    for (int s : states) idx[s] = static_cast<int>(idx.size());
    MarkovChain sub;
    sub.rows.resize(states.size());
    sub.weight.resize(states.size());
    for (int s : states) {
        for (const auto& tr : c.rows[s]) sub.rows[idx[s]].push_back({idx.at(tr.target), tr.prob});
        sub.weight[idx[s]] = c.weight[s];
    }
    BsccFacts f{mc_mean_payoff(sub), true};
    // every cycle weighs 0 iff a potential p(t) = p(s) + weight(s) exists on all edges
    std::map<int, Int> pot{{states[0], 0}};
    std::deque<int> q{states[0]};
    while (!q.empty() && f.all_cycles_zero) {
        int s = q.front();
        q.pop_front();
        for (const auto& tr : c.rows[s]) {
            Int p = pot[s] + c.weight[s];
            auto it = pot.find(tr.target);
            if (it == pot.end()) {
                pot[tr.target] = p;
                q.push_back(tr.target);
            } else if (it->second != p) {
                f.all_cycles_zero = false;
            }
        }
    }
    return f;
}

}  // namespace

Classification brute_classify(const Mdp& scmdp) {
    Classification c;
    bool first = true, gambling = false, zero = false, all_divergent = true;
    enumerate_md(scmdp, [&](const MdScheduler& sched) {
        MarkovChain ch = induced_chain(scmdp, sched);
        for (const auto& b : chain_bsccs(ch)) {
            BsccFacts f = analyze_bscc(ch, b);
            if (first || f.mp > c.max_mp) c.max_mp = f.mp;
            if (first || f.mp < c.min_mp) c.min_mp = f.mp;
            first = false;
            if (f.mp == 0 && !f.all_cycles_zero) gambling = true;
            if (f.all_cycles_zero) zero = true;
            if (f.mp < 0 || f.all_cycles_zero) all_divergent = false;
        }
        return true;
    });
    c.pumping = c.max_mp > 0;
    c.universally_pumping = c.min_mp > 0;
    c.gambling = gambling;
    c.has_zero_ec = zero;
    c.pos_weight_divergent = c.pumping || gambling;
    c.neg_weight_divergent = c.min_mp < 0 || gambling;
    c.universally_weight_divergent = all_divergent;
    return c;
}

std::vector<bool> brute_solve_game(const MeanPayoffGame& g) {
    const int n = g.size();
    std::vector<int> v1, v2;
    for (int v = 0; v < n; ++v) (g.owner[v] == 1 ? v1 : v2).push_back(v);
    auto advance = [&](std::vector<int>& choice, const std::vector<int>& owned) {
        for (int i = static_cast<int>(owned.size()) - 1; i >= 0; --i) {
            if (++choice[owned[i]] < static_cast<int>(g.edges[owned[i]].size())) return true;
            choice[owned[i]] = 0;
        }
        return false;
    };
    // sign of the cycle closing the play from v
    auto play_ok = [&](const std::vector<int>& choice, int v) {
        std::vector<int> seen_at(n, -1);
        std::vector<Int> prefix;
        Int sum = 0;
        int u = v;
        for (int step = 0; seen_at[u] < 0; ++step) {
            seen_at[u] = step;
            prefix.push_back(sum);
            const GameEdge& e = g.edges[u][choice[u]];
            sum += e.weight;
            u = e.to;
        }
        return sum - prefix[seen_at[u]] >= 0;
    };
    std::vector<bool> win(n, false);
    std::vector<int> choice(n, 0);
    do {
        for (int v : v2) choice[v] = 0;
        std::vector<bool> holds(n, true);
        do {
            for (int v = 0; v < n; ++v)
                if (holds[v] && !play_ok(choice, v)) holds[v] = false;
        } while (advance(choice, v2));
        for (int v = 0; v < n; ++v)
            if (holds[v]) win[v] = true;
    } while (advance(choice, v1));
    return win;
}

namespace {

struct Product {
    Mdp mdp;
    int win, fail, lo, width;
    int at(int s, int w) const { return s * width + (w - lo); }
    int state_of(int v) const { return v / width; }
    int weight_of(int v) const { return v % width + lo; }
};

// Traps of m stay traps; the WIN and FAIL sinks loop with weight 0.
Product unfold(const Mdp& m, const UnfoldConfig& cfg, bool optimistic) {
    Product p;
    p.lo = cfg.lo;
    p.width = cfg.hi - cfg.lo + 1;
    for (int s = 0; s < m.size(); ++s)
        for (int w = cfg.lo; w <= cfg.hi; ++w) p.mdp.add_state(m.names[s] + "@" + std::to_string(w));
    p.win = p.mdp.add_state("WIN");
    p.fail = p.mdp.add_state("FAIL");
    p.mdp.actions.resize(p.mdp.size());
    for (int s = 0; s < m.size(); ++s)
        for (int w = cfg.lo; w <= cfg.hi; ++w)
            for (const auto& act : m.actions[s]) {
                Int nw = w + act.weight;
                Action a{act.name, act.weight, {}};
                if (nw > cfg.hi && optimistic) {
                    a.succ.push_back({p.win, Rat(1)});
                } else if (nw < cfg.lo && !optimistic) {
                    a.succ.push_back({p.fail, Rat(1)});
                } else {
                    int c = static_cast<int>(std::clamp<Int>(nw, cfg.lo, cfg.hi).get_si());
                    for (const auto& tr : act.succ) a.succ.push_back({p.at(tr.target, c), tr.prob});
                }
                p.mdp.actions[p.at(s, w)].push_back(std::move(a));
            }
    p.mdp.actions[p.win].push_back({"loop", 0, {{p.win, Rat(1)}}});
    p.mdp.actions[p.fail].push_back({"loop", 0, {{p.fail, Rat(1)}}});
    p.mdp = validate_mdp(std::move(p.mdp));
    return p;
}

// Answers the same query on both products and requires agreement.
bool certified(const Mdp& m, int s, const UnfoldConfig& cfg,
               const std::function<bool(const Product&)>& query) {
    if (cfg.lo > 0 || cfg.hi < 0) throw Error(ErrorKind::AssumptionViolated, "window must contain 0");
    if (cfg.mode != WindowMode::Certified) return query(unfold(m, cfg, cfg.mode == WindowMode::Optimistic));
    bool low = query(unfold(m, cfg, false));
    bool high = query(unfold(m, cfg, true));
    if (low != high)
        throw Error(ErrorKind::WindowExceeded, "weight window too small at '" + m.names[s] + "'");
    return low;
}

std::vector<bool> mec_states(const Mdp& m, const std::vector<bool>& keep) {
    Restriction r = restrict_states(m, keep);
    std::vector<bool> out(m.size(), false);
    for (const auto& ec : decompose_mecs(r.mdp))
        for (int x : ec.states()) out[r.to_orig[x]] = true;
    return out;
}

bool reach_query(const Product& p, int init, const std::vector<bool>& target, Quantifier q, Bound b) {
    return qualitative_reach(p.mdp, target, q == Quantifier::Exists ? Quant::Max : Quant::Min, b)[init];
}

}  // namespace

bool unfold_dwr(const Mdp& m, int s, const DwrProperty& prop, Quantifier q, Bound b,
                const UnfoldConfig& cfg) {
    return certified(m, s, cfg, [&](const Product& p) -> bool {
        std::vector<bool> good(p.mdp.size(), false);
        good[p.win] = true;
        for (const auto& t : prop.targets)
            for (int w = cfg.lo; w <= cfg.hi; ++w)
                if (!t.K || w >= *t.K) good[p.at(t.state, w)] = true;
        return reach_query(p, p.at(s, 0), good, q, b);
    });
}

bool unfold_buechi(const Mdp& m, int s, const BuechiProperty& prop, Quantifier q, Bound b,
                   const UnfoldConfig& cfg) {
    return certified(m, s, cfg, [&](const Product& p) -> bool {
        const int n = p.mdp.size();
        std::vector<bool> above(n, false), in_f(n, false);
        for (int v = 0; v < n; ++v) {
            if (v == p.win || v == p.fail) continue;
            above[v] = p.weight_of(v) >= prop.K;
            in_f[v] = prop.F[p.state_of(v)];
        }
        above[p.win] = in_f[p.win] = true;
        const int init = p.at(s, 0);
        if (q == Quantifier::Exists) {
            std::vector<bool> accepting(n, false);
            for (const auto& ec : decompose_mecs(p.mdp)) {
                auto st = ec.states();
                bool a = std::any_of(st.begin(), st.end(), [&](int v) { return above[v]; });
                bool f = std::any_of(st.begin(), st.end(), [&](int v) { return in_f[v]; });
                if (a && f)
                    for (int v : st) accepting[v] = true;
            }
            return qualitative_reach(p.mdp, accepting, Quant::Max, b)[init];
        }
        std::vector<bool> not_above(n), not_f(n);
        for (int v = 0; v < n; ++v) {
            not_above[v] = !above[v];
            not_f[v] = !in_f[v];
        }
        std::vector<bool> bad = mec_states(p.mdp, not_above), bad_f = mec_states(p.mdp, not_f);
        for (int v = 0; v < n; ++v) bad[v] = bad[v] || bad_f[v];
        // the scheduler that avoids the property best reaches bad states
        if (b == Bound::AlmostSure) return !qualitative_reach(p.mdp, bad, Quant::Max, Bound::Positive)[init];
        return !qualitative_reach(p.mdp, bad, Quant::Max, Bound::AlmostSure)[init];
    });
}

bool unfold_cobuechi(const Mdp& m, int s, const Int& K, Quantifier q, Bound b, const UnfoldConfig& cfg) {
    return certified(m, s, cfg, [&](const Product& p) -> bool {
        const int n = p.mdp.size();
        std::vector<bool> above(n, false);
        for (int v = 0; v < n; ++v)
            if (v != p.win && v != p.fail) above[v] = p.weight_of(v) >= K;
        above[p.win] = true;
        const int init = p.at(s, 0);
        if (q == Quantifier::Exists)
            return qualitative_reach(p.mdp, mec_states(p.mdp, above), Quant::Max, b)[init];
        std::vector<bool> bad(n, false);
        for (const auto& ec : decompose_mecs(p.mdp)) {
            auto st = ec.states();
            if (std::any_of(st.begin(), st.end(), [&](int v) { return !above[v]; }))
                for (int v : st) bad[v] = true;
        }
        if (b == Bound::AlmostSure) return !qualitative_reach(p.mdp, bad, Quant::Max, Bound::Positive)[init];
        return !qualitative_reach(p.mdp, bad, Quant::Max, Bound::AlmostSure)[init];
    });
}

ExtInt unfold_value(const std::function<bool(const Int&)>& holds, const UnfoldConfig& cfg) {
    if (holds(cfg.hi)) return ExtInt::pos_inf();
    for (int k = cfg.hi - 1; k >= cfg.lo; --k)
        if (holds(k)) return ExtInt::of(k);
    return ExtInt::neg_inf();
}

SchedulerCallback md_callback(const MdScheduler& sched) {
    return [sched](int s, const Int&, const std::vector<long long>&) { return sched[s]; };
}

SchedulerCallback threshold_chasing(int state, int pump, int leave, const Int& K) {
    return [=](int s, const Int& w, const std::vector<long long>&) {
        if (s != state) return 0;
        return w < K ? pump : leave;
    };
}

SimReport simulate(const Mdp& m, int init, const SchedulerCallback& sched, long long steps, long long runs,
                   std::uint64_t seed) {
    SimReport rep{runs, steps, seed, {}, std::vector<long long>(m.size(), 0)};
    Rng rng(seed);
    const Rat scale = Rat(Int(1) << 64);
    for (long long r = 0; r < runs; ++r) {
        std::vector<long long> visits(m.size(), 0);
        int s = init;
        Int w = 0;
        RunSummary run{0, 0, 0, s, 0, false};
        ++visits[s];
        for (; run.steps < steps; ++run.steps) {
            if (m.is_trap(s)) break;
            int a = sched(s, w, visits);
            if (a < 0 || a >= static_cast<int>(m.actions[s].size()))
                throw Error(ErrorKind::CallbackReturnedDisabledAction,
                            "callback chose a disabled action at '" + m.names[s] + "'");
            const Action& act = m.actions[s][a];
            std::uint64_t bits = rng.next();
            Rat u = Rat(Int(static_cast<unsigned long>(bits >> 32)) * (Int(1) << 32) +
                        Int(static_cast<unsigned long>(bits & 0xffffffffULL))) /
                    scale;
            int next = act.succ.back().target;
            Rat acc = 0;
            for (const auto& tr : act.succ) {
                acc += tr.prob;
                if (u < acc) {
                    next = tr.target;
                    break;
                }
            }
            w += act.weight;
            s = next;
            ++visits[s];
            run.min = std::min(run.min, w);
            run.max = std::max(run.max, w);
        }
        run.final = w;
        run.final_state = s;
        run.trapped = m.is_trap(s);
        for (int x = 0; x < m.size(); ++x)
            if (visits[x] > 0) ++rep.runs_visiting[x];
        rep.per_run.push_back(std::move(run));
    }
    return rep;
}

}  // namespace wmdp
