#include "wmdp/classify.hpp"

#include "wmdp/graph.hpp"
#include "wmdp/numeric.hpp"

#include <algorithm>

namespace wmdp {

namespace {

EndComponent bscc_pairs(const std::vector<int>& states, const MdScheduler& sched) {
    EndComponent ec;
    for (int s : states) ec.pairs.push_back({s, sched[s]});
    return ec;
}

bool potential_consistent(const Mdp& m, const EndComponent& ec) {
    return zero_ec_potential(m, ec, ec.pairs.front().first).has_value();
}

// Calls f on every MD scheduler in lexicographic order until it returns true.
template <class F>
bool for_each_md(const Mdp& m, F&& f) {
    double count = 1;
    for (int s = 0; s < m.size(); ++s) count *= std::max<std::size_t>(1, m.actions[s].size());
    if (count > 1e6) throw Error(ErrorKind::TooLarge, "more than 10^6 MD schedulers");
    MdScheduler sched(m.size());
    for (int s = 0; s < m.size(); ++s) sched[s] = m.is_trap(s) ? -1 : 0;
    for (;;) {
        if (f(sched)) return true;
        int s = m.size() - 1;
        for (; s >= 0; --s) {
            if (m.is_trap(s)) continue;
            if (++sched[s] < static_cast<int>(m.actions[s].size())) break;
            sched[s] = 0;
        }
        if (s < 0) return false;
    }
}

// Some BSCC of some MD scheduler has mean payoff 0 and is (zero) or is not (!zero) a 0-BSCC.
bool brute_zero_mp_bscc(const Mdp& m, bool zero) {
    return for_each_md(m, [&](const MdScheduler& sched) {
        MarkovChain c = induced_chain(m, sched);
        for (const auto& b : chain_bsccs(c)) {
            EndComponent ec = bscc_pairs(b, sched);
            Restriction r = restrict(m, ec);
            if (mc_mean_payoff(induced_chain(r.mdp, MdScheduler(r.mdp.size(), 0))) != 0) continue;
            if (potential_consistent(m, ec) == zero) return true;
        }
        return false;
    });
}

}  // namespace

bool is_zero_bscc(const Mdp& m, const EndComponent& ec) {
    if (ec.pairs.empty()) return false;
    for (std::size_t i = 1; i < ec.pairs.size(); ++i)
        if (ec.pairs[i].first == ec.pairs[i - 1].first) return false;
    try {
        Restriction r = restrict(m, ec);
        if (!is_strongly_connected(r.mdp)) return false;
    } catch (const Error&) {
        return false;
    }
    return potential_consistent(m, ec);
}

ZeroEcSearch zero_ec_search(const Mdp& scmdp) {
    if (!is_strongly_connected(scmdp)) throw Error(ErrorKind::NotStronglyConnected, "0-EC search");
    ZeroEcSearch out;
    Mdp cur = scmdp;
    const int limit = static_cast<int>(scmdp.num_pairs());
    for (;;) {
        MeanPayoffResult r = mdp_mean_payoff(cur, Opt::Max);
        if (out.max_mp_trace.empty() && r.value != 0)
            throw Error(ErrorKind::PreconditionMaxMpNonzero, "max mean payoff is " + r.value.get_str());
        out.max_mp_trace.push_back(r.value);
        if (r.value < 0) return out;
        auto bsccs = chain_bsccs(induced_chain(cur, r.witness));
        EndComponent b = bscc_pairs(bsccs.front(), r.witness);
        if (potential_consistent(cur, b)) {
            out.bscc = b;
            return out;
        }
        if (out.iterations >= limit)
            throw Error(ErrorKind::AssumptionViolated, "perturbation did not terminate within |S|*|Act| rounds");
        // Find (s, alpha) with successors t, u whose expected weight until s differ.
        Restriction rb = restrict(cur, b);
        MarkovChain cb = induced_chain(rb.mdp, MdScheduler(rb.mdp.size(), 0));
        bool done = false;
        for (int si = 0; si < cb.size() && !done; ++si) {
            RatVector until = expected_until(cb, si, UntilKind::Weight);
            const auto& row = cb.rows[si];
            for (std::size_t i = 0; i < row.size() && !done; ++i)
                for (std::size_t j = 0; j < row.size() && !done; ++j) {
                    if (until[row[i].target] <= until[row[j].target]) continue;
                    int s = rb.to_orig[si];
                    int a = r.witness[s];
                    int t = rb.to_orig[row[i].target], u = rb.to_orig[row[j].target];
                    auto& succ = cur.actions[s][a].succ;
                    Rat pt = cur.prob(s, a, t), pu = cur.prob(s, a, u);
                    Rat delta = std::min<Rat>(pt, Rat(1) - pu) / 2;
                    for (auto& tr : succ) {
                        if (tr.target == t) tr.prob -= delta;
                        if (tr.target == u) tr.prob += delta;
                    }
                    done = true;
                }
        }
        if (!done) throw Error(ErrorKind::AssumptionViolated, "no perturbation candidate in a gambling BSCC");
        ++out.iterations;
    }
}

std::optional<EndComponent> has_zero_ec(const Mdp& scmdp) { return zero_ec_search(scmdp).bscc; }

std::pair<bool, std::optional<MdScheduler>> is_pumping(const Mdp& scmdp) {
    MeanPayoffResult r = mdp_mean_payoff(scmdp, Opt::Max);
    if (r.value > 0) return {true, r.witness};
    return {false, std::nullopt};
}

bool is_universally_pumping(const Mdp& scmdp) { return mdp_mean_payoff(scmdp, Opt::Min).value > 0; }

namespace {

// Lifts an MD scheduler of spider(m, step.bscc, step.reference) back to m.
// Reroutes to a pumping or gambling BSCC of sched; returns false when none exists.
bool settle_witness(const Mdp& m, MdScheduler& sched, WitnessKind& kind) {
    MarkovChain c = induced_chain(m, sched);
    for (const auto& b : chain_bsccs(c)) {
        EndComponent ec = bscc_pairs(b, sched);
        Restriction r = restrict(m, ec);
        Rat mp = mc_mean_payoff(induced_chain(r.mdp, MdScheduler(r.mdp.size(), 0)));
        if (mp < 0 || (mp == 0 && potential_consistent(m, ec))) continue;
        kind = mp > 0 ? WitnessKind::Pumping : WitnessKind::Gambling;
        std::vector<bool> closed(m.size(), false);
        for (int s : b) closed[s] = true;
        sched = reroute_to(m, sched, closed);
        return true;
    }
    return false;
}

}  // namespace

WgtdivResult check_weight_divergence(const Mdp& scmdp) {
    if (!is_strongly_connected(scmdp)) throw Error(ErrorKind::NotStronglyConnected, "weight divergence");
    WgtdivResult out;
    Mdp cur = scmdp;
    EndComponent f = all_pairs(cur);
    std::optional<MdScheduler> found;
    for (;;) {
        Restriction r = restrict(cur, f);
        MeanPayoffResult mp = mdp_mean_payoff(r.mdp, Opt::Max);
        if (mp.value < 0) {
            out.flattened = cur;
            break;
        }
        MdScheduler local;
        if (mp.value > 0) {
            local = mp.witness;
        } else {
            auto bsccs = chain_bsccs(induced_chain(r.mdp, mp.policy));
            for (const auto& b : bsccs)
                if (!potential_consistent(r.mdp, bscc_pairs(b, mp.policy))) {
                    std::vector<bool> closed(r.mdp.size(), false);
                    for (int s : b) closed[s] = true;
                    local = reroute_to(r.mdp, mp.policy, closed);
                    break;
                }
            if (local.empty()) {
                SpiderStep st;
                for (int s : bsccs.front()) st.bscc.pairs.push_back({r.to_orig[s], r.action_orig[s][mp.policy[s]]});
                st.reference = st.bscc.pairs.front().first;
                st.result = spider(cur, st.bscc, st.reference, static_cast<int>(out.steps.size()));
                for (int s : st.bscc.states())
                    if (s != st.reference) st.tau_edges.push_back({s, st.result.mdp.actions[s][0].weight});
                bool whole = st.bscc.pairs.size() == f.pairs.size();
                cur = st.result.mdp;
                out.steps.push_back(std::move(st));
                if (whole) {
                    out.flattened = cur;
                    break;
                }
                std::vector<bool> keep(cur.size(), false);
                for (int s : f.states()) keep[s] = true;
                Restriction sub = restrict_states(cur, keep);
                auto mecs = decompose_mecs(sub.mdp);
                if (mecs.empty()) {
                    out.flattened = cur;
                    break;
                }
                f.pairs.clear();
                for (const auto& [s, a] : mecs.front().pairs) f.pairs.push_back({sub.to_orig[s], sub.action_orig[s][a]});
                std::sort(f.pairs.begin(), f.pairs.end());
                continue;
            }
        }
        MdScheduler lifted(cur.size(), -1);
        std::vector<bool> closed(cur.size(), false);
        for (int s = 0; s < r.mdp.size(); ++s) {
            lifted[r.to_orig[s]] = r.action_orig[s][local[s]];
            closed[r.to_orig[s]] = true;
        }
        found = reroute_to(cur, lifted, closed);
        break;
    }
    if (!found) return out;
    MdScheduler sched = *found;
    for (std::size_t i = out.steps.size(); i-- > 0;) {
        const Mdp& before = i == 0 ? scmdp : out.steps[i - 1].result.mdp;
        sched = lift_scheduler(before, out.steps[i], sched);
    }
    out.divergent = true;
    if (!settle_witness(scmdp, sched, out.kind))
        throw Error(ErrorKind::AssumptionViolated, "lifted witness lost its divergent BSCC");
    out.witness = sched;
    return out;
}

std::optional<bool> is_gambling(const Mdp& scmdp, bool allow_exponential) {
    Rat mx = mdp_mean_payoff(scmdp, Opt::Max).value;
    if (mx == 0) return check_weight_divergence(scmdp).divergent;
    if (mx < 0) return false;
    if (!allow_exponential) return std::nullopt;
    return brute_zero_mp_bscc(scmdp, false);
}

Int ZeroEcInfo::w(int s, int t) const {
    const auto& p = potential.at(component.at(s));
    return p.at(t) - p.at(s);
}

ZeroEcInfo maximal_zero_ecs(const Mdp& scmdp) {
    if (!is_strongly_connected(scmdp)) throw Error(ErrorKind::NotStronglyConnected, "maximal 0-ECs");
    Rat mx = mdp_mean_payoff(scmdp, Opt::Max).value;
    if (mx != 0) throw Error(ErrorKind::PreconditionMaxMpNonzero, "max mean payoff is " + mx.get_str());
    const int n = scmdp.size();
    std::vector<std::vector<bool>> member(n);
    for (int s = 0; s < n; ++s) member[s].assign(scmdp.actions[s].size(), false);
    // Working MDP without trivial 0-loops; origin maps its pairs to scmdp pairs (-1 for tau).
    Mdp cur;
    cur.names = scmdp.names;
    cur.actions.resize(n);
    std::vector<std::vector<int>> origin(n);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < static_cast<int>(scmdp.actions[s].size()); ++a) {
            const Action& act = scmdp.actions[s][a];
            if (act.weight == 0 && act.succ.size() == 1 && act.succ[0].target == s) {
                member[s][a] = true;
                continue;
            }
            cur.actions[s].push_back(act);
            origin[s].push_back(a);
        }
    std::vector<std::vector<std::pair<int, int>>> orig_pair(n);
    for (int s = 0; s < n; ++s)
        for (int a : origin[s]) orig_pair[s].push_back({s, a});
    for (int step = 0;; ++step) {
        bool progressed = false;
        for (const auto& mec : decompose_mecs(cur)) {
            Restriction r = restrict(cur, mec);
            if (mdp_mean_payoff(r.mdp, Opt::Max).value != 0) continue;
            auto b = zero_ec_search(r.mdp).bscc;
            if (!b) continue;
            EndComponent e;
            for (const auto& [s, a] : b->pairs) e.pairs.push_back({r.to_orig[s], r.action_orig[s][a]});
            std::sort(e.pairs.begin(), e.pairs.end());
            for (const auto& [s, a] : e.pairs) {
                auto [os, oa] = orig_pair[s][a];
                if (oa >= 0) member[os][oa] = true;
            }
            SpiderResult sp = spider(cur, e, e.pairs.front().first, step);
            std::vector<std::vector<std::pair<int, int>>> next(n);
            for (int s = 0; s < n; ++s)
                for (const auto& [ps, pa] : sp.origin[s])
                    next[s].push_back(pa < 0 ? std::make_pair(s, -1) : orig_pair[ps][pa]);
            orig_pair = std::move(next);
            cur = std::move(sp.mdp);
            progressed = true;
            break;
        }
        if (!progressed) break;
    }
    ZeroEcInfo info;
    info.max_zero_ecs = decompose_mecs(scmdp, &member);
    info.zero_ec_states.assign(n, false);
    info.component.assign(n, -1);
    for (std::size_t i = 0; i < info.max_zero_ecs.size(); ++i) {
        const auto& z = info.max_zero_ecs[i];
        auto pot = zero_ec_potential(scmdp, z, z.pairs.front().first);
        if (!pot) throw Error(ErrorKind::AssumptionViolated, "union of 0-ECs has a nonzero cycle");
        info.potential.push_back(*pot);
        for (int s : z.states()) {
            info.zero_ec_states[s] = true;
            info.component[s] = static_cast<int>(i);
        }
    }
    return info;
}

ZeroEcInfo recurrence_values(ZeroEcInfo info, const Mdp& scmdp) {
    for (std::size_t i = 0; i < info.max_zero_ecs.size(); ++i) {
        Restriction z = restrict(scmdp, info.max_zero_ecs[i]);
        const int k = z.mdp.size();
        for (int si = 0; si < k; ++si) {
            const int s = z.to_orig[si];
            std::vector<Int> ws;
            for (int ti = 0; ti < k; ++ti) ws.push_back(info.w(s, z.to_orig[ti]));
            std::sort(ws.begin(), ws.end(), std::greater<Int>());
            ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
            bool have_rec = false, have_lgr = false;
            for (const Int& wj : ws) {
                std::vector<bool> in_t(k);
                for (int ti = 0; ti < k; ++ti) in_t[ti] = info.w(s, z.to_orig[ti]) >= wj;
                std::vector<std::vector<bool>> allowed(k);
                for (int ti = 0; ti < k; ++ti) {
                    allowed[ti].assign(z.mdp.actions[ti].size(), false);
                    if (!in_t[ti]) continue;
                    for (std::size_t b = 0; b < z.mdp.actions[ti].size(); ++b) {
                        bool inside = true;
                        for (const auto& tr : z.mdp.actions[ti][b].succ) inside = inside && in_t[tr.target];
                        allowed[ti][b] = inside;
                    }
                }
                std::vector<bool> mec_states(k, false);
                for (const auto& e : decompose_mecs(z.mdp, &allowed))
                    for (int x : e.states()) mec_states[x] = true;
                if (!have_rec && mec_states[si]) {
                    info.rec[s] = wj;
                    have_rec = true;
                }
                if (!have_lgr && qualitative_reach(z.mdp, mec_states, Quant::Max, Bound::AlmostSure)[si]) {
                    info.lgr[s] = wj;
                    have_lgr = true;
                }
                if (have_rec && have_lgr) break;
            }
        }
    }
    return info;
}

bool is_universally_weight_divergent(const Mdp& scmdp) {
    Rat mn = mdp_mean_payoff(scmdp, Opt::Min).value;
    if (mn > 0) return true;
    if (mn < 0) return false;
    return !has_zero_ec(negate_weights(scmdp)).has_value();
}

std::vector<bool> bounded_below_ec_states(const Mdp& m) {
    std::vector<bool> out(m.size(), false);
    for (const auto& mec : decompose_mecs(m)) {
        Restriction r = restrict(m, mec);
        Rat mx = mdp_mean_payoff(r.mdp, Opt::Max).value;
        if (mx > 0) {
            for (int s : mec.states()) out[s] = true;
        } else if (mx == 0) {
            ZeroEcInfo z = maximal_zero_ecs(r.mdp);
            for (int s = 0; s < r.mdp.size(); ++s)
                if (z.zero_ec_states[s]) out[r.to_orig[s]] = true;
        }
    }
    return out;
}

Classification classify(const Mdp& scmdp, bool allow_exponential) {
    Classification c;
    MeanPayoffResult mx = mdp_mean_payoff(scmdp, Opt::Max);
    c.max_mp = mx.value;
    c.min_mp = mdp_mean_payoff(scmdp, Opt::Min).value;
    c.pumping = c.max_mp > 0;
    c.universally_pumping = c.min_mp > 0;
    WgtdivResult pos = check_weight_divergence(scmdp);
    c.pos_weight_divergent = pos.divergent;
    c.neg_weight_divergent = check_weight_divergence(negate_weights(scmdp)).divergent;
    if (c.max_mp == 0) {
        c.gambling = pos.divergent;
        c.has_zero_ec = has_zero_ec(scmdp).has_value();
    } else if (c.max_mp < 0) {
        c.gambling = false;
        c.has_zero_ec = false;
    } else if (allow_exponential) {
        c.gambling = brute_zero_mp_bscc(scmdp, false);
        c.has_zero_ec = brute_zero_mp_bscc(scmdp, true);
    }
    c.universally_weight_divergent = is_universally_weight_divergent(scmdp);
    if (pos.divergent) {
        c.witness = pos.witness;
        c.witness_tag = pos.kind == WitnessKind::Pumping ? "pumping" : "gambling";
    } else if (c.max_mp == 0) {
        if (auto b = has_zero_ec(scmdp)) {
            MdScheduler s(scmdp.size(), -1);
            std::vector<bool> closed(scmdp.size(), false);
            for (const auto& [x, a] : b->pairs) {
                s[x] = a;
                closed[x] = true;
            }
            c.witness = reroute_to(scmdp, s, closed);
            c.witness_tag = "zero-bscc";
        }
    }
    return c;
}

}  // namespace wmdp
