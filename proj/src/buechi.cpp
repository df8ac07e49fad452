#include "wmdp/buechi.hpp"

#include "wmdp/classify.hpp"
#include "wmdp/graph.hpp"
#include "wmdp/numeric.hpp"

#include <map>

namespace wmdp {

namespace {

void require_no_traps(const Mdp& m) {
    for (int s = 0; s < m.size(); ++s)
        if (m.is_trap(s)) throw Error(ErrorKind::TrapPresent, "state '" + m.names[s] + "' is a trap");
}

void require_state(const Mdp& m, int s) {
    if (s < 0 || s >= m.size()) throw Error(ErrorKind::DanglingTarget, "state out of range");
}

BuechiVerdict from_dwr(DwrVerdict v, const Int& K) {
    // thresholds were K + d for finite targets, so the optimum is K + margin
    BuechiVerdict r;
    r.holds = v.holds;
    r.value = v.margin.plus(K);
    r.reduction = std::move(v);
    return r;
}

DwrVerdict run_dwr(const Mdp& m, int s, const DwrProperty& p, Bound b) {
    return b == Bound::AlmostSure ? dwr_exists_as(m, s, p) : dwr_exists_pos(m, s, p);
}

// T* = star, finite targets zero with threshold K - shift(t).
DwrProperty reduction(const std::vector<bool>& star, const std::vector<bool>& zero,
                      const std::map<int, Int>& shift, const Int& K) {
    DwrProperty p;
    for (int s = 0; s < static_cast<int>(star.size()); ++s) {
        if (star[s])
            p.targets.push_back({s, std::nullopt});
        else if (zero[s])
            p.targets.push_back({s, K - (shift.count(s) ? shift.at(s) : Int(0))});
    }
    return p;
}

BuechiVerdict negate(BuechiVerdict v) {
    // holds(K) iff not other(1 - K); other holds up to c, so ours holds for K <= -c
    v.holds = !v.holds;
    v.value = v.value.negated();
    return v;
}

}  // namespace

FSets compute_f_sets(const Mdp& m, const std::vector<bool>& F) {
    require_no_traps(m);
    FSets r;
    r.pump_ec.assign(m.size(), false);
    r.gamb_ec.assign(m.size(), false);
    r.wdmec.assign(m.size(), false);
    r.zero_ec.assign(m.size(), false);
    for (const auto& mec : decompose_mecs(m)) {
        Restriction sub = restrict(m, mec);
        bool meets = false;
        for (int s : sub.to_orig) meets = meets || F[s];
        if (!meets) continue;
        Rat mp = mdp_mean_payoff(sub.mdp, Opt::Max).value;
        if (mp < 0) continue;
        bool pump = mp > 0;
        bool gamb = !pump && check_weight_divergence(sub.mdp).divergent;
        for (int s : sub.to_orig) {
            r.pump_ec[s] = pump;
            r.gamb_ec[s] = gamb;
            r.wdmec[s] = pump || gamb;
        }
        if (pump) continue;
        ZeroEcInfo info = recurrence_values(maximal_zero_ecs(sub.mdp), sub.mdp);
        for (const auto& z : info.max_zero_ecs) {
            bool zf = false;
            for (int s : z.states()) zf = zf || F[sub.to_orig[s]];
            if (!zf) continue;
            for (int s : z.states()) {
                r.zero_ec[sub.to_orig[s]] = true;
                r.rec[sub.to_orig[s]] = info.rec.at(s);
            }
        }
    }
    return r;
}

std::vector<bool> f_avoiding_ec_states(const Mdp& m, const std::vector<bool>& F) {
    std::vector<bool> keep(m.size());
    for (int s = 0; s < m.size(); ++s) keep[s] = !F[s];
    Restriction r = restrict_states(m, keep);
    std::vector<bool> out(m.size(), false);
    for (const auto& mec : decompose_mecs(r.mdp))
        for (int s : mec.states()) out[r.to_orig[s]] = true;
    return out;
}

BuechiVerdict buechi_exists(const Mdp& m, int s, const BuechiProperty& p, Bound b) {
    require_state(m, s);
    FSets f = compute_f_sets(m, p.F);
    return from_dwr(run_dwr(m, s, reduction(f.wdmec, f.zero_ec, {}, p.K), b), p.K);
}

BuechiVerdict cobuechi_exists(const Mdp& m, int s, const Int& K, Bound b) {
    require_state(m, s);
    FSets f = compute_f_sets(m, std::vector<bool>(m.size(), true));
    return from_dwr(run_dwr(m, s, reduction(f.pump_ec, f.zero_ec, f.rec, K), b), K);
}

BuechiVerdict cobuechi_forall(const Mdp& m, int s, const Int& K, Bound b) {
    // eventually always wgt >= K fails iff infinitely often -wgt >= 1 - K
    require_state(m, s);
    Bound dual = b == Bound::AlmostSure ? Bound::Positive : Bound::AlmostSure;
    return negate(buechi_exists(negate_weights(m), s, {std::vector<bool>(m.size(), true), 1 - K}, dual));
}

BuechiVerdict buechi_forall(const Mdp& m, int s, const BuechiProperty& p, Bound b) {
    require_no_traps(m);
    require_state(m, s);
    const Int L = 1 - p.K;
    std::vector<bool> g = f_avoiding_ec_states(m, p.F);
    if (b == Bound::AlmostSure) {
        if (qualitative_reach(m, g, Quant::Max, Bound::Positive)[s]) {
            BuechiVerdict v;
            v.value = ExtInt::neg_inf();
            return v;
        }
        return negate(cobuechi_exists(negate_weights(m), s, L, Bound::Positive));
    }
    // Collapse the F-avoiding end components into one state with a +1 self-loop.
    Mdp n;
    std::vector<int> to_n(m.size(), -1);
    for (int x = 0; x < m.size(); ++x)
        if (!g[x]) to_n[x] = n.add_state(m.names[x]);
    std::string gname = "g";
    while (m.find_state(gname) >= 0) gname += "'";
    const int gn = n.add_state(gname);
    for (int x = 0; x < m.size(); ++x)
        if (g[x]) to_n[x] = gn;
    for (int x = 0; x < m.size(); ++x) {
        if (g[x]) continue;
        for (const auto& a : m.actions[x]) {
            std::map<int, Rat> acc;
            for (const auto& tr : a.succ) acc[to_n[tr.target]] += tr.prob;
            Action na{a.name, -a.weight, {}};
            for (const auto& [t, q] : acc) na.succ.push_back({t, q});
            n.actions[to_n[x]].push_back(std::move(na));
        }
    }
    n.actions[gn].push_back({"α", 1, {{gn, Rat(1)}}});
    return negate(cobuechi_exists(n, to_n[s], L, Bound::AlmostSure));
}

BuechiVerdict buechi(const Mdp& m, int s, const BuechiProperty& p, Quantifier q, Bound b) {
    return q == Quantifier::Exists ? buechi_exists(m, s, p, b) : buechi_forall(m, s, p, b);
}

BuechiVerdict cobuechi(const Mdp& m, int s, const Int& K, Quantifier q, Bound b) {
    return q == Quantifier::Exists ? cobuechi_exists(m, s, K, b) : cobuechi_forall(m, s, K, b);
}

}  // namespace wmdp
