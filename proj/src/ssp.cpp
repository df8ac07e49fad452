#include "wmdp/ssp.hpp"

#include "wmdp/classify.hpp"
#include "wmdp/graph.hpp"
#include "wmdp/spider.hpp"

#include <algorithm>

namespace wmdp {

std::string ExtRat::str() const {
    if (kind == Kind::PosInf) return "+inf";
    if (kind == Kind::NegInf) return "-inf";
    return value.get_str();
}

namespace {

void check_goal(const Mdp& m, int goal) {
    if (goal < 0 || goal >= m.size() || !m.is_trap(goal))
        throw Error(ErrorKind::GoalNotTrap, "goal must be a trap");
    std::vector<bool> g(m.size(), false);
    g[goal] = true;
    auto as = qualitative_reach(m, g, Quant::Max, Bound::AlmostSure);
    for (int s = 0; s < m.size(); ++s)
        if (!as[s]) throw Error(ErrorKind::GoalUnreachableFrom, "goal is not almost surely reachable from '" + m.names[s] + "'");
}

// MECs that let the weight diverge towards the optimized direction: for the min variant the
// negatively weight-divergent ones.
std::vector<EndComponent> divergent_mecs(const Mdp& m, Opt mode) {
    std::vector<EndComponent> out;
    for (const auto& mec : decompose_mecs(m)) {
        Mdp r = restrict(m, mec).mdp;
        if (mode == Opt::Min) r = negate_weights(r);
        if (check_weight_divergence(r).divergent) out.push_back(mec);
    }
    return out;
}

// Proper MD scheduler from the almost-sure attractor of goal.
MdScheduler proper_scheduler(const Mdp& m, int goal) {
    MdScheduler sched(m.size(), -1);
    std::vector<bool> done(m.size(), false);
    done[goal] = true;
    for (bool grew = true; grew;) {
        grew = false;
        for (int s = 0; s < m.size(); ++s) {
            if (done[s]) continue;
            for (int a = 0; a < static_cast<int>(m.actions[s].size()) && !done[s]; ++a)
                for (const auto& tr : m.actions[s][a].succ)
                    if (done[tr.target]) {
                        sched[s] = a;
                        done[s] = grew = true;
                        break;
                    }
        }
    }
    return sched;
}

bool proper(const Mdp& m, int goal, const MdScheduler& sched) {
    MarkovChain c = induced_chain(m, sched);
    for (const auto& b : chain_bsccs(c))
        if (b != std::vector<int>{goal}) return false;
    return true;
}

RatVector evaluate(const Mdp& m, int goal, const MdScheduler& sched) {
    const int n = m.size();
    RatMatrix a(n, RatVector(n, 0));
    RatVector b(n, 0);
    for (int s = 0; s < n; ++s) {
        a[s][s] = 1;
        if (s == goal || m.is_trap(s)) continue;
        const Action& act = m.actions[s][sched[s]];
        b[s] = act.weight;
        for (const auto& tr : act.succ) a[s][tr.target] -= tr.prob;
    }
    return solve_linear(a, b);
}

// Max expected accumulated weight by policy iteration over proper schedulers; needs (BT).
std::pair<RatVector, MdScheduler> max_proper(const Mdp& m, int goal) {
    MdScheduler sched = proper_scheduler(m, goal);
    for (;;) {
        if (!proper(m, goal, sched)) throw Error(ErrorKind::AssumptionViolated, "policy iteration left the proper schedulers");
        RatVector v = evaluate(m, goal, sched);
        bool changed = false;
        for (int s = 0; s < m.size(); ++s) {
            if (m.is_trap(s)) continue;
            auto q = [&](int a) {
                Rat r = m.actions[s][a].weight;
                for (const auto& tr : m.actions[s][a].succ) r += tr.prob * v[tr.target];
                return r;
            };
            Rat best = q(sched[s]);
            for (int a = 0; a < static_cast<int>(m.actions[s].size()); ++a) {
                Rat c = q(a);
                if (c > best) {
                    best = c;
                    sched[s] = a;
                    changed = true;
                }
            }
        }
        if (!changed) return {v, sched};
    }
}

}  // namespace

Finiteness expectation_finite(const Mdp& m, int goal, Opt mode) {
    check_goal(m, goal);
    Finiteness f;
    f.divergent_mecs = divergent_mecs(m, mode);
    f.finite = f.divergent_mecs.empty();
    return f;
}

bool check_bt(const Mdp& m, int goal) {
    if (!min_expectation_finite(m, goal).finite)
        throw Error(ErrorKind::AssumptionViolated, "minimal expectation is not finite");
    for (const auto& mec : decompose_mecs(m)) {
        Mdp neg = negate_weights(restrict(m, mec).mdp);
        if (mdp_mean_payoff(neg, Opt::Max).value == 0 && has_zero_ec(neg)) return false;
    }
    return true;
}

SspResult solve_ssp(const Mdp& m, int goal, Opt mode) {
    check_goal(m, goal);
    SspResult res;
    const ExtRat inf{mode == Opt::Min ? ExtRat::Kind::NegInf : ExtRat::Kind::PosInf, 0};
    res.divergent_mecs = divergent_mecs(m, mode);
    std::vector<bool> div(m.size(), false);
    for (const auto& ec : res.divergent_mecs)
        for (int s : ec.states()) div[s] = true;
    auto infinite = qualitative_reach(m, div, Quant::Max, Bound::Positive);

    // the complement of `infinite` is closed under every action
    std::vector<bool> keep(m.size());
    for (int s = 0; s < m.size(); ++s) keep[s] = !infinite[s];
    Restriction fin = restrict_states(m, keep);
    // work on the maximization form so that 0-ECs can be flattened
    Mdp work = mode == Opt::Min ? negate_weights(fin.mdp) : fin.mdp;
    SpiderTrace tr = flatten_zero_ecs(work);
    res.flatten_steps = static_cast<int>(tr.steps.size());
    auto [v, sched] = max_proper(tr.final_mdp, fin.to_new[goal]);
    for (int i = static_cast<int>(tr.steps.size()) - 1; i >= 0; --i)
        sched = lift_scheduler(i == 0 ? work : tr.steps[i - 1].result.mdp, tr.steps[i], sched);

    res.value.assign(m.size(), inf);
    for (int s = 0; s < fin.mdp.size(); ++s)
        res.value[fin.to_orig[s]] = ExtRat{ExtRat::Kind::Finite, mode == Opt::Min ? Rat(-v[s]) : v[s]};
    if (std::none_of(infinite.begin(), infinite.end(), [](bool x) { return x; })) {
        MdScheduler full(m.size(), -1);
        for (int s = 0; s < fin.mdp.size(); ++s)
            if (sched[s] >= 0) full[fin.to_orig[s]] = fin.action_orig[s][sched[s]];
        res.scheduler = full;
    }
    return res;
}

}  // namespace wmdp
