#include "wmdp/dwr.hpp"

#include "wmdp/classify.hpp"
#include "wmdp/games.hpp"
#include "wmdp/graph.hpp"
#include "wmdp/spider.hpp"

#include <algorithm>
#include <map>

namespace wmdp {

namespace {

struct Targets {
    std::vector<bool> star;
    std::map<int, Int> finite;  // lowest threshold per state, T* states excluded
};

Targets split_targets(const Mdp& m, const DwrProperty& p) {
    Targets t;
    t.star.assign(m.size(), false);
    for (const auto& tg : p.targets) {
        if (tg.state < 0 || tg.state >= m.size())
            throw Error(ErrorKind::DanglingTarget, "target state out of range");
        if (!tg.K) t.star[tg.state] = true;
    }
    for (const auto& tg : p.targets) {
        if (!tg.K || t.star[tg.state]) continue;
        auto it = t.finite.find(tg.state);
        if (it == t.finite.end())
            t.finite[tg.state] = *tg.K;
        else if (*tg.K < it->second)
            it->second = *tg.K;
    }
    return t;
}

Mdp strip(Mdp m, const std::vector<bool>& which) {
    for (int s = 0; s < static_cast<int>(which.size()); ++s)
        if (which[s]) m.actions[s].clear();
    return m;
}

std::string fresh_name(const Mdp& m, std::string base) {
    while (m.find_state(base) >= 0) base += "'";
    return base;
}

std::string fresh_action(const Mdp& m, int s, std::string base) {
    for (bool clash = true; clash;) {
        clash = false;
        for (const auto& a : m.actions[s]) clash = clash || a.name == base;
        if (clash) base += "'";
    }
    return base;
}

std::vector<bool> with(std::vector<bool> v, int s) {
    if (s >= 0) v[s] = true;
    return v;
}

DwrVerdict finish(ExtInt margin, const Targets& t, DwrDiagnostics diag = {}) {
    DwrVerdict v;
    v.holds = margin >= ExtInt::of(0);
    if (t.finite.size() == 1) v.value = margin.plus(t.finite.begin()->second);
    v.margin = std::move(margin);
    v.diagnostics = std::move(diag);
    return v;
}

ExtInt ext_min(const ExtInt& a, const ExtInt& b) { return b < a ? b : a; }
ExtInt ext_max(const ExtInt& a, const ExtInt& b) { return a < b ? b : a; }

std::vector<EndComponent> wd_mecs_of(const Mdp& m) {
    std::vector<EndComponent> out;
    for (const auto& mec : decompose_mecs(m))
        if (check_weight_divergence(restrict(m, mec).mdp).divergent) out.push_back(mec);
    return out;
}

// With only_finite, any finite answer is reported as the lower search bound.
ExtInt easdwr_no_wd(const Mdp& m, int goal, const std::vector<bool>& good, int init, bool only_finite) {
    auto plus = qualitative_reach(m, good, Quant::Max, Bound::AlmostSure);
    if (plus[init]) return ExtInt::pos_inf();
    Mdp m2 = strip(m, plus);
    std::vector<bool> good2(m.size());
    for (int s = 0; s < m.size(); ++s) good2[s] = good[s] || plus[s];
    auto ok = qualitative_reach(m2, with(good2, goal), Quant::Max, Bound::AlmostSure);
    if (!ok[init]) return ExtInt::neg_inf();

    Restriction r = restrict_states(m2, ok);
    Mdp flat;
    try {
        flat = flatten_zero_ecs(r.mdp).final_mdp;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PositiveMeanPayoffMec) throw;
        throw Error(ErrorKind::AssumptionViolated, std::string("positively weight-divergent EC: ") + e.what());
    }
    const int g = goal >= 0 ? r.to_new[goal] : -1;
    const int i = r.to_new[init];
    std::vector<bool> goodr(flat.size());
    for (int s = 0; s < flat.size(); ++s) goodr[s] = good2[r.to_orig[s]];
    Int wmin = 0, wmax = 0;
    for (const auto& row : flat.actions)
        for (const auto& a : row) {
            wmin = std::min(wmin, a.weight);
            wmax = std::max(wmax, a.weight);
        }
    const Int lo = flat.size() * wmin, hi = flat.size() * wmax;
    auto holds = [&](const Int& K) -> bool {
        MdpGame gm = mdp_as_game_for_easdwr(flat, g, goodr, i, K);
        return solve_mp_ge0(gm.game).winning[gm.state_vertex[i]];
    };
    if (!holds(lo)) return ExtInt::neg_inf();
    if (only_finite || holds(hi)) return ExtInt::of(only_finite ? lo : hi);
    Int a = lo, b = hi;  // holds(a), !holds(b)
    while (b - a > 1) {
        Int mid = a + (b - a) / 2;
        (holds(mid) ? a : b) = mid;
    }
    return ExtInt::of(a);
}

std::pair<Mdp, std::vector<bool>> trap_entries(const NConstruction& nc, const std::vector<int>& ecs) {
    Mdp n = nc.n;
    std::vector<bool> good = nc.good;
    for (int e : ecs) {
        n.actions[nc.entry[e]].clear();
        good[nc.entry[e]] = true;
    }
    return {std::move(n), std::move(good)};
}

}  // namespace

ExtInt easdwr_value_no_wd(const Mdp& m, int goal, const std::vector<bool>& good, int init) {
    return easdwr_no_wd(m, goal, good, init, false);
}

NConstruction build_n_construction(const Mdp& m, int goal, const std::vector<bool>& good) {
    if (goal >= 0 && !m.is_trap(goal)) throw Error(ErrorKind::AssumptionViolated, "goal is not a trap");
    for (int s = 0; s < m.size(); ++s)
        if (good[s] && !m.is_trap(s)) throw Error(ErrorKind::AssumptionViolated, "good state is not a trap");
    {
        auto plus = qualitative_reach(m, good, Quant::Max, Bound::AlmostSure);
        auto ok = qualitative_reach(m, with(good, goal), Quant::Max, Bound::AlmostSure);
        for (int s = 0; s < m.size(); ++s) {
            if (plus[s] && !good[s])
                throw Error(ErrorKind::AssumptionViolated, "'" + m.names[s] + "' reaches good almost surely");
            if (!ok[s]) throw Error(ErrorKind::AssumptionViolated, "'" + m.names[s] + "' misses the targets");
        }
    }
    NConstruction nc;
    nc.wd_mecs = wd_mecs_of(m);
    std::vector<int> owner(m.size(), -1);
    for (int e = 0; e < static_cast<int>(nc.wd_mecs.size()); ++e)
        for (int s : nc.wd_mecs[e].states()) owner[s] = e;

    nc.state_map.assign(m.size(), -1);
    for (int s = 0; s < m.size(); ++s)
        if (owner[s] < 0) nc.state_map[s] = nc.n.add_state(m.names[s]);
    for (int e = 0; e < static_cast<int>(nc.wd_mecs.size()); ++e) {
        const std::string tag = "E" + std::to_string(e + 1);
        nc.entry.push_back(nc.n.add_state(fresh_name(m, tag + "_in")));
        nc.exit.push_back(nc.n.add_state(fresh_name(m, tag + "_out")));
        for (int s : nc.wd_mecs[e].states()) nc.state_map[s] = nc.entry[e];
    }
    Int wmin = 0;
    for (const auto& row : m.actions)
        for (const auto& a : row) wmin = std::min(wmin, a.weight);
    nc.omega = std::max(Int(0), Int(-(nc.n.size() - 1) * wmin));

    auto mapped = [&](const Action& a, int skip_ec) {
        std::map<int, Rat> acc;
        Rat inside = 0;
        for (const auto& tr : a.succ) {
            if (skip_ec >= 0 && owner[tr.target] == skip_ec)
                inside += tr.prob;
            else
                acc[nc.state_map[tr.target]] += tr.prob;
        }
        std::vector<Transition> succ;
        for (const auto& [t, p] : acc) succ.push_back({t, p / (1 - inside)});
        return succ;
    };
    for (int s = 0; s < m.size(); ++s) {
        if (owner[s] >= 0) continue;
        for (const auto& a : m.actions[s]) nc.n.actions[nc.state_map[s]].push_back({a.name, a.weight, mapped(a, -1)});
    }
    for (int e = 0; e < static_cast<int>(nc.wd_mecs.size()); ++e) {
        nc.n.actions[nc.entry[e]].push_back({"τ", nc.omega, {{nc.exit[e], Rat(1)}}});
        for (int s : nc.wd_mecs[e].states())
            for (const auto& a : m.actions[s]) {
                bool leaves = false;
                for (const auto& tr : a.succ) leaves = leaves || owner[tr.target] != e;
                if (leaves)
                    nc.n.actions[nc.exit[e]].push_back({m.names[s] + "." + a.name, a.weight, mapped(a, e)});
            }
    }
    nc.goal = goal >= 0 ? nc.state_map[goal] : -1;
    nc.good.assign(nc.n.size(), false);
    for (int s = 0; s < m.size(); ++s)
        if (good[s]) nc.good[nc.state_map[s]] = true;
    return nc;
}

GoodEcResult good_ec_fixed_point(const NConstruction& nc) {
    GoodEcResult r;
    std::vector<int> x;
    for (int e = 0; e < static_cast<int>(nc.wd_mecs.size()); ++e) x.push_back(e);
    r.trace.push_back(x);
    while (true) {
        auto [n, good] = trap_entries(nc, x);
        std::vector<int> next;
        for (int e : x)
            if (!easdwr_no_wd(n, nc.goal, good, nc.exit[e], true).is_neg_inf()) next.push_back(e);
        if (next == x) break;
        x = next;
        r.trace.push_back(x);
    }
    r.good = x;
    return r;
}

DwrVerdict dwr_exists_pos(const Mdp& m, int s, const DwrProperty& p) {
    Targets t = split_targets(m, p);
    auto reach = reachable_from(m, {s});
    for (int x = 0; x < m.size(); ++x)
        if (t.star[x] && reach[x]) return finish(ExtInt::pos_inf(), t);
    auto pw = extremal_path_weights(weight_graph(m, Aggregate::Max), s, Extremum::Max);
    ExtInt margin = ExtInt::neg_inf();
    for (const auto& [x, K] : t.finite) {
        if (pw[x].kind == PathWeight::Kind::PosInf) margin = ExtInt::pos_inf();
        if (pw[x].finite()) margin = ext_max(margin, ExtInt::of(pw[x].value - K));
    }
    return finish(margin, t);
}

DwrVerdict dwr_forall_as(const Mdp& m, int s, const DwrProperty& p) {
    const Targets orig = split_targets(m, p);
    Targets t = orig;
    Mdp m1 = strip(m, t.star);
    std::vector<int> open;
    for (const auto& [x, K] : t.finite)
        if (!m1.is_trap(x)) open.push_back(x);
    if (open.size() > 1)
        throw Error(ErrorKind::UnsupportedProperty, "more than one non-trap target with a finite threshold");
    if (open.size() == 1) {
        const int g = open[0];
        std::vector<bool> all = t.star;
        for (const auto& [x, K] : t.finite) all[x] = true;
        auto min_t = qualitative_reach(m1, all, Quant::Min, Bound::AlmostSure);
        auto from_g = reachable_from(m1, {g});
        bool escape = false;
        for (int x = 0; x < m1.size(); ++x) escape = escape || (from_g[x] && !min_t[x]);
        // After a failed first visit the adversary either escapes all targets, keeps g's
        // visits low inside its MEC, or neither; in the last case g acts like a T* target.
        bool as_star = false;
        if (!escape) {
            bool keeps_low = false;
            for (const auto& mec : decompose_mecs(m1)) {
                if (!mec.contains_state(g)) continue;
                Restriction r = restrict(m1, mec);
                Rat mp = mdp_mean_payoff(r.mdp, Opt::Min).value;
                keeps_low = mp < 0 || (mp == 0 && has_zero_ec(negate_weights(r.mdp)));
            }
            if (!keeps_low) {
                for (const auto& [x, K] : t.finite)
                    if (x != g && from_g[x])
                        throw Error(ErrorKind::UnsupportedProperty,
                                    "non-trap target '" + m.names[g] + "' can be left towards another finite target");
                as_star = true;
            }
        }
        m1.actions[g].clear();
        if (as_star) {
            t.star[g] = true;
            t.finite.erase(g);
        }
    }
    std::vector<bool> all = t.star;
    for (const auto& [x, K] : t.finite) all[x] = true;
    auto finish_orig = [&](ExtInt margin) { return finish(std::move(margin), orig); };
    if (!qualitative_reach(m1, all, Quant::Min, Bound::AlmostSure)[s]) return finish_orig(ExtInt::neg_inf());
    auto star_as = qualitative_reach(m1, t.star, Quant::Min, Bound::AlmostSure);
    if (star_as[s]) return finish_orig(ExtInt::pos_inf());
    std::vector<bool> v(m1.size());
    for (int x = 0; x < m1.size(); ++x) v[x] = !star_as[x];
    Digraph g = weight_graph(m1, Aggregate::Min, &v);
    if (detect_sign_cycle(g, Sign::Negative, s)) return finish_orig(ExtInt::neg_inf());
    auto pw = extremal_path_weights(g, s, Extremum::Min);
    ExtInt margin = ExtInt::pos_inf();
    for (const auto& [x, K] : t.finite) {
        if (pw[x].kind == PathWeight::Kind::NegInf) margin = ExtInt::neg_inf();
        if (pw[x].finite()) margin = ext_min(margin, ExtInt::of(pw[x].value - K));
    }
    return finish_orig(margin);
}

DwrVerdict dwr_forall_pos(const Mdp& m, int s, const DwrProperty& p) {
    Targets t = split_targets(m, p);
    Mdp mm = strip(m, t.star);
    const int goal = mm.add_state(fresh_name(mm, "goal"));
    for (int x = 0; x < m.size(); ++x)
        if (t.star[x]) mm.actions[x].push_back({"τ", 1, {{x, Rat(1, 2)}, {goal, Rat(1, 2)}}});
    for (const auto& [x, K] : t.finite) {
        if (mm.is_trap(x)) {
            mm.actions[x].push_back({"τ", -K, {{goal, Rat(1)}}});
            continue;
        }
        const int gx = mm.add_state(fresh_name(mm, m.names[x] + "'"));
        for (std::size_t a = 0; a < mm.actions[x].size(); ++a) {
            const int ga = mm.add_state(fresh_name(mm, m.names[x] + "'" + mm.actions[x][a].name));
            Action& act = mm.actions[x][a];
            for (auto& tr : act.succ) tr.prob /= 2;
            act.succ.push_back({ga, Rat(1, 2)});
            mm.actions[ga].push_back({"τ", -act.weight, {{gx, Rat(1)}}});
        }
        mm.actions[gx].push_back({"τ", -K, {{goal, Rat(1)}}});
    }
    std::vector<bool> goal_only(mm.size(), false);
    goal_only[goal] = true;
    auto pos = qualitative_reach(mm, goal_only, Quant::Min, Bound::Positive);
    std::vector<bool> fail(mm.size());
    for (int x = 0; x < mm.size(); ++x) fail[x] = !pos[x];
    Mdp mf = strip(mm, fail);

    MdpGame gm = mdp_as_game_for_sinf(mf);
    auto sol = solve_mp_ge0(gm.game);
    std::vector<bool> fin(mf.size());
    DwrDiagnostics diag;
    for (int x = 0; x < mf.size(); ++x) {
        fin[x] = sol.winning[gm.state_vertex[x]];
        if (!fin[x] && x < m.size()) diag.s_inf.push_back(x);
    }
    if (!fin[s]) return finish(ExtInt::pos_inf(), t, std::move(diag));

    std::vector<ExtInt> k(mf.size(), ExtInt::neg_inf());
    k[goal] = ExtInt::of(0);
    // Run to the fixpoint: n-1 rounds fall short when the adversary avoids a positive cycle.
    for (bool changed = true; changed;) {
        std::vector<ExtInt> next = k;
        for (int x = 0; x < mf.size(); ++x) {
            if (!fin[x] || mf.is_trap(x)) continue;
            std::optional<ExtInt> best;
            for (const auto& a : mf.actions[x]) {
                bool inside = true;
                ExtInt hi = ExtInt::neg_inf();
                for (const auto& tr : a.succ) {
                    inside = inside && fin[tr.target];
                    hi = ext_max(hi, k[tr.target]);
                }
                if (!inside) continue;
                ExtInt val = hi.plus(a.weight);
                best = best ? ext_min(*best, val) : val;
            }
            if (best) next[x] = *best;
        }
        changed = next != k;
        k = std::move(next);
    }
    return finish(k[s], t, std::move(diag));
}

DwrVerdict dwr_exists_as(const Mdp& m, int s, const DwrProperty& p) {
    Targets t = split_targets(m, p);
    Mdp m1 = strip(m, t.star);
    std::vector<bool> good = t.star;
    int goal = -1;
    Int base = 0;
    if (t.finite.size() == 1 && m1.is_trap(t.finite.begin()->first)) {
        goal = t.finite.begin()->first;
        base = t.finite.begin()->second;
    } else if (!t.finite.empty()) {
        goal = m1.add_state(fresh_name(m1, "goal"));
        good.push_back(false);
        for (const auto& [x, K] : t.finite)
            m1.actions[x].push_back({fresh_action(m1, x, "τ"), -K, {{goal, Rat(1)}}});
    }
    DwrDiagnostics diag;
    auto done = [&](const ExtInt& v) { return finish(v.plus(-base), t, std::move(diag)); };

    auto plus = qualitative_reach(m1, good, Quant::Max, Bound::AlmostSure);
    if (plus[s]) return done(ExtInt::pos_inf());
    Mdp m2 = strip(m1, plus);
    for (int x = 0; x < m1.size(); ++x) good[x] = good[x] || plus[x];
    auto ok = qualitative_reach(m2, with(good, goal), Quant::Max, Bound::AlmostSure);
    if (!ok[s]) return done(ExtInt::neg_inf());

    Restriction r = restrict_states(m2, ok);
    const Mdp& m3 = r.mdp;
    const int goal3 = goal >= 0 ? r.to_new[goal] : -1;
    const int s3 = r.to_new[s];
    std::vector<bool> good3(m3.size());
    for (int x = 0; x < m3.size(); ++x) good3[x] = good[r.to_orig[x]];
    if (wd_mecs_of(m3).empty()) return done(easdwr_value_no_wd(m3, goal3, good3, s3));

    NConstruction nc = build_n_construction(m3, goal3, good3);
    diag.n_state.assign(m.size(), -1);
    for (int x = 0; x < m.size(); ++x)
        if (r.to_new[x] >= 0) diag.n_state[x] = nc.state_map[r.to_new[x]];
    const int sn = nc.state_map[s3];
    diag.n_value = easdwr_value_no_wd(nc.n, nc.goal, nc.good, sn).plus(-base);
    GoodEcResult ge = good_ec_fixed_point(nc);

    std::vector<bool> target = good3;
    for (int e : ge.good)
        for (int x : nc.wd_mecs[e].states()) target[x] = true;
    const bool inf = qualitative_reach(m3, target, Quant::Max, Bound::AlmostSure)[s3];
    auto [n2, good_n] = trap_entries(nc, ge.good);
    ExtInt v = inf ? ExtInt::pos_inf() : easdwr_value_no_wd(n2, nc.goal, good_n, sn);
    diag.n = std::move(nc);
    diag.good_ecs = std::move(ge);
    return done(v);
}

DwrVerdict dwr(const Mdp& m, int s, const DwrProperty& p, Quantifier q, Bound b) {
    if (s < 0 || s >= m.size()) throw Error(ErrorKind::DanglingTarget, "state out of range");
    if (q == Quantifier::Exists)
        return b == Bound::AlmostSure ? dwr_exists_as(m, s, p) : dwr_exists_pos(m, s, p);
    return b == Bound::AlmostSure ? dwr_forall_as(m, s, p) : dwr_forall_pos(m, s, p);
}

}  // namespace wmdp
