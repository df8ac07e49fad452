#include "fixtures.hpp"

#include "wmdp/buechi.hpp"
#include "wmdp/classify.hpp"
#include "wmdp/dwr.hpp"
#include "wmdp/games.hpp"
#include "wmdp/graph.hpp"
#include "wmdp/numeric.hpp"
#include "wmdp/oracle.hpp"
#include "wmdp/spider.hpp"
#include "wmdp/ssp.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

using namespace wmdp;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Accumulates failures with a short note each.
struct Check {
    Outcome out;
    void operator()(bool cond, const std::string& what) {
        if (!cond && out.ok) out.detail = "failed: " + what;
        out.ok = out.ok && cond;
    }
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("threw ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && secs > limit_s) {
        o.ok = false;
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("over the time limit");
    }
    failures += !o.ok;
    std::printf("%s %d %s (%.2fs / %gs)%s%s\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), secs, limit_s,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
}

std::set<std::string> pairs_of(const Mdp& m) {
    std::set<std::string> out;
    for (int s = 0; s < m.size(); ++s)
        for (const auto& a : m.actions[s]) {
            std::string name = a.name.rfind("τ", 0) == 0 ? "τ" : a.name;
            std::string line = m.names[s] + " " + name + " " + a.weight.get_str() + " :";
            for (const auto& tr : a.succ) line += " " + m.names[tr.target] + " " + tr.prob.get_str();
            out.insert(line);
        }
    return out;
}

EndComponent ec_of(const Mdp& m, std::initializer_list<std::pair<const char*, const char*>> pairs) {
    EndComponent ec;
    for (const auto& [s, a] : pairs) ec.pairs.push_back({fx::state(m, s), fx::action(m, s, a)});
    std::sort(ec.pairs.begin(), ec.pairs.end());
    return ec;
}

std::vector<bool> zero_ec_states(const Mdp& m) {
    std::vector<bool> out(m.size(), false);
    for (const auto& mec : decompose_mecs(m)) {
        Restriction r = restrict(m, mec);
        if (mdp_mean_payoff(r.mdp, Opt::Max).value != 0) continue;
        ZeroEcInfo z = maximal_zero_ecs(r.mdp);
        for (int s = 0; s < r.mdp.size(); ++s) out[r.to_orig[s]] = z.zero_ec_states[s];
    }
    return out;
}

// Pair count, single reachable MEC and 0-EC membership outside ec, across one spider step.
void spider_invariants(Check& check, const Mdp& before, const SpiderStep& st, const std::string& tag) {
    const Mdp& after = st.result.mdp;
    check(after.size() == before.size() && after.num_pairs() == before.num_pairs() - 1, tag + " S1");
    if (is_strongly_connected(before) && st.bscc.pairs.size() != before.num_pairs()) {
        auto mecs = decompose_mecs(after);
        bool s2 = mecs.size() == 1;
        if (s2) {
            std::vector<bool> target(after.size(), false);
            for (int s : mecs[0].states()) target[s] = true;
            auto reach = qualitative_reach(after, target, Quant::Max, Bound::Positive);
            s2 = std::all_of(reach.begin(), reach.end(), [](bool x) { return x; });
        }
        check(s2, tag + " S2");
    }
    auto zb = zero_ec_states(before), za = zero_ec_states(after);
    for (int s = 0; s < before.size(); ++s)
        if (!st.bscc.contains_state(s)) check(zb[s] == za[s], tag + " S4 at " + before.names[s]);
}

SpiderStep step_of(const Mdp& m, const EndComponent& ec, int ref, int n) {
    return {ec, ref, {}, spider(m, ec, ref, n)};
}

const std::pair<Quantifier, Bound> kCombos[] = {{Quantifier::Exists, Bound::AlmostSure},
                                                {Quantifier::Exists, Bound::Positive},
                                                {Quantifier::Forall, Bound::AlmostSure},
                                                {Quantifier::Forall, Bound::Positive}};

Outcome zero_ec_values() {
    Check check;
    Mdp m = fx::load("exB4.mdp");
    ZeroEcInfo z = maximal_zero_ecs(m);
    check(z.max_zero_ecs.size() == 1, "one maximal 0-EC");
    z = recurrence_values(z, m);
    const char* names[] = {"s", "t", "u", "v"};
    const int rec[] = {0, -3, -1, 0}, lgr[] = {0, -3, -1, 4};
    const int w[4][4] = {{0, 3, 1, -4}, {-3, 0, -2, -7}, {-1, 2, 0, -5}, {4, 7, 5, 0}};
    for (int i = 0; i < 4; ++i) {
        int s = fx::state(m, names[i]);
        check(z.rec.at(s) == rec[i], std::string("rec ") + names[i]);
        check(z.lgr.at(s) == lgr[i], std::string("lgr ") + names[i]);
        for (int j = 0; j < 4; ++j)
            check(z.w(s, fx::state(m, names[j])) == w[i][j], std::string("w ") + names[i] + names[j]);
    }
    return check.out;
}

Outcome spider_traces() {
    Check check;
    Mdp f3 = fx::load("fig3.mdp");
    int t = fx::state(f3, "t");
    SpiderStep a1 = step_of(f3, ec_of(f3, {{"s", "a"}, {"t", "a"}, {"u", "a"}}), t, 0);
    check(pairs_of(a1.result.mdp) == std::set<std::string>{"s τ 1 : t 1", "u τ 0 : t 1", "t b 2 : v 1/2 w 1/2",
                                                          "t c 4 : s 1/3 w 1/3 r 1/3", "v b -2 : u 1",
                                                          "w b -3 : s 1"},
          "fig3 M1");
    const Mdp& m1 = a1.result.mdp;
    SpiderStep a2 = step_of(m1, ec_of(m1, {{"t", "b"}, {"v", "b"}, {"w", "b"}, {"u", "τ0"}, {"s", "τ0"}}), t, 1);
    check(pairs_of(a2.result.mdp) == std::set<std::string>{"s τ 1 : t 1", "u τ 0 : t 1", "v τ -2 : t 1",
                                                          "w τ -2 : t 1", "t c 4 : s 1/3 w 1/3 r 1/3"},
          "fig3 M2");
    spider_invariants(check, f3, a1, "fig3 step 1");
    spider_invariants(check, m1, a2, "fig3 step 2");

    Mdp f7 = fx::load("fig7.mdp");
    SpiderStep b1 = step_of(f7, ec_of(f7, {{"t", "b"}, {"u", "a"}}), fx::state(f7, "u"), 0);
    check(pairs_of(b1.result.mdp) == std::set<std::string>{"t τ -1 : u 1", "u c -2 : s 1", "s d 2 : u 1"}, "fig7 M1");
    const Mdp& n1 = b1.result.mdp;
    SpiderStep b2 = step_of(n1, ec_of(n1, {{"u", "c"}, {"s", "d"}}), fx::state(f7, "s"), 1);
    check(pairs_of(b2.result.mdp) == std::set<std::string>{"t τ -1 : u 1", "u τ -2 : s 1"}, "fig7 M2");
    spider_invariants(check, f7, b1, "fig7 step 1");
    spider_invariants(check, n1, b2, "fig7 step 2");
    return check.out;
}

Outcome classification() {
    Check check;
    Classification c1 = classify(fx::mec_of(fx::load("fig1.mdp"), "s"), false);
    check(c1.gambling == true && c1.max_mp == 0 && !c1.pumping, "fig1");
    Classification c2 = classify(fx::mec_of(fx::load("fig2.mdp"), "s"), false);
    check(c2.pumping && c2.max_mp == 1, "fig2");
    Classification c4 = classify(fx::load("exB4.mdp"), false);
    check(c4.has_zero_ec == true && !c4.pos_weight_divergent, "exB4");
    return check.out;
}

Outcome good_ec() {
    Check check;
    Mdp f4 = fx::load("fig4.mdp");
    const int s = fx::state(f4, "s");
    DwrVerdict v = dwr_exists_as(f4, s, {{{fx::state(f4, "goal"), Int(0)}}});
    check(v.value && v.value->is_pos_inf(), "value +inf at s");
    if (!v.diagnostics.n || !v.diagnostics.good_ecs) return {false, "no N-construction"};
    const NConstruction& nc = *v.diagnostics.n;
    const auto& ge = *v.diagnostics.good_ecs;
    check(nc.wd_mecs.size() == 2, "two weight-divergent MECs");
    const int e = nc.wd_mecs[0].contains_state(s) ? 0 : 1;
    check(nc.wd_mecs[e].pairs == std::vector<std::pair<int, int>>{{s, fx::action(f4, "s", "b")}}, "E = {(s,b)}");
    check(nc.wd_mecs[1 - e].contains_state(fx::state(f4, "u")), "F contains u");
    check(ge.trace.size() == 2 && ge.trace[0].size() == 2 && ge.trace[1] == std::vector<int>{e}, "X0 = {E,F}, X1 = {E}");
    check(ge.good == std::vector<int>{e}, "fixed point {E}");
    ExtInt exit_value = easdwr_value_no_wd(nc.n, nc.goal, nc.good, nc.exit[e]);
    check(exit_value < *v.value, "exit value below");
    return {check.out.ok, check.out.ok ? "exit(E) value " + exit_value.str() : check.out.detail};
}

Outcome ssp_example() {
    Check check;
    Mdp m = fx::load("exC1.mdp");
    int goal = fx::state(m, "goal");
    SspResult r = solve_ssp(m, goal, Opt::Min);
    check(r.value[fx::state(m, "s")] == ExtRat{ExtRat::Kind::Finite, 0}, "E(s) = 0");
    check(r.value[fx::state(m, "t")] == ExtRat{ExtRat::Kind::Finite, -1}, "E(t) = -1");
    check(!check_bt(m, goal), "BT fails before flattening");
    check(check_bt(flatten_zero_ecs(m).final_mdp, goal), "BT holds after flattening");
    return check.out;
}

Outcome oracle_equivalence() {
    Check check;
    fx::Rng rng(20240601);
    int sc = 0;
    while (sc < 500) {
        Mdp m = fx::random_mdp(rng, {5, 2, -2, 2, 2}, true);
        Classification c = classify(m, true), b = brute_classify(m);
        ++sc;
        check(c.max_mp == b.max_mp && c.min_mp == b.min_mp && c.pumping == b.pumping &&
                  c.universally_pumping == b.universally_pumping &&
                  c.pos_weight_divergent == b.pos_weight_divergent &&
                  c.neg_weight_divergent == b.neg_weight_divergent &&
                  c.universally_weight_divergent == b.universally_weight_divergent && c.gambling == b.gambling &&
                  c.has_zero_ec == b.has_zero_ec,
              "classification of scMDP " + std::to_string(sc));
    }

    // A fixture counts when every query on it got both a verdict and a certified oracle answer.
    const UnfoldConfig cfg{-8, 8, WindowMode::Certified};
    int dwr_fixtures = 0, dwr_queries = 0, dwr_window = 0, dwr_unsupported = 0;
    for (int iter = 0; iter < 400 && dwr_fixtures < 200; ++iter) {
        Mdp m = fx::random_mdp(rng, {4, 2, -2, 2, 2}, false);
        DwrProperty p;
        for (int i = 0, k = rng.uniform(1, 2); i < k; ++i) {
            std::optional<Int> K;
            if (rng.uniform(0, 4) > 0) K = Int(0);
            p.targets.push_back({rng.uniform(0, m.size() - 1), K});
        }
        int s = rng.uniform(0, m.size() - 1);
        bool complete = true;
        for (auto [q, b] : kCombos) {
            for (int K = -3; K <= 3; ++K) {
                DwrProperty pk = p;
                for (auto& t : pk.targets)
                    if (t.K) t.K = Int(K);
                bool got, expect;
                try {
                    got = dwr(m, s, pk, q, b).holds;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::UnsupportedProperty) throw;
                    ++dwr_unsupported;
                    complete = false;
                    continue;
                }
                try {
                    expect = unfold_dwr(m, s, pk, q, b, cfg);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::WindowExceeded) throw;
                    ++dwr_window;
                    complete = false;
                    continue;
                }
                ++dwr_queries;
                check(got == expect, "dwr fixture " + std::to_string(iter) + " K " + std::to_string(K));
            }
        }
        dwr_fixtures += complete;
    }
    check(dwr_fixtures >= 200, "fewer than 200 complete dwr fixtures");

    int bu_fixtures = 0, bu_queries = 0, bu_window = 0;
    for (int iter = 0; iter < 400 && bu_fixtures < 200; ++iter) {
        Mdp m = fx::random_mdp(rng, {4, 2, -2, 2, 2}, false);
        for (int s = 0; s < m.size(); ++s)
            if (m.is_trap(s)) m.actions[s].push_back({"loop", rng.uniform(-2, 2), {{s, Rat(1)}}});
        std::vector<bool> F(m.size(), false);
        F[rng.uniform(0, m.size() - 1)] = true;
        if (rng.coin()) F[rng.uniform(0, m.size() - 1)] = true;
        int s = rng.uniform(0, m.size() - 1);
        bool complete = true;
        for (auto [q, b] : kCombos)
            for (int K = -3; K <= 3; ++K) {
                bool got = buechi(m, s, {F, K}, q, b).holds, expect;
                try {
                    expect = unfold_buechi(m, s, {F, K}, q, b, cfg);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::WindowExceeded) throw;
                    ++bu_window;
                    complete = false;
                    continue;
                }
                ++bu_queries;
                check(got == expect, "buechi fixture " + std::to_string(iter) + " K " + std::to_string(K));
            }
        bu_fixtures += complete;
    }
    check(bu_fixtures >= 200, "fewer than 200 complete buechi fixtures");
    std::ostringstream os;
    os << sc << " scMDPs; dwr " << dwr_fixtures << " fixtures/" << dwr_queries << " queries (skipped: "
       << dwr_window << " window, " << dwr_unsupported << " unsupported); buechi " << bu_fixtures << " fixtures/"
       << bu_queries << " queries (" << bu_window << " window)";
    if (check.out.ok) check.out.detail = os.str();
    else check.out.detail += "; " + os.str();
    return check.out;
}

Outcome games() {
    Check check;
    fx::Rng rng(77);
    for (int round = 0; round < 500; ++round) {
        MeanPayoffGame g;
        int n = rng.uniform(1, 6);
        for (int v = 0; v < n; ++v) g.add_vertex(rng.coin() ? 1 : 2);
        for (int v = 0; v < n; ++v)
            for (int e = 0, k = rng.uniform(1, 3); e < k; ++e) g.add_edge(v, rng.uniform(0, n - 1), rng.uniform(-3, 3));
        check(solve_mp_ge0(g).winning == brute_solve_game(g), "game " + std::to_string(round));
    }
    return {check.out.ok, check.out.ok ? "500 games" : check.out.detail};
}

Outcome perturbation() {
    Check check;
    int runs = 0;
    auto run = [&](const Mdp& sc, const std::string& tag) {
        if (mdp_mean_payoff(sc, Opt::Max).value != 0) return;
        ZeroEcSearch z = zero_ec_search(sc);
        std::size_t act = 0;
        for (const auto& a : sc.actions) act = std::max(act, a.size());
        check(z.iterations <= static_cast<int>(sc.size() * act), tag + " iteration bound");
        for (std::size_t i = 1; i < z.max_mp_trace.size(); ++i)
            check(z.max_mp_trace[i] <= z.max_mp_trace[i - 1], tag + " max MP increased");
        ++runs;
    };
    for (const char* f : {"fig1.mdp", "fig2.mdp", "fig3.mdp", "fig4.mdp", "fig5.mdp", "fig7.mdp", "fig9.mdp",
                          "exB4.mdp", "exC1.mdp", "adversarial.mdp"}) {
        Mdp m = fx::load(f);
        for (const auto& mec : decompose_mecs(m)) run(restrict(m, mec).mdp, f);
    }
    fx::Rng rng(99);
    for (int round = 0; round < 2000; ++round) run(fx::random_mdp(rng, {}, true), "random " + std::to_string(round));
    return {check.out.ok, check.out.ok ? std::to_string(runs) + " runs" : check.out.detail};
}

Outcome quotient_identity() {
    Check check;
    fx::Rng rng(2025);
    fx::RandomShape shape;
    shape.max_actions = 1;
    shape.max_succ = 3;
    for (int round = 0; round < 200; ++round) {
        Mdp m = fx::random_mdp(rng, shape, true);
        MarkovChain c = induced_chain(m, MdScheduler(m.size(), 0));
        Rat mp = mc_mean_payoff(c);
        for (int s = 0; s < c.size(); ++s) {
            RatVector w = expected_until(c, s, UntilKind::Weight);
            RatVector k = expected_until(c, s, UntilKind::Steps);
            Rat num = Rat(c.weight[s]), den = 1;
            for (const auto& tr : c.rows[s]) {
                num += tr.prob * w[tr.target];
                den += tr.prob * k[tr.target];
            }
            check(num / den == mp, "chain " + std::to_string(round));
        }
    }
    return {check.out.ok, check.out.ok ? "200 chains" : check.out.detail};
}

Outcome simulation() {
    Check check;
    Mdp f4 = fx::load("fig4.mdp");
    const int s = fx::state(f4, "s"), goal = fx::state(f4, "goal");
    auto sched = threshold_chasing(s, fx::action(f4, "s", "b"), fx::action(f4, "s", "a"), 3);
    SimReport a = simulate(f4, s, sched, 10000, 1000, 53);
    SimReport b = simulate(f4, s, sched, 10000, 1000, 53);
    int reached = 0;
    for (std::size_t i = 0; i < a.per_run.size(); ++i) {
        const RunSummary& r = a.per_run[i];
        if (r.final_state == goal) {
            ++reached;
            check(r.final >= 3, "run " + std::to_string(i) + " reached goal below 3");
        }
        const RunSummary& q = b.per_run[i];
        check(r.final == q.final && r.min == q.min && r.max == q.max && r.steps == q.steps &&
                  r.final_state == q.final_state,
              "run " + std::to_string(i) + " not reproducible");
    }
    check(a.per_run.size() == 1000, "1000 runs");
    return {check.out.ok, check.out.ok ? std::to_string(reached) + "/1000 runs reached goal" : check.out.detail};
}

}  // namespace

int main() {
    criterion(1, "0-EC values rec, lgr and w table", 1, zero_ec_values);
    criterion(2, "spider traces on fig3 and fig7 with S1/S2/S4", 1, spider_traces);
    criterion(3, "classification fixtures", 1, classification);
    criterion(4, "GoodEC fixed point on fig4", 1, good_ec);
    criterion(5, "SSP values and BT condition", 1, ssp_example);
    criterion(6, "oracle equivalence", 300, oracle_equivalence);
    criterion(7, "mean-payoff game solver", 60, games);
    criterion(8, "perturbation loop bound and monotonicity", 60, perturbation);
    criterion(9, "mean-payoff quotient identity", 30, quotient_identity);
    criterion(10, "threshold-chasing simulation", 10, simulation);
    return failures == 0 ? 0 : 1;
}
