#include "doctest.h"
#include "fixtures.hpp"

#include "wmdp/classify.hpp"
#include "wmdp/graph.hpp"
#include "wmdp/io.hpp"
#include "wmdp/numeric.hpp"
#include "wmdp/oracle.hpp"
#include "wmdp/spider.hpp"

#include <set>

using namespace wmdp;

namespace {

// One line per pair; tau actions lose their step suffix.
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

// States lying in some 0-EC, by MD-scheduler enumeration.
std::vector<bool> zero_ec_states_brute(const Mdp& m) {
    std::vector<bool> out(m.size(), false);
    enumerate_md(m, [&](const MdScheduler& sched) {
        MarkovChain c = induced_chain(m, sched);
        for (const auto& b : chain_bsccs(c)) {
            if (m.is_trap(b[0])) continue;
            EndComponent ec;
            for (int s : b) ec.pairs.push_back({s, sched[s]});
            if (is_zero_bscc(m, ec))
                for (int s : b) out[s] = true;
        }
        return true;
    });
    return out;
}

void check_tau_structure(const Mdp& m) {
    std::vector<std::vector<int>> adj(m.size());
    for (int s = 0; s < m.size(); ++s) {
        int taus = 0;
        for (const auto& a : m.actions[s])
            if (a.name.rfind("τ", 0) == 0) {
                ++taus;
                CHECK(a.succ.size() == 1);
                adj[s].push_back(a.succ[0].target);
            }
        CHECK(taus <= 1);
        if (taus == 1) CHECK(m.actions[s].size() == 1);
    }
    auto scc = strongly_connected_components(adj);
    CHECK(scc.count == m.size());
    for (int s = 0; s < m.size(); ++s)
        for (int t : adj[s]) CHECK(t != s);
}

}  // namespace

TEST_CASE("spider on fig3 yields M1 then M2") {
    Mdp m = fx::load("fig3.mdp");
    int t = fx::state(m, "t");
    SpiderResult m1 = spider(m, ec_of(m, {{"s", "a"}, {"t", "a"}, {"u", "a"}}), t);
    CHECK(pairs_of(m1.mdp) == std::set<std::string>{
                                  "s τ 1 : t 1",
                                  "u τ 0 : t 1",
                                  "t b 2 : v 1/2 w 1/2",
                                  "t c 4 : s 1/3 w 1/3 r 1/3",
                                  "v b -2 : u 1",
                                  "w b -3 : s 1",
                              });
    EndComponent f = ec_of(m1.mdp, {{"t", "b"}, {"v", "b"}, {"w", "b"}, {"u", "τ0"}, {"s", "τ0"}});
    SpiderResult m2 = spider(m1.mdp, f, t, 1);
    CHECK(pairs_of(m2.mdp) == std::set<std::string>{
                                  "s τ 1 : t 1",
                                  "u τ 0 : t 1",
                                  "v τ -2 : t 1",
                                  "w τ -2 : t 1",
                                  "t c 4 : s 1/3 w 1/3 r 1/3",
                              });
    CHECK(m1.mdp.num_pairs() == m.num_pairs() - 1);
    CHECK(m2.mdp.num_pairs() == m1.mdp.num_pairs() - 1);
}

TEST_CASE("spider on fig7 yields M1 then M2") {
    Mdp m = fx::load("fig7.mdp");
    SpiderResult m1 = spider(m, ec_of(m, {{"t", "b"}, {"u", "a"}}), fx::state(m, "u"));
    CHECK(pairs_of(m1.mdp) == std::set<std::string>{"t τ -1 : u 1", "u c -2 : s 1", "s d 2 : u 1"});
    SpiderResult m2 = spider(m1.mdp, ec_of(m1.mdp, {{"u", "c"}, {"s", "d"}}), fx::state(m, "s"), 1);
    CHECK(pairs_of(m2.mdp) == std::set<std::string>{"t τ -1 : u 1", "u τ -2 : s 1"});

    SpiderTrace tr = flatten_zero_ecs(m);
    REQUIRE(tr.steps.size() == 2);
    CHECK(pairs_of(tr.steps[0].result.mdp) == pairs_of(m1.mdp));
    CHECK(pairs_of(tr.final_mdp) == pairs_of(m2.mdp));
    CHECK(tr.steps[0].reference == fx::state(m, "u"));
    CHECK(tr.steps[1].reference == fx::state(m, "s"));
}

TEST_CASE("spider rejects bad inputs") {
    Mdp m = fx::load("fig3.mdp");
    CHECK_THROWS_AS(spider(m, ec_of(m, {{"s", "a"}, {"t", "a"}, {"u", "a"}}), fx::state(m, "v")), Error);
    // t c reaches r, outside the set
    CHECK_THROWS_AS(spider(m, ec_of(m, {{"s", "a"}, {"t", "c"}, {"u", "a"}}), fx::state(m, "t")), Error);
    // the cycle s a t b s weighs 2
    Mdp f5 = fx::load("fig5.mdp");
    CHECK_THROWS_AS(spider(f5, ec_of(f5, {{"s", "a"}, {"t", "b"}}), 0), Error);
}

TEST_CASE("flatten_zero_ecs on exB4 ends in a tau chain") {
    Mdp m = fx::load("exB4.mdp");
    SpiderTrace tr = flatten_zero_ecs(m);
    const Mdp& n = tr.final_mdp;
    int traps = 0;
    for (int s = 0; s < n.size(); ++s) traps += n.is_trap(s);
    CHECK(traps == 1);
    check_tau_structure(n);
    for (int s = 0; s < n.size(); ++s)
        if (!n.is_trap(s)) CHECK(n.actions[s][0].name.rfind("τ", 0) == 0);
}

TEST_CASE("flatten_zero_ecs leaves 0-EC-free MDPs alone") {
    Mdp m = fx::load("fig2.mdp");
    CHECK_THROWS_AS(flatten_zero_ecs(m), Error);
    Mdp c1 = fx::load("adversarial.mdp");
    SpiderTrace tr = flatten_zero_ecs(c1);
    CHECK(tr.steps.empty());
    CHECK(pairs_of(tr.final_mdp) == pairs_of(c1));
}

TEST_CASE("purge collapses ec fragments") {
    Mdp m = fx::load("fig3.mdp");
    EndComponent e = ec_of(m, {{"s", "a"}, {"t", "a"}, {"u", "a"}});
    FinitePath p{{fx::state(m, "s"), fx::state(m, "t"), fx::state(m, "r")},
                 {fx::action(m, "s", "a"), fx::action(m, "t", "c")}};
    PurgedPath out = purge(m, p, e);
    CHECK(out.states == std::vector<int>{fx::state(m, "s"), fx::state(m, "r")});
    CHECK(out.weights == std::vector<Int>{5});

    FinitePath outside{{fx::state(m, "v"), fx::state(m, "u")}, {fx::action(m, "v", "b")}};
    PurgedPath o2 = purge(m, outside, e);
    CHECK(o2.weights == std::vector<Int>{-2});
}

TEST_CASE("spider invariants on random MDPs") {
    fx::Rng rng(31);
    int steps = 0;
    for (int round = 0; round < 4000 && steps < 300; ++round) {
        Mdp m = fx::random_mdp(rng, {}, true);
        std::optional<EndComponent> ec;
        enumerate_md(m, [&](const MdScheduler& sched) {
            MarkovChain c = induced_chain(m, sched);
            for (const auto& b : chain_bsccs(c)) {
                EndComponent cand;
                for (int s : b) cand.pairs.push_back({s, sched[s]});
                if (is_zero_bscc(m, cand)) {
                    ec = cand;
                    return false;
                }
            }
            return true;
        });
        if (!ec) continue;
        ++steps;
        int s0 = ec->pairs.front().first;
        Mdp n = spider(m, *ec, s0).mdp;
        // S1
        CHECK(n.size() == m.size());
        CHECK(n.num_pairs() == m.num_pairs() - 1);
        // S2
        if (ec->pairs.size() != all_pairs(m).pairs.size()) {
            auto mecs = decompose_mecs(n);
            REQUIRE(mecs.size() == 1);
            std::vector<bool> target(n.size(), false);
            for (int s : mecs[0].states()) target[s] = true;
            auto reach = qualitative_reach(n, target, Quant::Max, Bound::Positive);
            CHECK(std::all_of(reach.begin(), reach.end(), [](bool x) { return x; }));
        }
        // S4
        auto before = zero_ec_states_brute(m), after = zero_ec_states_brute(n);
        for (int s = 0; s < m.size(); ++s)
            if (!ec->contains_state(s)) CHECK(before[s] == after[s]);
    }
    CHECK(steps >= 100);
}

TEST_CASE("flatten traces keep tau structure and bounded weights") {
    fx::Rng rng(37);
    int traces = 0;
    for (int round = 0; round < 5000 && traces < 200; ++round) {
        Mdp m = fx::random_mdp(rng, {}, false);
        bool ok = true;
        for (const auto& mec : decompose_mecs(m))
            ok = ok && mdp_mean_payoff(restrict(m, mec).mdp, Opt::Max).value <= 0;
        if (!ok) continue;
        SpiderTrace tr = flatten_zero_ecs(m);
        if (tr.steps.empty()) continue;
        ++traces;
        const Int bound = Int(m.size()) * m.max_abs_weight();
        std::size_t pairs = m.num_pairs();
        for (const auto& st : tr.steps) {
            const Mdp& n = st.result.mdp;
            CHECK(n.num_pairs() == --pairs);
            CHECK(n.max_abs_weight() <= bound);
            check_tau_structure(n);
        }
        for (const auto& mec : decompose_mecs(tr.final_mdp))
            CHECK(!brute_classify(restrict(tr.final_mdp, mec).mdp).has_zero_ec.value());
    }
    CHECK(traces >= 50);
}
