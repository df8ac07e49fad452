#include "doctest.h"
#include "fixtures.hpp"

#include "wmdp/classify.hpp"
#include "wmdp/graph.hpp"
#include "wmdp/io.hpp"
#include "wmdp/numeric.hpp"
#include "wmdp/oracle.hpp"

using namespace wmdp;

TEST_CASE("fig1 end component is gambling") {
    Mdp ec = fx::mec_of(fx::load("fig1.mdp"), "s");
    Classification c = classify(ec, false);
    CHECK(c.max_mp == 0);
    CHECK(!c.pumping);
    CHECK(c.gambling == true);
    CHECK(c.has_zero_ec == false);
    CHECK(c.pos_weight_divergent);
    CHECK(c.witness_tag == "gambling");
    CHECK(is_gambling(ec, false) == true);
    CHECK(!has_zero_ec(ec));
    CHECK(maximal_zero_ecs(ec).max_zero_ecs.empty());
    WgtdivResult r = check_weight_divergence(ec);
    REQUIRE(r.divergent);
    CHECK(r.kind == WitnessKind::Gambling);
    CHECK(r.witness[fx::state(ec, "s")] == fx::action(ec, "s", "a"));
    // the negated component is the same shape, so every scheduler diverges
    CHECK(is_universally_weight_divergent(ec));
    auto bb = bounded_below_ec_states(fx::load("fig1.mdp"));
    CHECK(std::none_of(bb.begin(), bb.end(), [](bool x) { return x; }));
}

TEST_CASE("fig2 end component is pumping") {
    Mdp m = fx::load("fig2.mdp");
    Mdp ec = fx::mec_of(m, "s");
    Classification c = classify(ec, false);
    CHECK(c.max_mp == 1);
    CHECK(c.pumping);
    CHECK(c.universally_pumping);
    CHECK(c.witness_tag == "pumping");
    auto [p, w] = is_pumping(ec);
    CHECK(p);
    REQUIRE(w);
    CHECK(is_universally_pumping(ec));
    CHECK(is_universally_weight_divergent(ec));
    CHECK(check_weight_divergence(ec).kind == WitnessKind::Pumping);
    auto bb = bounded_below_ec_states(m);
    CHECK(bb == std::vector<bool>{true, false});
}

TEST_CASE("fig5 needs enumeration for gambling") {
    Mdp m = fx::load("fig5.mdp");
    CHECK(!is_universally_pumping(m));
    CHECK(!is_gambling(m, false).has_value());
    CHECK(is_gambling(m, true) == false);
    Classification c = classify(m, true);
    CHECK(c.max_mp == 1);
    CHECK(c.min_mp == -1);
    CHECK(c.has_zero_ec == true);
}

TEST_CASE("zero self-loop") {
    Mdp m;
    m.add_state("s");
    m.actions[0].push_back({"a", 0, {{0, Rat(1)}}});
    m = validate_mdp(m);
    CHECK(!is_pumping(m).first);
    auto z = has_zero_ec(m);
    REQUIRE(z);
    CHECK(z->pairs.size() == 1);
    ZeroEcInfo info = recurrence_values(maximal_zero_ecs(m), m);
    CHECK(info.rec.at(0) == 0);
    CHECK(info.lgr.at(0) == 0);
}

TEST_CASE("exB4 is a single maximal 0-EC") {
    Mdp m = fx::load("exB4.mdp");
    Classification c = classify(m, false);
    CHECK(c.max_mp == 0);
    CHECK(c.has_zero_ec == true);
    CHECK(!c.pos_weight_divergent);
    CHECK(c.gambling == false);
    CHECK(c.witness_tag == "zero-bscc");
    CHECK(!is_universally_weight_divergent(m));
    CHECK(!check_weight_divergence(m).divergent);

    ZeroEcInfo z = maximal_zero_ecs(m);
    REQUIRE(z.max_zero_ecs.size() == 1);
    CHECK(z.max_zero_ecs[0].pairs == all_pairs(m).pairs);
    const char* names[] = {"s", "t", "u", "v"};
    // w(x, y) for x, y in s t u v
    const int table[4][4] = {{0, 3, 1, -4}, {-3, 0, -2, -7}, {-1, 2, 0, -5}, {4, 7, 5, 0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(z.w(fx::state(m, names[i]), fx::state(m, names[j])) == table[i][j]);

    z = recurrence_values(z, m);
    const int rec[] = {0, -3, -1, 0}, lgr[] = {0, -3, -1, 4};
    for (int i = 0; i < 4; ++i) {
        int s = fx::state(m, names[i]);
        CHECK(z.rec.at(s) == rec[i]);
        CHECK(z.lgr.at(s) == lgr[i]);
        CHECK(z.rec.at(s) <= 0);
        CHECK(z.rec.at(s) <= z.lgr.at(s));
        for (int t = 0; t < m.size(); ++t) CHECK(z.lgr.at(s) == z.w(s, t) + z.lgr.at(t));
    }
    auto bb = bounded_below_ec_states(m);
    CHECK(std::all_of(bb.begin(), bb.end(), [](bool x) { return x; }));
}

TEST_CASE("fig7 is one maximal 0-EC and flattens to M2") {
    Mdp m = fx::load("fig7.mdp");
    ZeroEcInfo z = maximal_zero_ecs(m);
    REQUIRE(z.max_zero_ecs.size() == 1);
    CHECK(z.max_zero_ecs[0].pairs == all_pairs(m).pairs);
    WgtdivResult r = check_weight_divergence(m);
    REQUIRE(!r.divergent);
    const Mdp& n = r.flattened;
    int s = fx::state(n, "s"), u = fx::state(n, "u"), t = fx::state(n, "t");
    CHECK(n.is_trap(s));
    REQUIRE(n.actions[t].size() == 1);
    CHECK(n.actions[t][0].weight == -1);
    CHECK(n.actions[t][0].succ[0].target == u);
    REQUIRE(n.actions[u].size() == 1);
    CHECK(n.actions[u][0].weight == -2);
    CHECK(n.actions[u][0].succ[0].target == s);
}

TEST_CASE("zero_ec_search requires max MP 0") {
    CHECK_THROWS_AS(zero_ec_search(fx::mec_of(fx::load("fig2.mdp"), "s")), Error);
}

TEST_CASE("perturbation loop is bounded and monotone on random MDPs") {
    fx::Rng rng(5);
    int runs = 0;
    for (int round = 0; round < 2000 && runs < 150; ++round) {
        Mdp m = fx::random_mdp(rng, {}, true);
        if (mdp_mean_payoff(m, Opt::Max).value != 0) continue;
        ++runs;
        ZeroEcSearch z = zero_ec_search(m);
        CHECK(z.iterations <= static_cast<int>(m.size() * m.num_pairs()));
        for (std::size_t i = 1; i < z.max_mp_trace.size(); ++i) CHECK(z.max_mp_trace[i] <= z.max_mp_trace[i - 1]);
        if (z.bscc) CHECK(is_zero_bscc(m, *z.bscc));
        CHECK(z.bscc.has_value() == brute_classify(m).has_zero_ec.value());
    }
    CHECK(runs >= 50);
}

TEST_CASE("classify agrees with brute force") {
    fx::Rng rng(17);
    for (int round = 0; round < 300; ++round) {
        Mdp m = fx::random_mdp(rng, {}, true);
        Classification c = classify(m, true), b = brute_classify(m);
        INFO(write_model(m));
        CHECK(c.max_mp == b.max_mp);
        CHECK(c.min_mp == b.min_mp);
        CHECK(c.pumping == b.pumping);
        CHECK(c.universally_pumping == b.universally_pumping);
        CHECK(c.pos_weight_divergent == b.pos_weight_divergent);
        CHECK(c.neg_weight_divergent == b.neg_weight_divergent);
        CHECK(c.universally_weight_divergent == b.universally_weight_divergent);
        CHECK(c.gambling == b.gambling);
        CHECK(c.has_zero_ec == b.has_zero_ec);
    }
}

TEST_CASE("flattened MDP of a non-divergent component has no 0-EC") {
    fx::Rng rng(23);
    int seen = 0;
    for (int round = 0; round < 3000 && seen < 100; ++round) {
        Mdp m = fx::random_mdp(rng, {}, true);
        WgtdivResult r = check_weight_divergence(m);
        if (r.divergent) continue;
        ++seen;
        CHECK(r.flattened.size() == m.size());
        for (const auto& mec : decompose_mecs(r.flattened)) {
            Mdp sub = restrict(r.flattened, mec).mdp;
            CHECK(mdp_mean_payoff(sub, Opt::Max).value < 0);
            CHECK(!brute_classify(sub).has_zero_ec.value());
        }
    }
    CHECK(seen >= 30);
}
