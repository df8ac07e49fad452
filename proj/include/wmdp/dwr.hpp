#pragma once

#include "wmdp/model.hpp"
#include "wmdp/numeric.hpp"
#include "wmdp/property.hpp"

#include <optional>
#include <vector>

namespace wmdp {

struct NConstruction {
    Mdp n;
    std::vector<EndComponent> wd_mecs;  // positively weight-divergent MECs of the source MDP
    std::vector<int> entry, exit;       // per wd-MEC, states of n
    Int omega;
    std::vector<int> state_map;         // source state -> n state (entry for wd-MEC members)
    int goal = -1;                      // in n
    std::vector<bool> good;             // in n
};

// Source must be normalized: goal and good states are traps, every state reaches
// good or goal almost surely under some scheduler, and no non-good state reaches good
// almost surely.
NConstruction build_n_construction(const Mdp& m, int goal, const std::vector<bool>& good);

struct GoodEcResult {
    std::vector<std::vector<int>> trace;  // X_0, X_1, ... as indices into wd_mecs
    std::vector<int> good;                // the greatest fixed point
};
GoodEcResult good_ec_fixed_point(const NConstruction& nc);

// Optimal K for "reach good, or reach goal with weight >= K" almost surely from init, on an
// MDP without positively weight-divergent ECs whose goal and good states are traps.
ExtInt easdwr_value_no_wd(const Mdp& m, int goal, const std::vector<bool>& good, int init);

struct DwrDiagnostics {
    std::vector<int> s_inf;                   // forall/positive: states in S∞
    std::optional<NConstruction> n;           // exists/almost-sure with wd-MECs
    std::vector<int> n_state;                 // original state -> state of n, or -1
    std::optional<GoodEcResult> good_ecs;
    std::optional<ExtInt> n_value;            // value at n_state[s] in n with plain targets
};

struct DwrVerdict {
    bool holds = false;
    ExtInt margin;                // sup d such that the property with thresholds K_t + d holds
    std::optional<ExtInt> value;  // K_t + margin when exactly one target has a finite threshold
    DwrDiagnostics diagnostics;
};

DwrVerdict dwr_exists_pos(const Mdp& m, int s, const DwrProperty& p);
DwrVerdict dwr_forall_as(const Mdp& m, int s, const DwrProperty& p);
DwrVerdict dwr_forall_pos(const Mdp& m, int s, const DwrProperty& p);
DwrVerdict dwr_exists_as(const Mdp& m, int s, const DwrProperty& p);

DwrVerdict dwr(const Mdp& m, int s, const DwrProperty& p, Quantifier q, Bound b);

}  // namespace wmdp
