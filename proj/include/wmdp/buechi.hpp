#pragma once

#include "wmdp/dwr.hpp"
#include "wmdp/model.hpp"
#include "wmdp/property.hpp"

#include <map>
#include <optional>
#include <vector>

namespace wmdp {

// State sets of MECs meeting F: pumping, gambling (weight-divergent, not pumping), their
// union, and the maximal 0-ECs meeting F inside MECs with max MP 0, with recurrence values.
struct FSets {
    std::vector<bool> pump_ec, gamb_ec, wdmec, zero_ec;
    std::map<int, Int> rec;
};
FSets compute_f_sets(const Mdp& m, const std::vector<bool>& F);

struct BuechiVerdict {
    bool holds = false;
    ExtInt value;                     // optimal K
    std::optional<DwrVerdict> reduction;
};

// All of these reject MDPs with traps (TrapPresent).
BuechiVerdict buechi_exists(const Mdp& m, int s, const BuechiProperty& p, Bound b);
// Eventually always wgt >= K.
BuechiVerdict cobuechi_exists(const Mdp& m, int s, const Int& K, Bound b);
BuechiVerdict cobuechi_forall(const Mdp& m, int s, const Int& K, Bound b);
BuechiVerdict buechi_forall(const Mdp& m, int s, const BuechiProperty& p, Bound b);

BuechiVerdict buechi(const Mdp& m, int s, const BuechiProperty& p, Quantifier q, Bound b);
BuechiVerdict cobuechi(const Mdp& m, int s, const Int& K, Quantifier q, Bound b);

// States of end components that avoid F.
std::vector<bool> f_avoiding_ec_states(const Mdp& m, const std::vector<bool>& F);

}  // namespace wmdp
