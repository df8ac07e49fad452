#pragma once

#include "wmdp/model.hpp"
#include "wmdp/spider.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace wmdp {

bool is_zero_bscc(const Mdp& m, const EndComponent& ec);

// 0-EC existence by the perturbation loop on a strongly connected MDP with max MP 0.
struct ZeroEcSearch {
    std::optional<EndComponent> bscc;
    int iterations = 0;
    std::vector<Rat> max_mp_trace;  // max MP before each perturbation round
};
ZeroEcSearch zero_ec_search(const Mdp& scmdp);
std::optional<EndComponent> has_zero_ec(const Mdp& scmdp);

std::pair<bool, std::optional<MdScheduler>> is_pumping(const Mdp& scmdp);
bool is_universally_pumping(const Mdp& scmdp);

enum class WitnessKind { Pumping, Gambling };

struct WgtdivResult {
    bool divergent = false;
    MdScheduler witness;        // when divergent, single BSCC, on the input MDP
    WitnessKind kind = WitnessKind::Pumping;
    Mdp flattened;              // when not divergent: 0-EC-free MDP on the same states
    std::vector<SpiderStep> steps;
};
WgtdivResult check_weight_divergence(const Mdp& scmdp);

// nullopt when the answer needs MD-scheduler enumeration and it was not allowed.
std::optional<bool> is_gambling(const Mdp& scmdp, bool allow_exponential);

struct ZeroEcInfo {
    std::vector<EndComponent> max_zero_ecs;
    std::vector<bool> zero_ec_states;
    std::vector<int> component;             // state -> index into max_zero_ecs, or -1
    std::vector<std::map<int, Int>> potential;
    std::map<int, Int> rec, lgr;

    // Weight of every path s -> t inside their common maximal 0-EC.
    Int w(int s, int t) const;
};
ZeroEcInfo maximal_zero_ecs(const Mdp& scmdp);
ZeroEcInfo recurrence_values(ZeroEcInfo info, const Mdp& scmdp);

bool is_universally_weight_divergent(const Mdp& scmdp);

// States of pumping MECs plus states of maximal 0-ECs inside MECs with max MP 0.
std::vector<bool> bounded_below_ec_states(const Mdp& m);

struct Classification {
    Rat max_mp, min_mp;
    bool pumping = false;
    bool universally_pumping = false;
    bool pos_weight_divergent = false;
    bool neg_weight_divergent = false;
    bool universally_weight_divergent = false;
    std::optional<bool> gambling;
    std::optional<bool> has_zero_ec;
    std::optional<MdScheduler> witness;
    std::string witness_tag;  // "pumping" | "gambling" | "zero-bscc"
};
Classification classify(const Mdp& scmdp, bool allow_exponential);

}  // namespace wmdp
