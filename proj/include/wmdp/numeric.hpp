#pragma once

#include "wmdp/model.hpp"

#include <vector>

namespace wmdp {

using RatVector = std::vector<Rat>;
using RatMatrix = std::vector<std::vector<Rat>>;

// Fraction-free (Bareiss) elimination on the integer-scaled system.
RatVector solve_linear(const RatMatrix& a, const RatVector& b);

// Stationary distribution of a strongly connected chain.
RatVector stationary_distribution(const MarkovChain& c);

bool chain_strongly_connected(const MarkovChain& c);

Rat mc_mean_payoff(const MarkovChain& c);

enum class UntilKind { Weight, Steps };

RatVector expected_until(const MarkovChain& c, int anchor, UntilKind kind);

// BSCCs of a chain as sorted state lists, ordered by smallest state.
std::vector<std::vector<int>> chain_bsccs(const MarkovChain& c);

enum class Opt { Max, Min };

struct MeanPayoffResult {
    Rat value;
    MdScheduler witness;              // single BSCC attaining value
    bool witness_has_single_bscc = false;
    MdScheduler policy;               // raw policy-iteration fixpoint
    std::vector<Rat> gain;            // per-state gain of policy
};

// Multichain gain-bias policy iteration; requires no traps.
MeanPayoffResult optimal_mean_payoff(const Mdp& m, Opt mode);

// Strongly connected wrapper; throws NotStronglyConnected.
MeanPayoffResult mdp_mean_payoff(const Mdp& scmdp, Opt mode);

// Extends sched on `closed` to all states via actions that reach `closed` with positive probability.
MdScheduler reroute_to(const Mdp& m, const MdScheduler& sched, const std::vector<bool>& closed);

}  // namespace wmdp
