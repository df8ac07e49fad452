#pragma once

#include "wmdp/model.hpp"

#include <map>
#include <optional>
#include <vector>

namespace wmdp {

// Potential p with p(t) - p(s) = weight of every path s -> t inside ec, anchored at p(anchor) = 0.
// Empty when ec has a cycle of nonzero weight.
std::optional<std::map<int, Int>> zero_ec_potential(const Mdp& m, const EndComponent& ec, int anchor);

struct SpiderResult {
    Mdp mdp;
    // new (state, action) -> (old state, old action); old action -1 marks a fresh tau pair
    std::vector<std::vector<std::pair<int, int>>> origin;
};

// Flattens the 0-BSCC ec around s0; tau actions are named "τ<step>".
SpiderResult spider(const Mdp& m, const EndComponent& ec, int s0, int step = 0);

struct SpiderStep {
    EndComponent bscc;   // in the MDP before the step
    int reference;
    std::vector<std::pair<int, Int>> tau_edges;  // (state, weight of its tau pair)
    SpiderResult result;
};

struct SpiderTrace {
    std::vector<SpiderStep> steps;
    Mdp final_mdp;
};

// Requires max MP <= 0 in every MEC; throws PositiveMeanPayoffMec otherwise.
SpiderTrace flatten_zero_ecs(const Mdp& m);

// MD scheduler of step.result.mdp pulled back to the MDP before the step: members of the
// flattened BSCC follow it, except the state owning the action the reference relocated.
MdScheduler lift_scheduler(const Mdp& before, const SpiderStep& step, const MdScheduler& t);

struct PurgedPath {
    std::vector<int> states;
    std::vector<Int> weights;  // weights[i] sits between states[i] and states[i+1]
};

PurgedPath purge(const Mdp& m, const FinitePath& path, const EndComponent& ec);

}  // namespace wmdp
