#pragma once

#include "wmdp/model.hpp"
#include "wmdp/rng.hpp"

#include <string>

namespace fx {

wmdp::Mdp load(const std::string& name);
std::string path(const std::string& name);

// Restriction of m to its MEC containing state `name`.
wmdp::Mdp mec_of(const wmdp::Mdp& m, const std::string& name);

int state(const wmdp::Mdp& m, const std::string& name);
int action(const wmdp::Mdp& m, const std::string& s, const std::string& a);

using Rng = wmdp::Rng;

struct RandomShape {
    int max_states = 5;
    int max_actions = 2;
    int wmin = -2, wmax = 2;
    int max_succ = 2;
};

// Random MDP with dyadic probabilities; strongly connected when requested.
wmdp::Mdp random_mdp(Rng& rng, const RandomShape& shape, bool strongly_connected);

}  // namespace fx
