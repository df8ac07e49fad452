#pragma once

#include "wmdp/graph.hpp"
#include "wmdp/model.hpp"

#include <optional>
#include <vector>

namespace wmdp {

enum class Quantifier { Exists, Forall };

// Reach `state` with accumulated weight >= K; an empty K means -inf (plain reachability).
struct DwrTarget {
    int state;
    std::optional<Int> K;
};

struct DwrProperty {
    std::vector<DwrTarget> targets;
};

// Infinitely often weight >= K and infinitely often F.
struct BuechiProperty {
    std::vector<bool> F;
    Int K;
};

}  // namespace wmdp
