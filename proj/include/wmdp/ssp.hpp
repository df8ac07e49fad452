#pragma once

#include "wmdp/model.hpp"
#include "wmdp/numeric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wmdp {

// Rational extended by +inf and -inf.
struct ExtRat {
    enum class Kind { NegInf, Finite, PosInf };
    Kind kind = Kind::Finite;
    Rat value = 0;

    bool finite() const { return kind == Kind::Finite; }
    std::string str() const;
    bool operator==(const ExtRat& o) const { return kind == o.kind && (kind != Kind::Finite || value == o.value); }
};

struct Finiteness {
    bool finite = true;
    std::vector<EndComponent> divergent_mecs;  // certificate when not finite
};

// Min variant: no negatively weight-divergent MEC. Max variant: no positively one.
// Requires goal to be a trap reached almost surely from every state under some scheduler.
Finiteness expectation_finite(const Mdp& m, int goal, Opt mode);
inline Finiteness min_expectation_finite(const Mdp& m, int goal) { return expectation_finite(m, goal, Opt::Min); }

// No 0-EC, given that the min expectation is finite.
bool check_bt(const Mdp& m, int goal);

struct SspResult {
    std::vector<ExtRat> value;
    std::optional<MdScheduler> scheduler;  // optimal and proper when every value is finite
    std::vector<EndComponent> divergent_mecs;
    int flatten_steps = 0;
};

SspResult solve_ssp(const Mdp& m, int goal, Opt mode);

}  // namespace wmdp
