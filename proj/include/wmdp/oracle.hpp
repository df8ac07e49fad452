#pragma once

#include "wmdp/classify.hpp"
#include "wmdp/games.hpp"
#include "wmdp/model.hpp"
#include "wmdp/property.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace wmdp {

// Visits MD schedulers in lexicographic order until visit returns false.
// Throws TooLarge when there are more than cap of them.
void enumerate_md(const Mdp& m, const std::function<bool(const MdScheduler&)>& visit,
                  double cap = 1e6);

// Classification by MD-scheduler enumeration and per-BSCC analysis.
Classification brute_classify(const Mdp& scmdp);

// Player-1 winning region for MP >= 0 over all positional strategy pairs.
std::vector<bool> brute_solve_game(const MeanPayoffGame& g);

// Weights are tracked inside [lo, hi]. The query is answered on a pessimistic product
// (clamp at hi, below lo loses) and an optimistic one (clamp at lo, above hi wins);
// disagreement throws WindowExceeded. The one-sided modes answer on a single product.
enum class WindowMode { Certified, Pessimistic, Optimistic };

struct UnfoldConfig {
    int lo = -8;
    int hi = 8;
    WindowMode mode = WindowMode::Certified;
};

bool unfold_dwr(const Mdp& m, int s, const DwrProperty& p, Quantifier q, Bound b,
                const UnfoldConfig& cfg = {});
bool unfold_buechi(const Mdp& m, int s, const BuechiProperty& p, Quantifier q, Bound b,
                   const UnfoldConfig& cfg = {});
bool unfold_cobuechi(const Mdp& m, int s, const Int& K, Quantifier q, Bound b,
                     const UnfoldConfig& cfg = {});

// Largest K in [lo, hi] for which holds(K); -inf if none, +inf if even hi holds.
ExtInt unfold_value(const std::function<bool(const Int&)>& holds, const UnfoldConfig& cfg = {});

// Returns an action index enabled at state given the accumulated weight and visit counts.
using SchedulerCallback =
    std::function<int(int state, const Int& weight, const std::vector<long long>& visits)>;

SchedulerCallback md_callback(const MdScheduler& sched);

// Takes `pump` at `state` while the weight is below K, then `leave`; first action elsewhere.
SchedulerCallback threshold_chasing(int state, int pump, int leave, const Int& K);

struct RunSummary {
    Int min, max, final;
    int final_state;
    long long steps;
    bool trapped;
};

struct SimReport {
    long long runs, steps;
    std::uint64_t seed;
    std::vector<RunSummary> per_run;
    std::vector<long long> runs_visiting;  // per state
};

SimReport simulate(const Mdp& m, int init, const SchedulerCallback& sched, long long steps,
                   long long runs, std::uint64_t seed);

}  // namespace wmdp
