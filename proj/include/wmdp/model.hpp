#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wmdp {

using Int = mpz_class;
using Rat = mpq_class;

enum class ErrorKind {
    DistributionNotStochastic,
    DanglingTarget,
    DuplicateTransition,
    SchedulerIncomplete,
    NotClosed,
    InvalidPath,
    NotStronglyConnected,
    Singular,
    NotZeroBscc,
    ReferenceOutsideEc,
    PositiveMeanPayoffMec,
    PreconditionMaxMpNonzero,
    RequiresExponential,
    GoalNotTrap,
    GoalUnreachableFrom,
    AssumptionViolated,
    TrapPresent,
    TooLarge,
    WindowExceeded,
    CallbackReturnedDisabledAction,
    Syntax,
    UnsupportedProperty,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Integer extended by +inf and -inf.
struct ExtInt {
    enum class Kind { NegInf, Finite, PosInf };
    Kind kind = Kind::Finite;
    Int value = 0;

    static ExtInt neg_inf() { return {Kind::NegInf, 0}; }
    static ExtInt pos_inf() { return {Kind::PosInf, 0}; }
    static ExtInt of(const Int& v) { return {Kind::Finite, v}; }

    bool finite() const { return kind == Kind::Finite; }
    bool is_pos_inf() const { return kind == Kind::PosInf; }
    bool is_neg_inf() const { return kind == Kind::NegInf; }
    std::string str() const;
    ExtInt negated() const;
    ExtInt plus(const Int& d) const;
};

bool operator==(const ExtInt& a, const ExtInt& b);
bool operator<(const ExtInt& a, const ExtInt& b);
inline bool operator<=(const ExtInt& a, const ExtInt& b) { return !(b < a); }
inline bool operator>(const ExtInt& a, const ExtInt& b) { return b < a; }
inline bool operator>=(const ExtInt& a, const ExtInt& b) { return !(a < b); }

struct Transition {
    int target;
    Rat prob;
};

struct Action {
    std::string name;
    Int weight;
    std::vector<Transition> succ;  // sorted by target, no zero entries
};

struct Mdp {
    std::vector<std::string> names;
    std::vector<std::vector<Action>> actions;

    int size() const { return static_cast<int>(names.size()); }
    bool is_trap(int s) const { return actions[s].empty(); }
    std::size_t num_pairs() const;
    int add_state(const std::string& name);
    int find_state(const std::string& name) const;  // -1 if absent
    Rat prob(int s, int a, int t) const;
    Int max_abs_weight() const;
};

// Checks stochasticity, targets and duplicates, then sorts/merges rows.
Mdp validate_mdp(Mdp raw);

// choice[s] is an action index, -1 on traps.
using MdScheduler = std::vector<int>;

struct MarkovChain {
    std::vector<std::vector<Transition>> rows;  // empty row = trap
    std::vector<Int> weight;
    int size() const { return static_cast<int>(rows.size()); }
};

MarkovChain induced_chain(const Mdp& m, const MdScheduler& sched);

struct EndComponent {
    std::vector<std::pair<int, int>> pairs;  // sorted (state, action index)
    std::vector<int> states() const;
    bool contains_state(int s) const;
};

struct Restriction {
    Mdp mdp;
    std::vector<int> to_orig;                  // new state -> old state
    std::vector<int> to_new;                   // old state -> new state or -1
    std::vector<std::vector<int>> action_orig; // new (state, action) -> old action index
};

// Restriction to the pairs of ec; throws NotClosed when a successor escapes.
Restriction restrict(const Mdp& m, const EndComponent& ec);

// Largest sub-MDP on the given state set: keeps actions whose support stays inside.
Restriction restrict_states(const Mdp& m, const std::vector<bool>& keep);

EndComponent all_pairs(const Mdp& m);

struct FinitePath {
    std::vector<int> states;   // s0 .. sn
    std::vector<int> actions;  // a0 .. a(n-1), indices into actions[s_i]
};

Int path_weight(const Mdp& m, const FinitePath& p);

Mdp negate_weights(const Mdp& m);

std::vector<int> post(const Mdp& m, int s, int a);

}  // namespace wmdp
