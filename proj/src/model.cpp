#include "wmdp/model.hpp"

#include <algorithm>
#include <set>

namespace wmdp {

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::DistributionNotStochastic: return "DistributionNotStochastic";
    case ErrorKind::DanglingTarget: return "DanglingTarget";
    case ErrorKind::DuplicateTransition: return "DuplicateTransition";
    case ErrorKind::SchedulerIncomplete: return "SchedulerIncomplete";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::InvalidPath: return "InvalidPath";
    case ErrorKind::NotStronglyConnected: return "NotStronglyConnected";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NotZeroBscc: return "NotZeroBscc";
    case ErrorKind::ReferenceOutsideEc: return "ReferenceOutsideEc";
    case ErrorKind::PositiveMeanPayoffMec: return "PositiveMeanPayoffMec";
    case ErrorKind::PreconditionMaxMpNonzero: return "PreconditionMaxMpNonzero";
    case ErrorKind::RequiresExponential: return "RequiresExponential";
    case ErrorKind::GoalNotTrap: return "GoalNotTrap";
    case ErrorKind::GoalUnreachableFrom: return "GoalUnreachableFrom";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::TrapPresent: return "TrapPresent";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::WindowExceeded: return "WindowExceeded";
    case ErrorKind::CallbackReturnedDisabledAction: return "CallbackReturnedDisabledAction";
    case ErrorKind::Syntax: return "Syntax";
    case ErrorKind::UnsupportedProperty: return "UnsupportedProperty";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

std::string ExtInt::str() const {
    if (kind == Kind::PosInf) return "+inf";
    if (kind == Kind::NegInf) return "-inf";
    return value.get_str();
}

ExtInt ExtInt::negated() const {
    if (kind == Kind::PosInf) return neg_inf();
    if (kind == Kind::NegInf) return pos_inf();
    return of(-value);
}

ExtInt ExtInt::plus(const Int& d) const {
    return finite() ? of(value + d) : *this;
}

bool operator==(const ExtInt& a, const ExtInt& b) {
    return a.kind == b.kind && (!a.finite() || a.value == b.value);
}

bool operator<(const ExtInt& a, const ExtInt& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return a.finite() && a.value < b.value;
}

std::size_t Mdp::num_pairs() const {
    std::size_t n = 0;
    for (const auto& row : actions) n += row.size();
    return n;
}

int Mdp::add_state(const std::string& name) {
    names.push_back(name);
    actions.emplace_back();
    return size() - 1;
}

int Mdp::find_state(const std::string& name) const {
    for (int s = 0; s < size(); ++s)
        if (names[s] == name) return s;
    return -1;
}

Rat Mdp::prob(int s, int a, int t) const {
    for (const auto& tr : actions[s][a].succ)
        if (tr.target == t) return tr.prob;
    return 0;
}

Int Mdp::max_abs_weight() const {
    Int w = 0;
    for (const auto& row : actions)
        for (const auto& act : row)
            if (abs(act.weight) > w) w = abs(act.weight);
    return w;
}

Mdp validate_mdp(Mdp m) {
    if (m.actions.size() != m.names.size())
        throw Error(ErrorKind::DanglingTarget, "action table does not match state list");
    std::set<std::string> seen_states;
    for (const auto& n : m.names)
        if (!seen_states.insert(n).second)
            throw Error(ErrorKind::DuplicateTransition, "state '" + n + "' declared twice");
    for (int s = 0; s < m.size(); ++s) {
        std::set<std::string> seen;
        for (auto& act : m.actions[s]) {
            if (!seen.insert(act.name).second)
                throw Error(ErrorKind::DuplicateTransition,
                            "(" + m.names[s] + "," + act.name + ") declared twice");
            std::sort(act.succ.begin(), act.succ.end(),
                      [](const Transition& x, const Transition& y) { return x.target < y.target; });
            Rat sum = 0;
            for (std::size_t i = 0; i < act.succ.size(); ++i) {
                const auto& tr = act.succ[i];
                if (tr.target < 0 || tr.target >= m.size())
                    throw Error(ErrorKind::DanglingTarget,
                                "(" + m.names[s] + "," + act.name + ") has an unknown successor");
                if (i > 0 && act.succ[i - 1].target == tr.target)
                    throw Error(ErrorKind::DuplicateTransition,
                                "(" + m.names[s] + "," + act.name + ") lists '" + m.names[tr.target] +
                                    "' twice");
                if (tr.prob <= 0 || tr.prob > 1)
                    throw Error(ErrorKind::DistributionNotStochastic,
                                "(" + m.names[s] + "," + act.name + ") has probability " +
                                    tr.prob.get_str());
                sum += tr.prob;
            }
            if (sum != 1)
                throw Error(ErrorKind::DistributionNotStochastic,
                            "(" + m.names[s] + "," + act.name + ") sums to " + sum.get_str());
        }
    }
    return m;
}

MarkovChain induced_chain(const Mdp& m, const MdScheduler& sched) {
    if (static_cast<int>(sched.size()) != m.size())
        throw Error(ErrorKind::SchedulerIncomplete, "scheduler size differs from state count");
    MarkovChain c;
    c.rows.resize(m.size());
    c.weight.assign(m.size(), 0);
    for (int s = 0; s < m.size(); ++s) {
        if (m.is_trap(s)) continue;
        int a = sched[s];
        if (a < 0 || a >= static_cast<int>(m.actions[s].size()))
            throw Error(ErrorKind::SchedulerIncomplete, "no enabled choice at '" + m.names[s] + "'");
        c.rows[s] = m.actions[s][a].succ;
        c.weight[s] = m.actions[s][a].weight;
    }
    return c;
}

std::vector<int> EndComponent::states() const {
    std::vector<int> out;
    for (const auto& [s, a] : pairs)
        if (out.empty() || out.back() != s) out.push_back(s);
    return out;
}

bool EndComponent::contains_state(int s) const {
    auto it = std::lower_bound(pairs.begin(), pairs.end(), std::make_pair(s, -1));
    return it != pairs.end() && it->first == s;
}

Restriction restrict(const Mdp& m, const EndComponent& ec) {
    Restriction r;
    r.to_new.assign(m.size(), -1);
    for (int s : ec.states()) {
        r.to_new[s] = static_cast<int>(r.to_orig.size());
        r.to_orig.push_back(s);
        r.mdp.add_state(m.names[s]);
    }
    r.action_orig.resize(r.to_orig.size());
    for (const auto& [s, a] : ec.pairs) {
        const Action& act = m.actions[s][a];
        Action copy{act.name, act.weight, {}};
        for (const auto& tr : act.succ) {
            if (r.to_new[tr.target] < 0)
                throw Error(ErrorKind::NotClosed, "(" + m.names[s] + "," + act.name + ") reaches '" +
                                                      m.names[tr.target] + "'");
            copy.succ.push_back({r.to_new[tr.target], tr.prob});
        }
        r.mdp.actions[r.to_new[s]].push_back(std::move(copy));
        r.action_orig[r.to_new[s]].push_back(a);
    }
    return r;
}

Restriction restrict_states(const Mdp& m, const std::vector<bool>& keep) {
    EndComponent sel;
    for (int s = 0; s < m.size(); ++s) {
        if (!keep[s]) continue;
        if (m.is_trap(s)) continue;
        for (int a = 0; a < static_cast<int>(m.actions[s].size()); ++a) {
            bool inside = true;
            for (const auto& tr : m.actions[s][a].succ)
                if (!keep[tr.target]) inside = false;
            if (inside) sel.pairs.push_back({s, a});
        }
    }
    // keep states whose actions were all dropped, as traps
    Restriction r;
    r.to_new.assign(m.size(), -1);
    for (int s = 0; s < m.size(); ++s) {
        if (!keep[s]) continue;
        r.to_new[s] = static_cast<int>(r.to_orig.size());
        r.to_orig.push_back(s);
        r.mdp.add_state(m.names[s]);
    }
    r.action_orig.resize(r.to_orig.size());
    for (const auto& [s, a] : sel.pairs) {
        const Action& act = m.actions[s][a];
        Action copy{act.name, act.weight, {}};
        for (const auto& tr : act.succ) copy.succ.push_back({r.to_new[tr.target], tr.prob});
        r.mdp.actions[r.to_new[s]].push_back(std::move(copy));
        r.action_orig[r.to_new[s]].push_back(a);
    }
    return r;
}

EndComponent all_pairs(const Mdp& m) {
    EndComponent ec;
    for (int s = 0; s < m.size(); ++s)
        for (int a = 0; a < static_cast<int>(m.actions[s].size()); ++a) ec.pairs.push_back({s, a});
    return ec;
}

Int path_weight(const Mdp& m, const FinitePath& p) {
    if (p.states.empty() || p.actions.size() + 1 != p.states.size())
        throw Error(ErrorKind::InvalidPath, "path shape");
    Int w = 0;
    for (std::size_t i = 0; i < p.actions.size(); ++i) {
        int s = p.states[i], a = p.actions[i];
        if (s < 0 || s >= m.size() || a < 0 || a >= static_cast<int>(m.actions[s].size()))
            throw Error(ErrorKind::InvalidPath, "step " + std::to_string(i) + " not enabled");
        if (m.prob(s, a, p.states[i + 1]) == 0)
            throw Error(ErrorKind::InvalidPath, "step " + std::to_string(i) + " has probability 0");
        w += m.actions[s][a].weight;
    }
    return w;
}

Mdp negate_weights(const Mdp& m) {
    Mdp n = m;
    for (auto& row : n.actions)
        for (auto& act : row) act.weight = -act.weight;
    return n;
}

std::vector<int> post(const Mdp& m, int s, int a) {
    std::vector<int> out;
    for (const auto& tr : m.actions[s][a].succ) out.push_back(tr.target);
    return out;
}

}  // namespace wmdp
