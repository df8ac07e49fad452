#include "fixtures.hpp"

#include "wmdp/graph.hpp"
#include "wmdp/io.hpp"

#include <algorithm>
#include <stdexcept>

namespace fx {

std::string path(const std::string& name) { return std::string(WMDP_FIXTURE_DIR) + "/" + name; }

wmdp::Mdp load(const std::string& name) { return wmdp::parse_model(path(name)); }

wmdp::Mdp mec_of(const wmdp::Mdp& m, const std::string& name) {
    int s = state(m, name);
    for (const auto& ec : wmdp::decompose_mecs(m))
        if (ec.contains_state(s)) return wmdp::restrict(m, ec).mdp;
    throw std::runtime_error("no MEC at " + name);
}

int state(const wmdp::Mdp& m, const std::string& name) {
    int s = m.find_state(name);
    if (s < 0) throw std::runtime_error("no state " + name);
    return s;
}

int action(const wmdp::Mdp& m, const std::string& s, const std::string& a) {
    int i = state(m, s);
    for (std::size_t k = 0; k < m.actions[i].size(); ++k)
        if (m.actions[i][k].name == a) return static_cast<int>(k);
    throw std::runtime_error("no action " + s + "." + a);
}

wmdp::Mdp random_mdp(Rng& rng, const RandomShape& shape, bool strongly_connected) {
    for (;;) {
        int n = rng.uniform(1, shape.max_states);
        wmdp::Mdp m;
        for (int s = 0; s < n; ++s) m.add_state("s" + std::to_string(s));
        for (int s = 0; s < n; ++s) {
            int k = rng.uniform(strongly_connected ? 1 : 0, shape.max_actions);
            for (int a = 0; a < k; ++a) {
                wmdp::Action act{"a" + std::to_string(a), rng.uniform(shape.wmin, shape.wmax), {}};
                int succ = rng.uniform(1, std::min(shape.max_succ, n));
                std::vector<int> targets;
                while (static_cast<int>(targets.size()) < succ) {
                    int t = rng.uniform(0, n - 1);
                    if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
                }
                // dyadic split: halves, or 1/4 + 3/4
                if (succ == 1) {
                    act.succ.push_back({targets[0], wmdp::Rat(1)});
                } else {
                    wmdp::Rat p = rng.coin() ? wmdp::Rat(1, 2) : wmdp::Rat(1, 4);
                    act.succ.push_back({targets[0], p});
                    act.succ.push_back({targets[1], wmdp::Rat(1) - p});
                }
                m.actions[s].push_back(std::move(act));
            }
        }
        m = wmdp::validate_mdp(std::move(m));
        if (!strongly_connected || wmdp::is_strongly_connected(m)) return m;
    }
}

}  // namespace fx
