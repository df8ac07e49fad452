#pragma once

#include "wmdp/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wmdp {

struct Edge {
    int to;
    Int weight;
};

enum class Aggregate { Max, Min };

struct Digraph {
    std::vector<std::vector<Edge>> adj;

    explicit Digraph(int n = 0) : adj(n) {}
    int size() const { return static_cast<int>(adj.size()); }
    // Parallel edges collapse into one carrying the max or min weight.
    void add_edge(int u, int v, const Int& w, Aggregate agg = Aggregate::Max);
};

// Edge s->t for every action of s with t in its support; keep[] limits both endpoints.
Digraph weight_graph(const Mdp& m, Aggregate agg, const std::vector<bool>* keep = nullptr);

// Tarjan SCCs over an adjacency list; comp[v] in [0, count).
struct SccResult {
    std::vector<int> comp;
    int count = 0;
};
SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj);

// allowed (optional) masks state-action pairs; MECs are sorted by smallest state.
std::vector<EndComponent> decompose_mecs(const Mdp& m,
                                         const std::vector<std::vector<bool>>* allowed = nullptr);

bool is_strongly_connected(const Mdp& m);

enum class Quant { Min, Max };
enum class Bound { AlmostSure, Positive };

std::vector<bool> qualitative_reach(const Mdp& m, const std::vector<bool>& targets, Quant q, Bound b);

// States reachable from s via edges of m (including s).
std::vector<bool> reachable_from(const Mdp& m, const std::vector<int>& sources);

struct PathWeight {
    enum class Kind { Unreachable, NegInf, Finite, PosInf };
    Kind kind = Kind::Unreachable;
    Int value = 0;

    bool finite() const { return kind == Kind::Finite; }
    std::string str() const;
    bool operator==(const PathWeight& o) const {
        return kind == o.kind && (kind != Kind::Finite || value == o.value);
    }
};

enum class Extremum { Max, Min };

PathWeight extremal_path_weight(const Digraph& g, int source, int target, Extremum mode);

// All targets at once from one source.
std::vector<PathWeight> extremal_path_weights(const Digraph& g, int source, Extremum mode);

enum class Sign { Positive, Negative };

// Vertex sequence v0 v1 .. vk with vk->v0 closing the cycle.
std::optional<std::vector<int>> detect_sign_cycle(const Digraph& g, Sign sign,
                                                  std::optional<int> from = std::nullopt);

}  // namespace wmdp
