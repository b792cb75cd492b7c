#include "narmine/graph.hpp"

#include <algorithm>
#include <set>

#include "narmine/error.hpp"

namespace narmine::graph {

WeightedGraph::WeightedGraph(std::vector<std::string> node_ids, std::vector<Edge> edges)
    : node_ids_(std::move(node_ids)), edges_(std::move(edges)) {
    const int n = n_nodes();
    adj_.assign(static_cast<std::size_t>(n), {});
    strength_.assign(static_cast<std::size_t>(n), 0.0);
    std::set<std::pair<int, int>> seen;
    for (auto& e : edges_) {
        if (e.a > e.b) std::swap(e.a, e.b);
        if (e.a == e.b) throw Error("self-loop on node " + std::to_string(e.a));
        if (e.a < 0 || e.b >= n) throw Error("edge endpoint out of range");
        if (e.weight <= 0.0) throw Error("non-positive edge weight");
        if (!seen.emplace(e.a, e.b).second)
            throw Error("duplicate edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                        ")");
        adj_[static_cast<std::size_t>(e.a)].emplace_back(e.b, e.weight);
        adj_[static_cast<std::size_t>(e.b)].emplace_back(e.a, e.weight);
        strength_[static_cast<std::size_t>(e.a)] += e.weight;
        strength_[static_cast<std::size_t>(e.b)] += e.weight;
        total_weight_ += e.weight;
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

}  // namespace narmine::graph
