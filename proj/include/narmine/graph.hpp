#pragma once

#include <string>
#include <vector>

namespace narmine::graph {

struct Edge {
    int a = 0;  // a < b
    int b = 0;
    double weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Simple undirected weighted graph; no self-loops, no parallel edges.
class WeightedGraph {
public:
    WeightedGraph() = default;
    WeightedGraph(std::vector<std::string> node_ids, std::vector<Edge> edges);

    int n_nodes() const { return static_cast<int>(node_ids_.size()); }
    std::size_t n_edges() const { return edges_.size(); }
    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // Sorted by neighbor index.
    const std::vector<std::pair<int, double>>& neighbors(int v) const {
        return adj_[static_cast<std::size_t>(v)];
    }
    double strength(int v) const { return strength_[static_cast<std::size_t>(v)]; }
    int degree(int v) const {
        return static_cast<int>(adj_[static_cast<std::size_t>(v)].size());
    }
    double total_weight() const { return total_weight_; }

private:
    std::vector<std::string> node_ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
    std::vector<double> strength_;
    double total_weight_ = 0.0;
};

}  // namespace narmine::graph
