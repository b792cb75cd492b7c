#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "narmine/graph.hpp"

namespace narmine::community {

struct Partition {
    std::vector<int> assignment;  // node -> community id, compacted to 0..k-1
    double modularity = 0.0;
    std::string algorithm;

    int n_communities() const;
};

// Agglomerative merge history. Level L = partition after L merges;
// level 0 is all singletons.
struct Dendrogram {
    int n_leaves = 0;
    std::vector<std::pair<int, int>> merges;  // community representatives merged
    std::vector<double> modularity_by_level;  // size merges.size() + 1

    std::vector<int> cut(std::size_t level) const;  // compacted assignment
    std::size_t best_level() const;  // max modularity; earliest level on ties
};

// Weighted Newman modularity of an assignment; 0 for edgeless graphs.
double modularity(const graph::WeightedGraph& g, const std::vector<int>& assignment);

// Community ids relabeled to 0..k-1 in order of first appearance.
std::vector<int> compact_labels(const std::vector<int>& assignment);

struct HierarchicalResult {
    Partition partition;  // best-modularity dendrogram cut
    Dendrogram dendrogram;
};

// Agglomeration over random-walk distances; deterministic tie-breaking,
// components merged independently.
HierarchicalResult walktrap(const graph::WeightedGraph& g, int walk_length = 4);

// Greedy local moves + graph aggregation, repeated until stable.
Partition multilevel(const graph::WeightedGraph& g);

// Greedy pairwise modularity-gain merges.
HierarchicalResult fastgreedy(const graph::WeightedGraph& g);

// Fraction of nodes whose community, under an optimal one-to-one matching of
// communities to reference classes, agrees with the reference.
double concordance(const Partition& detected, const Partition& reference);

// Reference partition from per-node labels (distinct labels sorted).
Partition partition_from_labels(const std::vector<std::string>& labels);

// CSV: term,community_id[,reference_label]
void save_partition(const std::vector<std::string>& node_ids, const Partition& p,
                    const std::vector<std::string>* reference_labels, std::ostream& out);
void save_partition_file(const std::vector<std::string>& node_ids, const Partition& p,
                         const std::vector<std::string>* reference_labels,
                         const std::string& path);

}  // namespace narmine::community
