#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "narmine/graph.hpp"
#include "narmine/lexicon.hpp"

namespace narmine::netcore {

// Weighted term co-occurrence network. Edge weight = number of posts
// containing both terms (term presence, not occurrence count).
struct TermNetwork {
    std::vector<std::string> terms;
    std::vector<std::string> labels;  // optional topic per term; "" when unknown
    std::vector<graph::Edge> edges;   // a < b, integer-valued weights
    std::vector<std::string> warnings;

    graph::WeightedGraph to_graph() const;
    std::size_t n_nodes() const { return terms.size(); }
};

// alpha_ij seen from each endpoint of an undirected edge.
struct EdgeScore {
    double from_a = 1.0;
    double from_b = 1.0;

    double min() const { return from_a < from_b ? from_a : from_b; }
    double max() const { return from_a < from_b ? from_b : from_a; }
};

enum class RetentionRule {
    kEitherEndpoint,  // keep when min(alpha_ij, alpha_ji) < alpha
    kBothEndpoints,   // keep when max(alpha_ij, alpha_ji) < alpha
};

struct Backbone {
    TermNetwork network;  // full parent network
    std::vector<std::size_t> retained;  // indices into network.edges
    std::vector<EdgeScore> edge_scores;  // aligned with network.edges
    double alpha_level = 0.05;
    RetentionRule rule = RetentionRule::kEitherEndpoint;

    bool is_retained(std::size_t edge_index) const;
    TermNetwork retained_network() const;  // all nodes, retained edges only
};

// Off-diagonal of M M^T over the binarized incidence.
TermNetwork project_cooccurrence(const lexicon::DocTermMatrix& dtm);

// Null-model tail probability per directed edge: (1 - w/s_i)^(k_i - 1);
// degree-1 endpoints score 1 (a single edge is never significant on its own).
std::vector<EdgeScore> disparity_scores(const TermNetwork& net);

Backbone extract_backbone(const TermNetwork& net, double alpha,
                          RetentionRule rule = RetentionRule::kEitherEndpoint);

// CSV edge list: term_i,term_j,weight[,alpha_min,retained].
void save_network(const TermNetwork& net, std::ostream& out);
void save_network_file(const TermNetwork& net, const std::string& path);
void save_backbone(const Backbone& bb, std::ostream& out);
void save_backbone_file(const Backbone& bb, const std::string& path);
TermNetwork load_network(std::istream& in);
TermNetwork load_network_file(const std::string& path);

}  // namespace narmine::netcore
