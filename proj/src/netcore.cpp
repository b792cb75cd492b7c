#include "narmine/netcore.hpp"

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "narmine/csv.hpp"
#include "narmine/error.hpp"

namespace narmine::netcore {

graph::WeightedGraph TermNetwork::to_graph() const {
    return graph::WeightedGraph(terms, edges);
}

bool Backbone::is_retained(std::size_t edge_index) const {
    return std::binary_search(retained.begin(), retained.end(), edge_index);
}

TermNetwork Backbone::retained_network() const {
    TermNetwork out;
    out.terms = network.terms;
    out.labels = network.labels;
    out.edges.reserve(retained.size());
    for (std::size_t idx : retained) out.edges.push_back(network.edges[idx]);
    return out;
}

TermNetwork project_cooccurrence(const lexicon::DocTermMatrix& dtm) {
    if (dtm.n_cols() == 0) throw Error("cannot project an empty document-term matrix");

    TermNetwork net;
    net.terms = dtm.terms;
    net.labels.assign(dtm.terms.size(), "");

    // Binary incidence: a post counts a term pair once.
    Eigen::SparseMatrix<double> m(dtm.counts.rows(), dtm.counts.cols());
    {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(dtm.counts.nonZeros()));
        for (int k = 0; k < dtm.counts.outerSize(); ++k)
            for (Eigen::SparseMatrix<std::int32_t>::InnerIterator it(dtm.counts, k); it; ++it)
                if (it.value() > 0)
                    trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                       1.0);
        m.setFromTriplets(trips.begin(), trips.end());
    }

    Eigen::SparseMatrix<double> cooc = Eigen::SparseMatrix<double>(m.transpose()) * m;
    for (int k = 0; k < cooc.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(cooc, k); it; ++it) {
            int i = static_cast<int>(it.row());
            int j = static_cast<int>(it.col());
            if (i < j) net.edges.push_back({i, j, it.value()});
        }
    }
    std::sort(net.edges.begin(), net.edges.end(), [](const auto& x, const auto& y) {
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    if (net.terms.size() == 1)
        net.warnings.push_back("single-term matrix: network has 1 node and no edges");
    return net;
}

std::vector<EdgeScore> disparity_scores(const TermNetwork& net) {
    const int n = static_cast<int>(net.terms.size());
    std::vector<double> strength(static_cast<std::size_t>(n), 0.0);
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    for (const auto& e : net.edges) {
        strength[static_cast<std::size_t>(e.a)] += e.weight;
        strength[static_cast<std::size_t>(e.b)] += e.weight;
        ++degree[static_cast<std::size_t>(e.a)];
        ++degree[static_cast<std::size_t>(e.b)];
    }

    auto directed_alpha = [&](int from, double w) {
        int k = degree[static_cast<std::size_t>(from)];
        if (k <= 1) return 1.0;
        double p = w / strength[static_cast<std::size_t>(from)];
        return std::pow(1.0 - p, static_cast<double>(k - 1));
    };

    std::vector<EdgeScore> scores(net.edges.size());
    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const auto& e = net.edges[i];
        scores[i].from_a = directed_alpha(e.a, e.weight);
        scores[i].from_b = directed_alpha(e.b, e.weight);
    }
    return scores;
}

Backbone extract_backbone(const TermNetwork& net, double alpha, RetentionRule rule) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    Backbone bb;
    bb.network = net;
    bb.alpha_level = alpha;
    bb.rule = rule;
    bb.edge_scores = disparity_scores(net);
    for (std::size_t i = 0; i < bb.edge_scores.size(); ++i) {
        double score = rule == RetentionRule::kEitherEndpoint ? bb.edge_scores[i].min()
                                                              : bb.edge_scores[i].max();
        if (score < alpha) bb.retained.push_back(i);
    }
    return bb;
}

namespace {

void write_edges(const TermNetwork& net, const std::vector<EdgeScore>* scores,
                 const std::vector<bool>* retained, std::ostream& out) {
    out << "term_i,term_j,weight";
    if (scores) out << ",alpha_min,retained";
    out << '\n';
    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const auto& e = net.edges[i];
        out << csv::quote(net.terms[static_cast<std::size_t>(e.a)]) << ','
            << csv::quote(net.terms[static_cast<std::size_t>(e.b)]) << ','
            << static_cast<long long>(e.weight);
        if (scores) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.12g", (*scores)[i].min());
            out << ',' << buf << ',' << ((*retained)[i] ? 1 : 0);
        }
        out << '\n';
    }
}

}  // namespace

void save_network(const TermNetwork& net, std::ostream& out) {
    write_edges(net, nullptr, nullptr, out);
}

void save_network_file(const TermNetwork& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write network file: " + path);
    save_network(net, out);
}

void save_backbone(const Backbone& bb, std::ostream& out) {
    std::vector<bool> retained(bb.network.edges.size(), false);
    for (std::size_t idx : bb.retained) retained[idx] = true;
    write_edges(bb.network, &bb.edge_scores, &retained, out);
}

void save_backbone_file(const Backbone& bb, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write backbone file: " + path);
    save_backbone(bb, out);
}

TermNetwork load_network(std::istream& in) {
    auto table = csv::read(in);
    int ti = table.require_column("term_i");
    int tj = table.require_column("term_j");
    int wc = table.require_column("weight");
    int retained_col = table.column("retained");

    TermNetwork net;
    std::map<std::string, int> index;
    auto node = [&](const std::string& term) {
        auto [it, inserted] = index.emplace(term, static_cast<int>(net.terms.size()));
        if (inserted) net.terms.push_back(term);
        return it->second;
    };
    for (const auto& row : table.rows) {
        // Backbone files keep only retained edges on reload.
        if (retained_col >= 0 && row[static_cast<std::size_t>(retained_col)] == "0") continue;
        int a = node(row[static_cast<std::size_t>(ti)]);
        int b = node(row[static_cast<std::size_t>(tj)]);
        double w;
        try {
            w = std::stod(row[static_cast<std::size_t>(wc)]);
        } catch (const std::exception&) {
            throw ParseError("bad weight in network file");
        }
        if (a > b) std::swap(a, b);
        net.edges.push_back({a, b, w});
    }
    net.labels.assign(net.terms.size(), "");
    std::sort(net.edges.begin(), net.edges.end(), [](const auto& x, const auto& y) {
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return net;
}

TermNetwork load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open network file: " + path);
    return load_network(in);
}

}  // namespace narmine::netcore
