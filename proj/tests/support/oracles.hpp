#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "narmine/community.hpp"
#include "narmine/graph.hpp"
#include "narmine/lexicon.hpp"

namespace testsupport {

// Exhaustive modularity maximum over all set partitions (n <= 12 or so).
// Enumerates restricted growth strings.
inline double exhaustive_best_modularity(const narmine::graph::WeightedGraph& g,
                                         std::vector<int>* best_assignment = nullptr) {
    const int n = g.n_nodes();
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    double best = -1e18;
    std::vector<int> best_a;
    while (true) {
        double q = narmine::community::modularity(g, a);
        if (q > best) {
            best = q;
            best_a = a;
        }
        // next restricted growth string
        int i = n - 1;
        for (; i > 0; --i) {
            int max_prefix = 0;
            for (int j = 0; j < i; ++j) max_prefix = std::max(max_prefix, a[static_cast<std::size_t>(j)]);
            if (a[static_cast<std::size_t>(i)] <= max_prefix) {
                ++a[static_cast<std::size_t>(i)];
                for (int j = i + 1; j < n; ++j) a[static_cast<std::size_t>(j)] = 0;
                break;
            }
        }
        if (i == 0) break;
    }
    if (best_assignment) *best_assignment = best_a;
    return best;
}

// Independent per-post pairwise scan: number of posts containing both terms.
inline std::map<std::pair<int, int>, long long> pairwise_cooccurrence(
    const narmine::lexicon::DocTermMatrix& dtm) {
    std::vector<std::vector<int>> present(dtm.n_rows());
    for (int col = 0; col < dtm.counts.outerSize(); ++col)
        for (Eigen::SparseMatrix<std::int32_t>::InnerIterator it(dtm.counts, col); it; ++it)
            if (it.value() > 0) present[static_cast<std::size_t>(it.row())].push_back(col);
    std::map<std::pair<int, int>, long long> counts;
    for (auto& cols : present) {
        std::sort(cols.begin(), cols.end());
        for (std::size_t i = 0; i < cols.size(); ++i)
            for (std::size_t j = i + 1; j < cols.size(); ++j) ++counts[{cols[i], cols[j]}];
    }
    return counts;
}

// Plain logistic regression MLE (Newton), for the K=2 reduction check.
// Model: P(y = 1 | x) = sigmoid(a - b x), matching the cumulative link.
struct LogisticFit {
    double intercept = 0.0;
    double slope = 0.0;
};

inline LogisticFit logistic_mle(const std::vector<double>& x, const std::vector<int>& y1) {
    LogisticFit fit;
    for (int iter = 0; iter < 200; ++iter) {
        double g0 = 0.0, g1 = 0.0;
        double h00 = 0.0, h01 = 0.0, h11 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double eta = fit.intercept - fit.slope * x[i];
            double p = 1.0 / (1.0 + std::exp(-eta));
            double w = p * (1.0 - p);
            double r = (y1[i] ? 1.0 : 0.0) - p;
            g0 += r;
            g1 += -x[i] * r;
            h00 += w;
            h01 += -x[i] * w;
            h11 += x[i] * x[i] * w;
        }
        double det = h00 * h11 - h01 * h01;
        double d0 = (h11 * g0 - h01 * g1) / det;
        double d1 = (-h01 * g0 + h00 * g1) / det;
        fit.intercept += d0;
        fit.slope += d1;
        if (std::fabs(d0) + std::fabs(d1) < 1e-12) break;
    }
    return fit;
}

}  // namespace testsupport
