#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "narmine/community.hpp"
#include "narmine/error.hpp"
#include "narmine/graph.hpp"
#include "narmine/rng.hpp"
#include "narmine/synthgen.hpp"
#include "support/oracles.hpp"

using namespace narmine;

namespace {

graph::WeightedGraph make_graph(int n, const std::vector<graph::Edge>& edges) {
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
    return graph::WeightedGraph(std::move(ids), edges);
}

// two 5-cliques joined by one edge
graph::WeightedGraph two_cliques() {
    std::vector<graph::Edge> edges;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            edges.push_back({i, j, 1.0});
            edges.push_back({i + 5, j + 5, 1.0});
        }
    edges.push_back({4, 5, 1.0});
    return make_graph(10, edges);
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    community::Partition pa{a, 0.0, ""}, pb{b, 0.0, ""};
    return community::concordance(pa, pb) == doctest::Approx(1.0);
}

graph::WeightedGraph random_graph(int n, rng::Rng& r) {
    std::vector<graph::Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (r.uniform() < 0.45)
                edges.push_back({i, j, 1.0 + static_cast<double>(r.below(4))});
    return make_graph(n, edges);
}

}  // namespace

TEST_CASE("modularity of known partitions") {
    auto g = two_cliques();
    std::vector<int> split{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    std::vector<int> merged(10, 0);
    double q_split = community::modularity(g, split);
    double q_merged = community::modularity(g, merged);
    CHECK(q_split > q_merged);
    CHECK(q_merged == doctest::Approx(0.0));
    // hand value: 2 * (10/21 - (21/42)^2) = 20/21 - 1/2
    CHECK(q_split == doctest::Approx(20.0 / 21.0 - 0.5).epsilon(1e-12));
}

TEST_CASE("two cliques split by all three algorithms") {
    auto g = two_cliques();
    std::vector<int> expected{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};

    std::vector<int> oracle_best;
    double oracle_q = testsupport::exhaustive_best_modularity(g, &oracle_best);
    CHECK(same_partition(oracle_best, expected));

    auto wt = community::walktrap(g);
    CHECK(same_partition(wt.partition.assignment, expected));
    CHECK(wt.partition.modularity == doctest::Approx(oracle_q).epsilon(1e-12));

    auto ml = community::multilevel(g);
    CHECK(same_partition(ml.assignment, expected));
    CHECK(ml.modularity == doctest::Approx(oracle_q).epsilon(1e-12));

    auto fg = community::fastgreedy(g);
    CHECK(same_partition(fg.partition.assignment, expected));
    CHECK(fg.partition.modularity == doctest::Approx(oracle_q).epsilon(1e-12));
}

TEST_CASE("single clique and triangle collapse to one community") {
    std::vector<graph::Edge> edges;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) edges.push_back({i, j, 1.0});
    auto clique = make_graph(6, edges);
    CHECK(community::walktrap(clique).partition.n_communities() == 1);

    auto triangle = make_graph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
    CHECK(community::fastgreedy(triangle).partition.n_communities() == 1);
}

TEST_CASE("edgeless graph: singletons with zero modularity") {
    auto g = make_graph(4, {});
    auto p = community::multilevel(g);
    CHECK(p.n_communities() == 4);
    CHECK(p.modularity == doctest::Approx(0.0));
    CHECK(community::walktrap(g).partition.n_communities() == 4);
    CHECK(community::fastgreedy(g).partition.n_communities() == 4);
}

TEST_CASE("empty graph is an error for every algorithm") {
    auto g = make_graph(0, {});
    CHECK_THROWS_AS(community::walktrap(g), Error);
    CHECK_THROWS_AS(community::multilevel(g), Error);
    CHECK_THROWS_AS(community::fastgreedy(g), Error);
}

TEST_CASE("stored modularity matches recomputation") {
    rng::Rng r(31);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 5 + static_cast<int>(r.below(6));
        auto g = random_graph(n, r);
        if (g.n_edges() == 0) continue;
        auto wt = community::walktrap(g);
        CHECK(wt.partition.modularity ==
              doctest::Approx(community::modularity(g, wt.partition.assignment))
                  .epsilon(1e-12));
        auto ml = community::multilevel(g);
        CHECK(ml.modularity ==
              doctest::Approx(community::modularity(g, ml.assignment)).epsilon(1e-12));
        auto fg = community::fastgreedy(g);
        CHECK(fg.partition.modularity ==
              doctest::Approx(community::modularity(g, fg.partition.assignment))
                  .epsilon(1e-12));
    }
}

TEST_CASE("multilevel beats the all-singletons baseline") {
    rng::Rng r(77);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = random_graph(7, r);
        if (g.n_edges() == 0) continue;
        std::vector<int> singles(static_cast<std::size_t>(g.n_nodes()));
        std::iota(singles.begin(), singles.end(), 0);
        auto p = community::multilevel(g);
        CHECK(p.modularity >= community::modularity(g, singles) - 1e-12);
    }
}

TEST_CASE("dendrogram merges drop community count by one per step") {
    auto g = two_cliques();
    auto res = community::walktrap(g);
    const auto& d = res.dendrogram;
    REQUIRE(d.modularity_by_level.size() == d.merges.size() + 1);
    for (std::size_t level = 0; level + 1 < d.modularity_by_level.size(); ++level) {
        auto a = d.cut(level);
        auto b = d.cut(level + 1);
        int ka = *std::max_element(a.begin(), a.end()) + 1;
        int kb = *std::max_element(b.begin(), b.end()) + 1;
        CHECK(ka == kb + 1);
    }
}

TEST_CASE("planted 4-block backbone is recovered exactly") {
    synthgen::PlantedPartitionSpec spec;
    spec.block_sizes = {33, 31, 14, 81};  // 159 nodes
    spec.p_in = 0.6;
    spec.p_out = 0.06;
    auto planted = synthgen::generate_planted_partition_graph(spec, 4242);
    REQUIRE(planted.graph.n_nodes() == 159);

    auto wt = community::walktrap(planted.graph);
    CHECK(community::concordance(wt.partition, planted.reference) == doctest::Approx(1.0));
    auto ml = community::multilevel(planted.graph);
    CHECK(community::concordance(ml, planted.reference) == doctest::Approx(1.0));
}

TEST_CASE("fastgreedy coarsens a weak fixture that walktrap and multilevel resolve") {
    // Four planted blocks with modest separation; greedy merging is known to
    // swallow small blocks. The seed is frozen on a fixture where the best
    // fastgreedy cut merges two planted blocks while the other algorithms
    // recover all four.
    synthgen::PlantedPartitionSpec spec;
    spec.block_sizes = {12, 12, 12, 12};
    spec.p_in = 0.7;
    spec.p_out = 0.22;
    spec.weight_alpha = 0.0;  // uniform weights keep the fixture marginal
    spec.internal_weight = 1.0;

    bool found = false;
    for (std::uint64_t seed = 1; seed <= 40 && !found; ++seed) {
        auto planted = synthgen::generate_planted_partition_graph(spec, seed);
        auto fg = community::fastgreedy(planted.graph);
        if (fg.partition.n_communities() >= 4) continue;
        auto wt = community::walktrap(planted.graph);
        auto ml = community::multilevel(planted.graph);
        if (community::concordance(wt.partition, planted.reference) < 1.0) continue;
        if (community::concordance(ml, planted.reference) < 1.0) continue;
        // fastgreedy merged at least two planted blocks
        CHECK(community::concordance(fg.partition, planted.reference) < 1.0);
        found = true;
    }
    CHECK(found);
}

TEST_CASE("concordance basics") {
    community::Partition a{{0, 0, 1, 1}, 0.0, ""};
    community::Partition b{{1, 1, 0, 0}, 0.0, ""};  // same split, relabeled
    CHECK(community::concordance(a, b) == doctest::Approx(1.0));

    community::Partition all_one{{0, 0, 0, 0}, 0.0, ""};
    community::Partition four{{0, 1, 2, 3}, 0.0, ""};
    CHECK(community::concordance(all_one, four) == doctest::Approx(0.25));

    community::Partition c{{0, 0, 1, 2}, 0.0, ""};
    CHECK(community::concordance(a, c) == community::concordance(c, a));

    community::Partition short_one{{0, 0}, 0.0, ""};
    CHECK_THROWS_AS(community::concordance(a, short_one), Error);
}

TEST_CASE("algorithms are invariant under node permutation") {
    rng::Rng r(123);
    auto g = two_cliques();
    std::vector<int> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    r.shuffle(perm);

    std::vector<graph::Edge> permuted;
    for (const auto& e : g.edges())
        permuted.push_back({std::min(perm[static_cast<std::size_t>(e.a)],
                                     perm[static_cast<std::size_t>(e.b)]),
                            std::max(perm[static_cast<std::size_t>(e.a)],
                                     perm[static_cast<std::size_t>(e.b)]),
                            e.weight});
    auto g2 = make_graph(10, permuted);

    for (int algo = 0; algo < 3; ++algo) {
        community::Partition p1 = algo == 0   ? community::walktrap(g).partition
                                  : algo == 1 ? community::multilevel(g)
                                              : community::fastgreedy(g).partition;
        community::Partition p2 = algo == 0   ? community::walktrap(g2).partition
                                  : algo == 1 ? community::multilevel(g2)
                                              : community::fastgreedy(g2).partition;
        // map p2 back through the permutation, then compare up to relabeling
        community::Partition p2_back = p2;
        for (std::size_t i = 0; i < perm.size(); ++i)
            p2_back.assignment[i] = p2.assignment[static_cast<std::size_t>(perm[i])];
        CHECK(community::concordance(p1, p2_back) == doctest::Approx(1.0));
    }
}

TEST_CASE("disconnected components are handled independently") {
    // two triangles, no bridge
    auto g = make_graph(6, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}, {3, 5, 1}, {4, 5, 1}});
    auto wt = community::walktrap(g);
    CHECK(wt.partition.n_communities() == 2);
    auto ml = community::multilevel(g);
    CHECK(ml.n_communities() == 2);
}
