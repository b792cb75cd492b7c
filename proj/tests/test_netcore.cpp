#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "narmine/corpus.hpp"
#include "narmine/error.hpp"
#include "narmine/netcore.hpp"
#include "narmine/rng.hpp"
#include "narmine/synthgen.hpp"
#include "support/oracles.hpp"
#include "support/quadrature.hpp"

using namespace narmine;

namespace {

lexicon::DocTermMatrix dtm_from_posts(const std::vector<std::vector<std::string>>& posts) {
    std::vector<corpus::Post> records;
    for (std::size_t i = 0; i < posts.size(); ++i) {
        corpus::Post p;
        p.post_id = "p" + std::to_string(i);
        p.page_id = "pg";
        std::string msg;
        for (const auto& t : posts[i]) msg += t + " ";
        p.message = msg;
        records.push_back(std::move(p));
    }
    auto c = corpus::build(std::move(records));
    lexicon::DtmOptions opts;
    opts.min_occurrences = 0;
    return lexicon::build_dtm(c, opts);
}

netcore::TermNetwork network_from_edges(int n_nodes,
                                        const std::vector<graph::Edge>& edges) {
    netcore::TermNetwork net;
    for (int i = 0; i < n_nodes; ++i) net.terms.push_back("t" + std::to_string(i));
    net.labels.assign(net.terms.size(), "");
    net.edges = edges;
    return net;
}

double quadrature_alpha(double p, int k) {
    static testsupport::GaussLegendre gl(48);
    auto integrand = [k](double x) { return std::pow(1.0 - x, k - 2); };
    return 1.0 - (k - 1) * gl.integrate(integrand, 0.0, p);
}

}  // namespace

TEST_CASE("projection counts posts containing both terms") {
    auto dtm = dtm_from_posts({{"a", "b"}, {"a", "b", "c"}});
    auto net = netcore::project_cooccurrence(dtm);
    REQUIRE(net.edges.size() == 3);
    std::map<std::pair<std::string, std::string>, double> w;
    for (const auto& e : net.edges)
        w[{net.terms[static_cast<std::size_t>(e.a)],
           net.terms[static_cast<std::size_t>(e.b)]}] = e.weight;
    CHECK(w[{"a", "b"}] == 2);
    CHECK(w[{"a", "c"}] == 1);
    CHECK(w[{"b", "c"}] == 1);
}

TEST_CASE("single post with three terms gives a unit triangle") {
    auto dtm = dtm_from_posts({{"a", "b", "c"}});
    auto net = netcore::project_cooccurrence(dtm);
    REQUIRE(net.edges.size() == 3);
    for (const auto& e : net.edges) CHECK(e.weight == 1);
}

TEST_CASE("repeated terms in one post still count the pair once") {
    auto dtm = dtm_from_posts({{"a", "a", "b", "b", "b"}});
    auto net = netcore::project_cooccurrence(dtm);
    REQUIRE(net.edges.size() == 1);
    CHECK(net.edges[0].weight == 1);
}

TEST_CASE("single-column matrix projects to one node with a warning") {
    auto dtm = dtm_from_posts({{"only"}, {"only"}});
    auto net = netcore::project_cooccurrence(dtm);
    CHECK(net.terms.size() == 1);
    CHECK(net.edges.empty());
    CHECK_FALSE(net.warnings.empty());
}

TEST_CASE("projection total weight equals sum over posts of C(t_p, 2)") {
    auto spec = synthgen::paper_shaped_spec(0.002, 17);
    auto g = synthgen::generate_corpus(spec);
    lexicon::DtmOptions opts;
    opts.min_occurrences = 0;
    opts.phrases = &g.dictionary;
    auto dtm = lexicon::restrict_to_dictionary(lexicon::build_dtm(g.corpus, opts),
                                               g.dictionary);
    auto net = netcore::project_cooccurrence(dtm);

    // brute-force pair scan oracle
    auto oracle = testsupport::pairwise_cooccurrence(dtm);
    REQUIRE(net.edges.size() == oracle.size());
    for (const auto& e : net.edges) {
        auto it = oracle.find({e.a, e.b});
        REQUIRE(it != oracle.end());
        CHECK(e.weight == static_cast<double>(it->second));
    }

    double total = 0.0;
    for (const auto& e : net.edges) total += e.weight;
    double expected = 0.0;
    for (const auto& [pair, cnt] : oracle) {
        (void)pair;
        expected += static_cast<double>(cnt);
    }
    CHECK(total == expected);

    // planted dictionary appears in full
    CHECK(net.terms.size() == 159);
}

TEST_CASE("disparity scores match the closed form and quadrature") {
    // node 0 with degree 3, normalized weights 0.7 / 0.2 / 0.1
    auto net = network_from_edges(4, {{0, 1, 7}, {0, 2, 2}, {0, 3, 1}});
    auto scores = netcore::disparity_scores(net);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0].from_a == doctest::Approx(0.09).epsilon(1e-12));  // (1-0.7)^2
    CHECK(scores[1].from_a == doctest::Approx(0.64).epsilon(1e-12));
    CHECK(scores[2].from_a == doctest::Approx(0.81).epsilon(1e-12));
    // leaves have degree 1
    CHECK(scores[0].from_b == 1.0);

    CHECK(scores[0].from_a == doctest::Approx(quadrature_alpha(0.7, 3)).epsilon(1e-12));
    CHECK(scores[1].from_a == doctest::Approx(quadrature_alpha(0.2, 3)).epsilon(1e-12));
}

TEST_CASE("degree-2 node with equal weights scores one half each way") {
    auto net = network_from_edges(3, {{0, 1, 5}, {0, 2, 5}});
    auto scores = netcore::disparity_scores(net);
    CHECK(scores[0].from_a == doctest::Approx(0.5));
    CHECK(scores[1].from_a == doctest::Approx(0.5));
}

TEST_CASE("scores within a node strictly decrease in normalized weight") {
    auto net = network_from_edges(5, {{0, 1, 10}, {0, 2, 5}, {0, 3, 2}, {0, 4, 1}});
    auto scores = netcore::disparity_scores(net);
    for (std::size_t i = 1; i < scores.size(); ++i)
        CHECK(scores[i].from_a > scores[i - 1].from_a);
}

TEST_CASE("uniform star keeps nothing at alpha 0.05") {
    for (int k : {2, 5, 10, 40}) {
        std::vector<graph::Edge> edges;
        for (int leaf = 1; leaf <= k; ++leaf) edges.push_back({0, leaf, 3.0});
        auto net = network_from_edges(k + 1, edges);
        auto scores = netcore::disparity_scores(net);
        double expected = std::pow(1.0 - 1.0 / k, k - 1);
        for (const auto& s : scores) {
            CHECK(s.from_a == doctest::Approx(expected).epsilon(1e-12));
            CHECK(s.from_b == 1.0);
        }
        auto bb = netcore::extract_backbone(net, 0.05);
        CHECK(bb.retained.empty());
    }
}

TEST_CASE("alpha near one keeps every edge touching a degree>=2 node") {
    auto net = network_from_edges(4, {{0, 1, 9}, {0, 2, 1}, {1, 2, 4}, {2, 3, 2}});
    auto bb = netcore::extract_backbone(net, 0.999999);
    CHECK(bb.retained.size() == net.edges.size());
}

TEST_CASE("backbones are nested in alpha") {
    auto spec = synthgen::PlantedPartitionSpec{};
    spec.block_sizes = {20, 20, 20};
    spec.p_in = 0.6;
    spec.p_out = 0.1;
    auto planted = synthgen::generate_planted_partition_graph(spec, 99);
    netcore::TermNetwork net;
    net.terms = planted.graph.node_ids();
    net.labels.assign(net.terms.size(), "");
    net.edges = planted.graph.edges();

    std::vector<double> alphas{0.01, 0.05, 0.1, 0.5};
    std::vector<std::set<std::size_t>> retained_sets;
    for (double alpha : alphas) {
        auto bb = netcore::extract_backbone(net, alpha);
        retained_sets.emplace_back(bb.retained.begin(), bb.retained.end());
    }
    for (std::size_t i = 1; i < retained_sets.size(); ++i)
        for (std::size_t idx : retained_sets[i - 1]) CHECK(retained_sets[i].count(idx) == 1);

    // per-edge closed-form oracle at alpha = 0.05
    auto bb = netcore::extract_backbone(net, 0.05);
    std::vector<double> strength(net.terms.size(), 0.0);
    std::vector<int> degree(net.terms.size(), 0);
    for (const auto& e : net.edges) {
        strength[static_cast<std::size_t>(e.a)] += e.weight;
        strength[static_cast<std::size_t>(e.b)] += e.weight;
        ++degree[static_cast<std::size_t>(e.a)];
        ++degree[static_cast<std::size_t>(e.b)];
    }
    std::set<std::size_t> expected;
    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const auto& e = net.edges[i];
        auto side = [&](int from) {
            int k = degree[static_cast<std::size_t>(from)];
            if (k <= 1) return 1.0;
            return std::pow(1.0 - e.weight / strength[static_cast<std::size_t>(from)], k - 1);
        };
        if (std::min(side(e.a), side(e.b)) < 0.05) expected.insert(i);
    }
    CHECK(std::set<std::size_t>(bb.retained.begin(), bb.retained.end()) == expected);
}

TEST_CASE("both-endpoints mode is stricter") {
    auto net = network_from_edges(5, {{0, 1, 50}, {0, 2, 1}, {1, 2, 3}, {1, 3, 2}, {3, 4, 8}});
    auto loose = netcore::extract_backbone(net, 0.3, netcore::RetentionRule::kEitherEndpoint);
    auto strict = netcore::extract_backbone(net, 0.3, netcore::RetentionRule::kBothEndpoints);
    CHECK(strict.retained.size() <= loose.retained.size());
    for (std::size_t idx : strict.retained)
        CHECK(std::find(loose.retained.begin(), loose.retained.end(), idx) !=
              loose.retained.end());
}

TEST_CASE("backbone keeps locally dominant edges across weight decades") {
    // Hubs operating at different weight scales: each hub has one dominant
    // edge ten times heavier than its others. Retention is a local decision,
    // so the kept edges span the full range of scales.
    std::vector<graph::Edge> edges;
    int n_hubs = 8, leaves = 12;
    int n = n_hubs * (1 + leaves);
    for (int h = 0; h < n_hubs; ++h) {
        int hub = h * (1 + leaves);
        double base = std::pow(10.0, static_cast<double>(h % 4));
        for (int l = 1; l <= leaves; ++l)
            edges.push_back({hub, hub + l, l == 1 ? 10.0 * base : base});
    }
    auto net = network_from_edges(n, edges);
    auto bb = netcore::extract_backbone(net, 0.05);
    REQUIRE_FALSE(bb.retained.empty());
    double min_w = 1e18, max_w = 0;
    for (auto idx : bb.retained) {
        min_w = std::min(min_w, net.edges[idx].weight);
        max_w = std::max(max_w, net.edges[idx].weight);
    }
    CHECK(max_w / min_w >= 1000.0);  // retention across >= 3 decades
    CHECK(bb.retained_network().terms.size() == net.terms.size());  // nodes preserved
}

TEST_CASE("network csv round-trips") {
    auto net = network_from_edges(3, {{0, 1, 4}, {1, 2, 2}});
    std::ostringstream out;
    netcore::save_network(net, out);
    std::istringstream in(out.str());
    auto loaded = netcore::load_network(in);
    REQUIRE(loaded.edges.size() == 2);
    CHECK(loaded.terms.size() == 3);
    CHECK(loaded.edges[0].weight == 4);

    auto bb = netcore::extract_backbone(net, 0.9);
    std::ostringstream out2;
    netcore::save_backbone(bb, out2);
    std::istringstream in2(out2.str());
    auto reloaded = netcore::load_network(in2);
    CHECK(reloaded.edges.size() == bb.retained.size());
}

TEST_CASE("invalid alpha is rejected") {
    auto net = network_from_edges(2, {{0, 1, 1}});
    CHECK_THROWS_AS(netcore::extract_backbone(net, 0.0), ConfigError);
    CHECK_THROWS_AS(netcore::extract_backbone(net, 1.0), ConfigError);
}
