#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "narmine/community.hpp"
#include "narmine/corpus.hpp"
#include "narmine/graph.hpp"
#include "narmine/lexicon.hpp"
#include "narmine/ordinal.hpp"
#include "narmine/rng.hpp"
#include "narmine/survival.hpp"

namespace narmine::synthgen {

// ---------------------------------------------------------------------------
// Statistical fixtures with planted parameters

// Discrete tail ~ power law (alpha, x_min); body on [1, x_min) follows a
// truncated power law with a shallower exponent, so the lower bound is a
// real change point for estimators to find.
struct PowerLawWithBody {
    double alpha = 2.5;
    std::int64_t x_min = 10;
    double tail_fraction = 0.35;  // 1.0 when x_min == 1
    double body_alpha = 1.3;
    std::int64_t cap = 0;  // optional upper clamp, 0 = none
};

std::vector<std::int64_t> sample_power_law_with_body(const PowerLawWithBody& law,
                                                     std::size_t n, rng::Rng rng);

struct PomParams {
    std::vector<double> intercepts;  // ascending, size K-1
    double slope = 0.0;

    int k() const { return static_cast<int>(intercepts.size()) + 1; }
};

// Draw a category from the cumulative-logit model at covariate x.
int draw_pom_category(const PomParams& pom, double x, rng::Rng& rng);

// (x, y) pairs: x from `x_law`, y from the planted model.
std::vector<ordinal::Observation> simulate_pom(const PomParams& pom,
                                               const PowerLawWithBody& x_law, std::size_t n,
                                               rng::Rng rng);

// Gaussian-copula counts with Poisson margins; Pearson correlations of the
// output approximate `latent_correlation` when the means are large.
Eigen::MatrixXd copula_counts(const Eigen::MatrixXd& latent_correlation,
                              const std::vector<double>& poisson_means, std::size_t n,
                              rng::Rng rng);

// Exponential lifetime cohort, fully observed.
survival::LifetimeSample lifetime_cohort(const std::string& group, double mean_seconds,
                                         std::size_t n, rng::Rng rng);

// ---------------------------------------------------------------------------
// Planted-partition graphs

struct PlantedPartitionSpec {
    std::vector<int> block_sizes;
    double p_in = 0.5;
    double p_out = 0.05;
    // Internal edge weights: power-law draws when weight_alpha > 1, otherwise
    // fixed at internal_weight. External edges always weigh external_weight.
    // The cap bounds draw variance so a lucky heavy pair cannot out-weigh its
    // block membership.
    double weight_alpha = 2.5;
    std::int64_t weight_x_min = 2;
    std::int64_t weight_cap = 12;
    double internal_weight = 1.0;
    double external_weight = 1.0;
    // When set, exactly this many external edges are placed on the first
    // cross-block pairs in lexicographic order (instead of p_out sampling).
    std::optional<std::int64_t> exact_external_edges;
};

struct PlantedGraph {
    graph::WeightedGraph graph;
    community::Partition reference;
};

PlantedGraph generate_planted_partition_graph(const PlantedPartitionSpec& spec,
                                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Corpus generator

struct TopicSpec {
    std::string name;
    int dict_terms = 0;        // dictionary size for this topic (incl. bigrams)
    int dict_bigrams = 0;      // of which two-token terms
    double label_share = 0.0;  // share of labeled posts
    double polarized_share = 0.0;  // share of the single-topic user cohort
    double user_lifetime_mean = 1e7;  // seconds, first-to-last comment span
};

struct CorpusSpec {
    std::uint64_t seed = 7;
    double scale = 1.0;  // bookkeeping only; sizes below are absolute

    std::vector<TopicSpec> topics;
    int filler_vocab = 400;

    std::int64_t n_posts = 2086;
    std::int64_t n_users = 8640;
    int n_pages = 39;
    std::string page_category = "conspiracy";

    double message_fraction = 0.9862;  // posts carrying a message
    double labeled_fraction = 0.2152;  // of message posts: strict plurality planted
    double tie_fraction = 0.008;       // of message posts: exact tie planted

    double commenter_fraction = 0.2622;
    // Dictionary terms are topped up to exceed this occurrence count.
    std::int64_t min_occurrence_target = 5;

    PowerLawWithBody user_likes_law{3.2, 5, 0.5, 1.1, 20000};
    PowerLawWithBody user_comments_law{2.7, 3, 0.55, 1.1, 20000};
    PowerLawWithBody post_shares_law{2.5, 40, 0.4, 1.2, 2000000};

    PomParams mobility{{-0.7602, 1.0783, 2.9648}, 0.1141};

    double comment_age_mean = 2e6;  // seconds between post creation and a comment

    std::int64_t window_start = 1262304000;  // 2010-01-01
    std::int64_t window_length = 126230400;  // four years
};

// Paper-magnitude preset scaled by `scale` (1/100 keeps tests fast).
CorpusSpec paper_shaped_spec(double scale, std::uint64_t seed);

struct GeneratorLedger {
    std::uint64_t seed = 0;
    double scale = 1.0;
    corpus::CorpusSummary totals;
    std::int64_t posts_with_message = 0;

    std::map<std::string, std::int64_t> label_counts;  // topic -> plurality posts
    std::int64_t tie_posts = 0;
    std::int64_t unlabeled_message_posts = 0;  // no dictionary terms at all

    std::map<std::string, std::string> post_label;  // planted label; "" = none
    std::set<std::string> tie_post_ids;

    std::map<std::string, std::string> user_polarization;  // "" = none
    std::map<std::string, int> user_topic_count;           // planted k
    std::map<std::string, std::int64_t> polarized_cohort;  // topic -> exact size

    std::map<std::string, double> user_lifetime_mean;  // topic -> planted mean

    PomParams mobility;
    PowerLawWithBody user_likes_law, user_comments_law, post_shares_law;
};

struct GeneratedCorpus {
    corpus::Corpus corpus;
    lexicon::TermDictionary dictionary;
    GeneratorLedger ledger;
};

GeneratedCorpus generate_corpus(const CorpusSpec& spec);

// corpus.jsonl + dictionary.csv + ledger.json
void write_outputs(const GeneratedCorpus& g, const std::string& dir);

void save_ledger(const GeneratorLedger& ledger, std::ostream& out);
GeneratorLedger load_ledger_file(const std::string& path);
void save_dictionary(const lexicon::TermDictionary& dict, std::ostream& out);

}  // namespace narmine::synthgen
