#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "narmine/corpus.hpp"
#include "narmine/lexicon.hpp"

namespace narmine::attribution {

struct LabelingOptions {
    // Presence-weighted by default: each matched dictionary term counts once
    // per post. Occurrence-weighted counts every occurrence.
    bool occurrence_weighted = false;
};

// Majority-rule topic per post; "" marks unlabeled (no dictionary terms, tie,
// or empty message). Covers every post in the corpus.
std::map<std::string, std::string> label_posts(const corpus::Corpus& c,
                                               const lexicon::DocTermMatrix& dtm,
                                               const lexicon::TermDictionary& dict,
                                               const LabelingOptions& opts = {});

struct UserProfile {
    std::string user_id;
    std::map<std::string, std::int64_t> likes_per_topic;
    std::map<std::string, std::int64_t> comments_per_topic;
    std::int64_t total_likes = 0;     // includes likes on unlabeled posts
    std::int64_t total_comments = 0;
    std::string polarization;  // "" = none
    bool eligible = true;      // page-category prefilter outcome
    // first/last comment time per topic
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> comment_span;

    int distinct_topics_liked() const;
};

struct ClassifyOptions {
    double threshold = 0.95;  // polarized iff likes_on_topic / total_likes >= threshold
    // When set, only users with >= category_share of their likes on posts of
    // this page category are classified; others are marked ineligible.
    std::string require_category;
    double category_share = 0.95;
};

std::map<std::string, UserProfile> classify_users(
    const corpus::Corpus& c, const std::map<std::string, std::string>& post_labels,
    const ClassifyOptions& opts = {});

struct CorrelationOptions {
    bool restrict_to_polarized = false;  // default: users with >= 1 labeled-topic like
};

struct CorrelationMatrix {
    std::vector<std::string> topics;
    Eigen::MatrixXd values;  // NaN marks undefined (zero-variance) entries
    std::int64_t n_users = 0;
};

CorrelationMatrix topic_correlations(const std::map<std::string, UserProfile>& profiles,
                                     const std::vector<std::string>& topics,
                                     const CorrelationOptions& opts = {});

struct EngagementBucket {
    int topics_liked = 0;
    std::int64_t users = 0;
    double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;  // of total likes
};

// One bucket per number of distinct topics liked (1..n_topics), over users
// with total_likes >= min_total_likes.
std::vector<EngagementBucket> engagement_by_topic_count(
    const std::map<std::string, UserProfile>& profiles,
    const std::vector<std::string>& topics, std::int64_t min_total_likes = 4);

void save_post_labels(const std::map<std::string, std::string>& labels, std::ostream& out);
void save_user_profiles(const std::map<std::string, UserProfile>& profiles,
                        std::ostream& out);
void save_correlations(const CorrelationMatrix& m, std::ostream& out);
void save_engagement_buckets(const std::vector<EngagementBucket>& buckets,
                             std::ostream& out);

std::map<std::string, std::string> load_post_labels(std::istream& in);

}  // namespace narmine::attribution
