#include "narmine/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "narmine/csv.hpp"
#include "narmine/error.hpp"
#include "narmine/stats.hpp"

namespace narmine::attribution {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

int UserProfile::distinct_topics_liked() const {
    int k = 0;
    for (const auto& [topic, n] : likes_per_topic) {
        (void)topic;
        if (n > 0) ++k;
    }
    return k;
}

std::map<std::string, std::string> label_posts(const corpus::Corpus& c,
                                               const lexicon::DocTermMatrix& dtm,
                                               const lexicon::TermDictionary& dict,
                                               const LabelingOptions& opts) {
    // topic tallies per dtm row
    std::vector<std::map<std::string, std::int64_t>> tallies(dtm.n_rows());
    for (int col = 0; col < dtm.counts.outerSize(); ++col) {
        const auto* entry = dict.find(dtm.terms[static_cast<std::size_t>(col)]);
        if (!entry) continue;  // non-dictionary column: no topic evidence
        for (Eigen::SparseMatrix<std::int32_t>::InnerIterator it(dtm.counts, col); it; ++it) {
            if (it.value() <= 0) continue;
            std::int64_t w = opts.occurrence_weighted ? it.value() : 1;
            tallies[static_cast<std::size_t>(it.row())][entry->label] += w;
        }
    }

    std::map<std::string, std::string> labels;
    for (const auto& p : c.posts) labels[p.post_id] = "";
    for (std::size_t r = 0; r < dtm.n_rows(); ++r) {
        const auto& tally = tallies[r];
        if (tally.empty()) continue;
        std::int64_t best = 0, second = 0;
        std::string winner;
        for (const auto& [topic, n] : tally) {
            if (n > best) {
                second = best;
                best = n;
                winner = topic;
            } else if (n > second) {
                second = n;
            }
        }
        if (best > second) labels[dtm.post_ids[r]] = winner;  // ties stay unlabeled
    }
    return labels;
}

std::map<std::string, UserProfile> classify_users(
    const corpus::Corpus& c, const std::map<std::string, std::string>& post_labels,
    const ClassifyOptions& opts) {
    if (!(opts.threshold > 0.5 && opts.threshold <= 1.0))
        throw ConfigError("polarization threshold must lie in (0.5, 1]");

    std::map<std::string, UserProfile> profiles;
    std::map<std::string, std::int64_t> category_likes;  // per user, matching category

    for (const auto& p : c.posts) {
        auto it = post_labels.find(p.post_id);
        const std::string& label = it == post_labels.end() ? std::string() : it->second;
        bool category_match =
            !opts.require_category.empty() && p.page_category == opts.require_category;
        for (const auto& e : p.likes) {
            auto& prof = profiles[e.user];
            ++prof.total_likes;
            if (!label.empty()) ++prof.likes_per_topic[label];
            if (category_match) ++category_likes[e.user];
        }
        for (const auto& e : p.comments) {
            auto& prof = profiles[e.user];
            ++prof.total_comments;
            if (!label.empty()) {
                ++prof.comments_per_topic[label];
                auto [span_it, inserted] =
                    prof.comment_span.emplace(label, std::make_pair(e.t, e.t));
                if (!inserted) {
                    span_it->second.first = std::min(span_it->second.first, e.t);
                    span_it->second.second = std::max(span_it->second.second, e.t);
                }
            }
        }
    }

    for (auto& [user, prof] : profiles) {
        prof.user_id = user;
        if (!opts.require_category.empty()) {
            std::int64_t on_category = 0;
            if (auto it = category_likes.find(user); it != category_likes.end())
                on_category = it->second;
            prof.eligible =
                prof.total_likes > 0 &&
                static_cast<double>(on_category) >=
                    opts.category_share * static_cast<double>(prof.total_likes);
        }
        if (!prof.eligible || prof.total_likes == 0) continue;
        for (const auto& [topic, n] : prof.likes_per_topic) {
            if (static_cast<double>(n) >=
                opts.threshold * static_cast<double>(prof.total_likes)) {
                prof.polarization = topic;  // at most one topic can pass (threshold > 0.5)
                break;
            }
        }
    }
    return profiles;
}

CorrelationMatrix topic_correlations(const std::map<std::string, UserProfile>& profiles,
                                     const std::vector<std::string>& topics,
                                     const CorrelationOptions& opts) {
    const int k = static_cast<int>(topics.size());
    std::vector<const UserProfile*> included;
    for (const auto& [user, prof] : profiles) {
        (void)user;
        if (!prof.eligible) continue;
        if (opts.restrict_to_polarized) {
            if (!prof.polarization.empty()) included.push_back(&prof);
        } else if (prof.distinct_topics_liked() > 0) {
            included.push_back(&prof);
        }
    }
    if (included.size() < 2) throw Error("topic_correlations: fewer than 2 users in scope");

    Eigen::MatrixXd counts(static_cast<Eigen::Index>(included.size()), k);
    for (std::size_t u = 0; u < included.size(); ++u) {
        for (int t = 0; t < k; ++t) {
            std::int64_t n = 0;
            if (auto it = included[u]->likes_per_topic.find(topics[static_cast<std::size_t>(t)]);
                it != included[u]->likes_per_topic.end())
                n = it->second;
            counts(static_cast<Eigen::Index>(u), t) = static_cast<double>(n);
        }
    }

    CorrelationMatrix m;
    m.topics = topics;
    m.n_users = static_cast<std::int64_t>(included.size());
    m.values = Eigen::MatrixXd::Identity(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            double r = stats::pearson(counts.col(i), counts.col(j));
            m.values(i, j) = r;
            m.values(j, i) = r;
        }
    return m;
}

std::vector<EngagementBucket> engagement_by_topic_count(
    const std::map<std::string, UserProfile>& profiles,
    const std::vector<std::string>& topics, std::int64_t min_total_likes) {
    std::vector<std::vector<double>> likes_by_k(topics.size() + 1);
    for (const auto& [user, prof] : profiles) {
        (void)user;
        if (!prof.eligible || prof.total_likes < min_total_likes) continue;
        int k = prof.distinct_topics_liked();
        if (k < 1 || k > static_cast<int>(topics.size())) continue;
        likes_by_k[static_cast<std::size_t>(k)].push_back(
            static_cast<double>(prof.total_likes));
    }

    std::vector<EngagementBucket> buckets;
    for (std::size_t k = 1; k <= topics.size(); ++k) {
        EngagementBucket b;
        b.topics_liked = static_cast<int>(k);
        auto& v = likes_by_k[k];
        b.users = static_cast<std::int64_t>(v.size());
        if (!v.empty()) {
            std::sort(v.begin(), v.end());
            b.min = v.front();
            b.max = v.back();
            b.q25 = stats::quantile_sorted(v, 0.25);
            b.median = stats::quantile_sorted(v, 0.50);
            b.q75 = stats::quantile_sorted(v, 0.75);
        }
        buckets.push_back(b);
    }
    return buckets;
}

void save_post_labels(const std::map<std::string, std::string>& labels, std::ostream& out) {
    out << "post_id,label\n";
    for (const auto& [pid, label] : labels)
        out << csv::quote(pid) << ',' << csv::quote(label) << '\n';
}

void save_user_profiles(const std::map<std::string, UserProfile>& profiles,
                        std::ostream& out) {
    out << "user_id,polarized_topic,total_likes,total_comments\n";
    for (const auto& [user, prof] : profiles)
        out << csv::quote(user) << ',' << csv::quote(prof.polarization) << ','
            << prof.total_likes << ',' << prof.total_comments << '\n';
}

void save_correlations(const CorrelationMatrix& m, std::ostream& out) {
    out << "topic";
    for (const auto& t : m.topics) out << ',' << csv::quote(t);
    out << '\n';
    for (std::size_t i = 0; i < m.topics.size(); ++i) {
        out << csv::quote(m.topics[i]);
        for (std::size_t j = 0; j < m.topics.size(); ++j) {
            double v = m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            out << ',' << (std::isnan(v) ? "NA" : format_value(v));
        }
        out << '\n';
    }
}

void save_engagement_buckets(const std::vector<EngagementBucket>& buckets,
                             std::ostream& out) {
    out << "topics_liked,users,min,q25,median,q75,max\n";
    for (const auto& b : buckets)
        out << b.topics_liked << ',' << b.users << ',' << format_value(b.min) << ','
            << format_value(b.q25) << ',' << format_value(b.median) << ','
            << format_value(b.q75) << ',' << format_value(b.max) << '\n';
}

std::map<std::string, std::string> load_post_labels(std::istream& in) {
    auto table = csv::read(in);
    int pid = table.require_column("post_id");
    int label = table.require_column("label");
    std::map<std::string, std::string> out;
    for (const auto& row : table.rows)
        out[row[static_cast<std::size_t>(pid)]] = row[static_cast<std::size_t>(label)];
    return out;
}

}  // namespace narmine::attribution
