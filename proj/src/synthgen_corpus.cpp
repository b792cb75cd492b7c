#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "narmine/error.hpp"
#include "narmine/stats.hpp"
#include "narmine/synthgen.hpp"
#include "narmine/tailfit.hpp"

namespace narmine::synthgen {

namespace {

using nlohmann::json;

std::string padded(const char* prefix, std::int64_t i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*lld", prefix, width, static_cast<long long>(i));
    return buf;
}

// Largest-remainder apportionment of `total` into shares.
std::vector<std::int64_t> apportion(const std::vector<double>& shares, std::int64_t total) {
    double sum = std::accumulate(shares.begin(), shares.end(), 0.0);
    std::vector<std::int64_t> out(shares.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        double exact = static_cast<double>(total) * shares[i] / sum;
        out[i] = static_cast<std::int64_t>(std::floor(exact));
        assigned += out[i];
        remainders.emplace_back(-(exact - std::floor(exact)), i);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::int64_t r = 0; r < total - assigned; ++r)
        ++out[remainders[static_cast<std::size_t>(r)].second];
    return out;
}

void validate_spec(const CorpusSpec& spec) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("invalid corpus spec: field '" + field + "' " + why);
    };
    if (spec.topics.empty()) fail("topics", "must be non-empty");
    double label_sum = 0.0, cohort_sum = 0.0;
    for (const auto& t : spec.topics) {
        if (t.name.empty()) fail("topics.name", "must be non-empty");
        if (t.dict_terms <= 0) fail("topics.dict_terms", "must be positive");
        if (t.dict_bigrams < 0 || t.dict_bigrams > t.dict_terms)
            fail("topics.dict_bigrams", "must lie in [0, dict_terms]");
        if (t.label_share <= 0.0) fail("topics.label_share", "must be positive");
        if (t.polarized_share <= 0.0) fail("topics.polarized_share", "must be positive");
        if (t.user_lifetime_mean <= 0.0) fail("topics.user_lifetime_mean", "must be positive");
        label_sum += t.label_share;
        cohort_sum += t.polarized_share;
    }
    // Published share tables round to two decimals; allow that slack.
    if (std::fabs(label_sum - 1.0) > 1e-3) fail("topics.label_share", "must sum to 1");
    if (std::fabs(cohort_sum - 1.0) > 1e-3) fail("topics.polarized_share", "must sum to 1");
    if (spec.filler_vocab < 1) fail("filler_vocab", "must be positive");
    if (spec.n_posts < static_cast<std::int64_t>(spec.topics.size()) + 5)
        fail("n_posts", "must exceed topic count + 5");
    if (spec.n_users < 1) fail("n_users", "must be positive");
    if (spec.n_pages < 1) fail("n_pages", "must be positive");
    if (spec.message_fraction <= 0.0 || spec.message_fraction > 1.0)
        fail("message_fraction", "must lie in (0, 1]");
    if (spec.labeled_fraction < 0.0 || spec.tie_fraction < 0.0 ||
        spec.labeled_fraction + spec.tie_fraction > 1.0)
        fail("labeled_fraction", "labeled + tie fractions must lie in [0, 1]");
    if (spec.commenter_fraction < 0.0 || spec.commenter_fraction > 1.0)
        fail("commenter_fraction", "must lie in [0, 1]");
    if (spec.mobility.intercepts.empty()) fail("mobility.intercepts", "must be non-empty");
    for (std::size_t j = 1; j < spec.mobility.intercepts.size(); ++j)
        if (!(spec.mobility.intercepts[j] > spec.mobility.intercepts[j - 1]))
            fail("mobility.intercepts", "must be strictly ascending");
    if (spec.mobility.k() != static_cast<int>(spec.topics.size()))
        fail("mobility.intercepts", "must define topic-count categories");
    if (spec.user_likes_law.alpha <= 1.0) fail("user_likes_law.alpha", "must exceed 1");
    if (spec.user_comments_law.alpha <= 1.0) fail("user_comments_law.alpha", "must exceed 1");
    if (spec.post_shares_law.alpha <= 1.0) fail("post_shares_law.alpha", "must exceed 1");
    if (spec.window_length <= 0) fail("window_length", "must be positive");
    if (spec.comment_age_mean <= 0.0) fail("comment_age_mean", "must be positive");
}

struct TermUnit {
    std::string term;  // canonical dictionary term (tokens joined by ' ')
    std::string unit;  // text inserted into messages (same as term)
};

struct GenPost {
    std::string id;
    std::string page;
    std::int64_t created = 0;
    std::vector<std::string> units;  // message building blocks
    std::string label;               // planted plurality topic, "" otherwise
    bool tie = false;
    bool has_message = true;
    std::int64_t shares = 0;
    double weight = 1.0;  // popularity for event targeting
    std::vector<corpus::Event> like_events;
    std::vector<corpus::Event> comment_events;
};

// Posts of one scope (topic or unlabeled), sorted by creation time, with
// prefix popularity sums for weighted eligible-prefix draws.
struct ScopedPosts {
    std::vector<std::size_t> post_idx;
    std::vector<std::int64_t> times;
    std::vector<double> weight_prefix;

    void build(const std::vector<GenPost>& posts, std::vector<std::size_t> members) {
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            if (posts[a].created != posts[b].created) return posts[a].created < posts[b].created;
            return a < b;
        });
        post_idx = std::move(members);
        times.reserve(post_idx.size());
        weight_prefix.reserve(post_idx.size());
        double acc = 0.0;
        for (std::size_t idx : post_idx) {
            times.push_back(posts[idx].created);
            acc += posts[idx].weight;
            weight_prefix.push_back(acc);
        }
    }

    bool empty() const { return post_idx.empty(); }

    // Weighted draw among posts created at or before `t`.
    std::size_t draw_eligible(std::int64_t t, rng::Rng& rng) const {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t count = static_cast<std::size_t>(it - times.begin());
        if (count == 0) count = 1;  // scope sentinel post sits at window start
        double total = weight_prefix[count - 1];
        double u = rng.uniform() * total;
        auto pos = std::lower_bound(weight_prefix.begin(), weight_prefix.begin() +
                                                               static_cast<std::ptrdiff_t>(count),
                                    u);
        return post_idx[static_cast<std::size_t>(pos - weight_prefix.begin())];
    }

    std::size_t draw_any(rng::Rng& rng) const {
        double u = rng.uniform() * weight_prefix.back();
        auto pos = std::lower_bound(weight_prefix.begin(), weight_prefix.end(), u);
        return post_idx[static_cast<std::size_t>(pos - weight_prefix.begin())];
    }
};

// Selects `want` distinct terms of one topic with Zipf-like popularity, so
// co-occurrence weights come out heterogeneous, and bumps usage counters.
std::vector<std::size_t> pick_terms(std::vector<std::int64_t>& usage, std::size_t want,
                                    std::vector<std::int64_t>& occurrences, rng::Rng& rng) {
    want = std::min(want, usage.size());
    std::vector<double> weights(usage.size());
    std::vector<std::size_t> index(usage.size());
    for (std::size_t r = 0; r < usage.size(); ++r) {
        weights[r] = 1.0 / static_cast<double>(r + 2);
        index[r] = r;
    }
    std::vector<std::size_t> chosen;
    occurrences.clear();
    for (std::size_t pick = 0; pick < want; ++pick) {
        std::size_t j = rng.categorical(weights);
        chosen.push_back(index[j]);
        weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(j));
        index.erase(index.begin() + static_cast<std::ptrdiff_t>(j));
    }
    for (std::size_t c : chosen) {
        std::int64_t occ = 1 + static_cast<std::int64_t>(rng.below(2));
        usage[c] += occ;
        occurrences.push_back(occ);
    }
    return chosen;
}

}  // namespace

CorpusSpec paper_shaped_spec(double scale, std::uint64_t seed) {
    if (scale <= 0.0) throw ConfigError("invalid corpus spec: field 'scale' must be positive");
    CorpusSpec spec;
    spec.seed = seed;
    spec.scale = scale;
    spec.topics = {
        {"environment", 33, 3, 9137.0 / 44259.0, 0.1839, 1.2e7},
        {"health", 31, 3, 8668.0 / 44259.0, 0.1273, 8.0e6},
        {"diet", 14, 2, 3762.0 / 44259.0, 0.0594, 3.0e6},
        {"geopolitics", 81, 8, 22692.0 / 44259.0, 0.6295, 3.0e7},
    };
    spec.n_posts = std::max<std::int64_t>(60, std::llround(208591.0 * scale));
    spec.n_users = std::max<std::int64_t>(200, std::llround(864047.0 * scale));
    spec.n_pages = 39;
    spec.min_occurrence_target = std::max<std::int64_t>(2, std::llround(500.0 * scale));
    return spec;
}

GeneratedCorpus generate_corpus(const CorpusSpec& spec) {
    validate_spec(spec);
    const int n_topics = static_cast<int>(spec.topics.size());
    rng::Rng root(spec.seed);

    GeneratedCorpus out;
    GeneratorLedger& ledger = out.ledger;
    ledger.seed = spec.seed;
    ledger.scale = spec.scale;
    ledger.mobility = spec.mobility;
    ledger.user_likes_law = spec.user_likes_law;
    ledger.user_comments_law = spec.user_comments_law;
    ledger.post_shares_law = spec.post_shares_law;
    for (const auto& t : spec.topics) ledger.user_lifetime_mean[t.name] = t.user_lifetime_mean;

    // ---- dictionary -------------------------------------------------------
    std::vector<std::vector<TermUnit>> topic_terms(static_cast<std::size_t>(n_topics));
    for (int t = 0; t < n_topics; ++t) {
        const auto& topic = spec.topics[static_cast<std::size_t>(t)];
        int singles = topic.dict_terms - topic.dict_bigrams;
        for (int i = 0; i < singles; ++i) {
            std::string term = topic.name + padded("x", i, 2);
            topic_terms[static_cast<std::size_t>(t)].push_back({term, term});
        }
        for (int i = 0; i < topic.dict_bigrams; ++i) {
            std::string a = topic.name + padded("b", i, 2) + "a";
            std::string b = topic.name + padded("b", i, 2) + "b";
            std::string term = a + " " + b;
            topic_terms[static_cast<std::size_t>(t)].push_back({term, term});
        }
        for (const auto& unit : topic_terms[static_cast<std::size_t>(t)]) {
            lexicon::TermDictionary::Entry e;
            e.term = unit.term;
            e.label = topic.name;
            e.confidence = 0.95;
            std::size_t pos = 0, next;
            while ((next = unit.term.find(' ', pos)) != std::string::npos) {
                e.tokens.push_back(unit.term.substr(pos, next - pos));
                pos = next + 1;
            }
            e.tokens.push_back(unit.term.substr(pos));
            out.dictionary.entries.push_back(std::move(e));
        }
        out.dictionary.label_set.push_back(topic.name);
    }
    std::sort(out.dictionary.entries.begin(), out.dictionary.entries.end(),
              [](const auto& a, const auto& b) { return a.term < b.term; });
    std::sort(out.dictionary.label_set.begin(), out.dictionary.label_set.end());

    // ---- posts -------------------------------------------------------------
    const std::int64_t window_end = spec.window_start + spec.window_length;
    std::vector<GenPost> posts(static_cast<std::size_t>(spec.n_posts));
    std::vector<std::vector<std::int64_t>> usage(static_cast<std::size_t>(n_topics));
    for (int t = 0; t < n_topics; ++t)
        usage[static_cast<std::size_t>(t)].assign(topic_terms[static_cast<std::size_t>(t)].size(),
                                                  0);

    std::vector<double> label_shares;
    for (const auto& t : spec.topics) label_shares.push_back(t.label_share);

    tailfit::PowerLawSampler shares_tail(spec.post_shares_law.alpha,
                                         spec.post_shares_law.x_min);
    rng::Rng shares_rng = root.stream("post.shares");
    auto draw_shares = [&]() {
        auto v = sample_power_law_with_body(spec.post_shares_law, 1,
                                            shares_rng.stream(shares_rng.next_u64()));
        return v[0];
    };

    std::vector<std::vector<std::size_t>> plurality_posts(static_cast<std::size_t>(n_topics));
    std::vector<std::int64_t> occ_buf;

    for (std::int64_t i = 0; i < spec.n_posts; ++i) {
        GenPost& p = posts[static_cast<std::size_t>(i)];
        rng::Rng prng = root.stream("post").stream(static_cast<std::uint64_t>(i));
        p.id = padded("p", i, 7);
        p.page = padded("pg", static_cast<std::int64_t>(prng.below(
                                  static_cast<std::uint64_t>(spec.n_pages))),
                        2);
        p.shares = draw_shares();
        p.weight = std::pow(prng.uniform(), -0.8);

        bool pinned_topic = i < n_topics;
        bool pinned_unlabeled = i == n_topics;
        p.created = (pinned_topic || pinned_unlabeled)
                        ? spec.window_start
                        : spec.window_start +
                              static_cast<std::int64_t>(prng.below(static_cast<std::uint64_t>(
                                  spec.window_length)));

        p.has_message = pinned_topic || pinned_unlabeled ||
                        prng.uniform() < spec.message_fraction;
        if (!p.has_message) continue;

        double decide = prng.uniform();
        int topic = -1;
        bool tie = false;
        if (pinned_topic)
            topic = static_cast<int>(i);
        else if (pinned_unlabeled)
            topic = -1;
        else if (decide < spec.labeled_fraction)
            topic = static_cast<int>(prng.categorical(label_shares));
        else if (decide < spec.labeled_fraction + spec.tie_fraction)
            tie = true;

        if (topic >= 0) {
            // Strict plurality: the winner has more distinct terms than any
            // other topic. Cross-topic terms stay rare so in-topic
            // co-occurrence dominates the projected network.
            std::size_t d_win = 2 + prng.below(5);
            auto chosen = pick_terms(usage[static_cast<std::size_t>(topic)], d_win, occ_buf,
                                     prng);
            for (std::size_t c = 0; c < chosen.size(); ++c)
                for (std::int64_t r = 0; r < occ_buf[c]; ++r)
                    p.units.push_back(
                        topic_terms[static_cast<std::size_t>(topic)][chosen[c]].unit);
            d_win = chosen.size();
            if (d_win > 1 && prng.uniform() < 0.3) {
                int o = static_cast<int>(prng.below(static_cast<std::uint64_t>(n_topics)));
                if (o != topic) {
                    auto other = pick_terms(usage[static_cast<std::size_t>(o)], 1, occ_buf,
                                            prng);
                    for (std::size_t c = 0; c < other.size(); ++c)
                        for (std::int64_t r = 0; r < occ_buf[c]; ++r)
                            p.units.push_back(
                                topic_terms[static_cast<std::size_t>(o)][other[c]].unit);
                }
            }
            p.label = spec.topics[static_cast<std::size_t>(topic)].name;
            plurality_posts[static_cast<std::size_t>(topic)].push_back(
                static_cast<std::size_t>(i));
            ++ledger.label_counts[p.label];
        } else if (tie) {
            int t1 = static_cast<int>(prng.categorical(label_shares));
            int t2 = t1;
            while (t2 == t1) t2 = static_cast<int>(prng.categorical(label_shares));
            std::size_t d = 2 + prng.below(2);
            for (int t : {t1, t2}) {
                auto chosen = pick_terms(usage[static_cast<std::size_t>(t)], d, occ_buf, prng);
                if (chosen.size() != d) {  // small dictionaries: fall back to equal size
                    d = chosen.size();
                }
                for (std::size_t c = 0; c < chosen.size(); ++c)
                    for (std::int64_t r = 0; r < occ_buf[c]; ++r)
                        p.units.push_back(topic_terms[static_cast<std::size_t>(t)][chosen[c]].unit);
            }
            p.tie = true;
            ++ledger.tie_posts;
        } else {
            ++ledger.unlabeled_message_posts;
        }

        std::size_t fillers = 3 + prng.below(6);
        for (std::size_t f = 0; f < fillers; ++f)
            p.units.push_back(padded("filler", static_cast<std::int64_t>(prng.below(
                                                   static_cast<std::uint64_t>(spec.filler_vocab))),
                                     3));
        prng.shuffle(p.units);
    }

    // Tie posts need both sides to have equal distinct counts; regenerate the
    // equality check cheaply: pick_terms may return fewer for tiny topics, in
    // which case the loop above already equalized d. Nothing to do here.

    // ---- occurrence top-up so every dictionary term clears the DTM filter --
    for (int t = 0; t < n_topics; ++t) {
        auto& topic_usage = usage[static_cast<std::size_t>(t)];
        const auto& pool = plurality_posts[static_cast<std::size_t>(t)];
        rng::Rng brng = root.stream("booster").stream(static_cast<std::uint64_t>(t));
        for (std::size_t term = 0; term < topic_usage.size(); ++term) {
            std::int64_t deficit = spec.min_occurrence_target + 1 - topic_usage[term];
            for (std::int64_t r = 0; r < deficit; ++r) {
                std::size_t target = pool[brng.below(pool.size())];
                posts[target].units.push_back(
                    topic_terms[static_cast<std::size_t>(t)][term].unit);
                ++topic_usage[term];
            }
        }
    }

    // ---- scoped post tables -------------------------------------------------
    std::vector<ScopedPosts> by_topic(static_cast<std::size_t>(n_topics));
    ScopedPosts unlabeled;
    {
        std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_topics));
        std::vector<std::size_t> unl;
        for (std::size_t i = 0; i < posts.size(); ++i) {
            if (!posts[i].label.empty()) {
                for (int t = 0; t < n_topics; ++t)
                    if (spec.topics[static_cast<std::size_t>(t)].name == posts[i].label)
                        members[static_cast<std::size_t>(t)].push_back(i);
            } else {
                unl.push_back(i);
            }
        }
        for (int t = 0; t < n_topics; ++t)
            by_topic[static_cast<std::size_t>(t)].build(posts,
                                                        members[static_cast<std::size_t>(t)]);
        unlabeled.build(posts, unl);
    }

    // ---- users: plan -------------------------------------------------------
    struct UserPlan {
        std::int64_t likes = 0;
        int k = 1;
        std::vector<int> topics;  // size k; filled later for k == 1
        bool commenter = false;
        std::int64_t comments = 0;
    };
    std::vector<UserPlan> plans(static_cast<std::size_t>(spec.n_users));
    std::vector<std::size_t> single_topic_users;

    for (std::int64_t i = 0; i < spec.n_users; ++i) {
        UserPlan& plan = plans[static_cast<std::size_t>(i)];
        rng::Rng urng = root.stream("user").stream(static_cast<std::uint64_t>(i));
        plan.likes = sample_power_law_with_body(spec.user_likes_law, 1, urng.stream("likes"))[0];

        // Topic-count category from the mobility model, truncated by the
        // number of likes available to spread.
        int k_max = std::min<int>(n_topics, static_cast<int>(
                                                std::min<std::int64_t>(plan.likes, n_topics)));
        rng::Rng krng = urng.stream("k");
        std::vector<double> probs(static_cast<std::size_t>(n_topics), 0.0);
        double prev = 0.0;
        for (int j = 0; j < n_topics; ++j) {
            double cum = j < n_topics - 1
                             ? stats::logistic(
                                   spec.mobility.intercepts[static_cast<std::size_t>(j)] -
                                   spec.mobility.slope * static_cast<double>(plan.likes))
                             : 1.0;
            probs[static_cast<std::size_t>(j)] = std::max(cum - prev, 0.0);
            prev = cum;
        }
        for (int j = k_max; j < n_topics; ++j) probs[static_cast<std::size_t>(j)] = 0.0;
        plan.k = static_cast<int>(krng.categorical(probs)) + 1;

        if (plan.k == 1) {
            single_topic_users.push_back(static_cast<std::size_t>(i));
        } else {
            std::vector<double> w;
            std::vector<int> avail;
            for (int t = 0; t < n_topics; ++t) {
                avail.push_back(t);
                w.push_back(spec.topics[static_cast<std::size_t>(t)].polarized_share);
            }
            rng::Rng trng = urng.stream("topics");
            for (int pick = 0; pick < plan.k; ++pick) {
                std::size_t j = trng.categorical(w);
                plan.topics.push_back(avail[j]);
                avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(j));
                w.erase(w.begin() + static_cast<std::ptrdiff_t>(j));
            }
            std::sort(plan.topics.begin(), plan.topics.end());
        }

        rng::Rng crng = urng.stream("commenter");
        plan.commenter = crng.uniform() < spec.commenter_fraction;
        if (plan.commenter)
            plan.comments =
                sample_power_law_with_body(spec.user_comments_law, 1, urng.stream("comments"))[0];
    }

    // Exact cohort apportionment over the single-topic users.
    {
        std::vector<double> cohort_shares;
        for (const auto& t : spec.topics) cohort_shares.push_back(t.polarized_share);
        auto counts =
            apportion(cohort_shares, static_cast<std::int64_t>(single_topic_users.size()));
        std::vector<int> labels;
        for (int t = 0; t < n_topics; ++t) {
            ledger.polarized_cohort[spec.topics[static_cast<std::size_t>(t)].name] =
                counts[static_cast<std::size_t>(t)];
            labels.insert(labels.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(t)]),
                          t);
        }
        rng::Rng arng = root.stream("polarized.assign");
        arng.shuffle(labels);
        for (std::size_t j = 0; j < single_topic_users.size(); ++j)
            plans[single_topic_users[j]].topics = {labels[j]};
    }

    // ---- users: emit events -------------------------------------------------
    for (std::int64_t i = 0; i < spec.n_users; ++i) {
        UserPlan& plan = plans[static_cast<std::size_t>(i)];
        std::string user = padded("u", i, 7);
        rng::Rng erng = root.stream("events").stream(static_cast<std::uint64_t>(i));

        ledger.user_topic_count[user] = plan.k;
        ledger.user_polarization[user] =
            plan.k == 1 ? spec.topics[static_cast<std::size_t>(plan.topics[0])].name : "";

        // Like allocation across the planned topics.
        std::vector<std::int64_t> alloc(plan.topics.size(), 0);
        std::int64_t unlabeled_likes = 0;
        if (plan.k == 1) {
            alloc[0] = plan.likes;
        } else {
            std::int64_t spread = plan.likes;
            unlabeled_likes =
                std::min<std::int64_t>(plan.likes / 10,
                                       plan.likes - static_cast<std::int64_t>(plan.k));
            if (unlabeled.empty()) unlabeled_likes = 0;
            spread -= unlabeled_likes;
            for (auto& a : alloc) a = 1;
            for (std::int64_t r = 0; r < spread - plan.k; ++r)
                ++alloc[erng.below(alloc.size())];
            // keep every topic share at or below 90% of the total likes
            std::int64_t cap =
                static_cast<std::int64_t>(std::floor(0.9 * static_cast<double>(plan.likes)));
            while (true) {
                std::size_t mx = 0, mn = 0;
                for (std::size_t a = 1; a < alloc.size(); ++a) {
                    if (alloc[a] > alloc[mx]) mx = a;
                    if (alloc[a] < alloc[mn]) mn = a;
                }
                if (alloc[mx] <= cap) break;
                --alloc[mx];
                ++alloc[mn];
            }
        }

        auto emit_like = [&](const ScopedPosts& scoped) {
            std::size_t target = scoped.draw_any(erng);
            std::int64_t lo = std::max(posts[target].created, spec.window_start);
            std::int64_t t = lo + static_cast<std::int64_t>(erng.below(
                                      static_cast<std::uint64_t>(window_end - lo + 1)));
            posts[target].like_events.push_back({user, t});
        };
        for (std::size_t ti = 0; ti < plan.topics.size(); ++ti) {
            const auto& scoped = by_topic[static_cast<std::size_t>(plan.topics[ti])];
            for (std::int64_t r = 0; r < alloc[ti]; ++r) emit_like(scoped);
        }
        for (std::int64_t r = 0; r < unlabeled_likes; ++r) emit_like(unlabeled);

        if (plan.commenter && plan.comments > 0) {
            std::vector<double> tw(alloc.begin(), alloc.end());
            int topic = plan.topics[erng.categorical(tw)];
            double mean = spec.topics[static_cast<std::size_t>(topic)].user_lifetime_mean;

            std::vector<std::int64_t> times;
            if (plan.comments == 1) {
                times.push_back(spec.window_start +
                                static_cast<std::int64_t>(erng.below(
                                    static_cast<std::uint64_t>(spec.window_length))));
            } else {
                double span_d = std::min(erng.exponential(mean),
                                         static_cast<double>(spec.window_length - 1));
                std::int64_t span = std::llround(span_d);
                std::int64_t t0 =
                    spec.window_start +
                    static_cast<std::int64_t>(erng.below(static_cast<std::uint64_t>(
                        spec.window_length - span)));
                times.push_back(t0);
                for (std::int64_t m = 0; m < plan.comments - 2; ++m)
                    times.push_back(t0 + static_cast<std::int64_t>(erng.below(
                                             static_cast<std::uint64_t>(span + 1))));
                times.push_back(t0 + span);
            }
            for (std::int64_t t : times) {
                std::size_t target =
                    by_topic[static_cast<std::size_t>(topic)].draw_eligible(t, erng);
                posts[target].comment_events.push_back({user, t});
            }
        }
    }

    // ---- assemble ------------------------------------------------------------
    std::vector<corpus::Post> records;
    records.reserve(posts.size());
    for (auto& gp : posts) {
        corpus::Post p;
        p.post_id = gp.id;
        p.page_id = gp.page;
        p.page_category = spec.page_category;
        p.created_at = gp.created;
        p.shares = gp.shares;
        if (gp.has_message) {
            std::string msg;
            for (std::size_t u = 0; u < gp.units.size(); ++u) {
                if (u) msg.push_back(' ');
                msg += gp.units[u];
            }
            p.message = std::move(msg);
            ++ledger.posts_with_message;
        }
        p.likes = std::move(gp.like_events);
        p.comments = std::move(gp.comment_events);
        ledger.post_label[p.post_id] = gp.label;
        if (gp.tie) ledger.tie_post_ids.insert(p.post_id);
        records.push_back(std::move(p));
    }
    out.corpus = corpus::build(std::move(records));
    ledger.totals = corpus::summarize(out.corpus);
    return out;
}

namespace {

json law_to_json(const PowerLawWithBody& law) {
    return json{{"alpha", law.alpha},
                {"x_min", law.x_min},
                {"tail_fraction", law.tail_fraction},
                {"body_alpha", law.body_alpha},
                {"cap", law.cap}};
}

PowerLawWithBody law_from_json(const json& j) {
    PowerLawWithBody law;
    law.alpha = j.at("alpha").get<double>();
    law.x_min = j.at("x_min").get<std::int64_t>();
    law.tail_fraction = j.at("tail_fraction").get<double>();
    law.body_alpha = j.at("body_alpha").get<double>();
    law.cap = j.at("cap").get<std::int64_t>();
    return law;
}

}  // namespace

void save_ledger(const GeneratorLedger& ledger, std::ostream& out) {
    json j;
    j["seed"] = ledger.seed;
    j["scale"] = ledger.scale;
    j["totals"] = json{{"pages", ledger.totals.pages},
                       {"posts", ledger.totals.posts},
                       {"likes", ledger.totals.likes},
                       {"comments", ledger.totals.comments},
                       {"shares", ledger.totals.shares},
                       {"likers", ledger.totals.likers},
                       {"commenters", ledger.totals.commenters}};
    j["posts_with_message"] = ledger.posts_with_message;
    j["label_counts"] = ledger.label_counts;
    j["tie_posts"] = ledger.tie_posts;
    j["unlabeled_message_posts"] = ledger.unlabeled_message_posts;
    j["post_label"] = ledger.post_label;
    j["tie_post_ids"] = ledger.tie_post_ids;
    j["user_polarization"] = ledger.user_polarization;
    j["user_topic_count"] = ledger.user_topic_count;
    j["polarized_cohort"] = ledger.polarized_cohort;
    j["user_lifetime_mean"] = ledger.user_lifetime_mean;
    j["mobility"] = json{{"intercepts", ledger.mobility.intercepts},
                         {"slope", ledger.mobility.slope}};
    j["user_likes_law"] = law_to_json(ledger.user_likes_law);
    j["user_comments_law"] = law_to_json(ledger.user_comments_law);
    j["post_shares_law"] = law_to_json(ledger.post_shares_law);
    out << j.dump(1, '\t') << '\n';
}

GeneratorLedger load_ledger_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open ledger file: " + path);
    json j = json::parse(in);
    GeneratorLedger ledger;
    ledger.seed = j.at("seed").get<std::uint64_t>();
    ledger.scale = j.at("scale").get<double>();
    const auto& totals = j.at("totals");
    ledger.totals.pages = totals.at("pages").get<std::int64_t>();
    ledger.totals.posts = totals.at("posts").get<std::int64_t>();
    ledger.totals.likes = totals.at("likes").get<std::int64_t>();
    ledger.totals.comments = totals.at("comments").get<std::int64_t>();
    ledger.totals.shares = totals.at("shares").get<std::int64_t>();
    ledger.totals.likers = totals.at("likers").get<std::int64_t>();
    ledger.totals.commenters = totals.at("commenters").get<std::int64_t>();
    ledger.posts_with_message = j.at("posts_with_message").get<std::int64_t>();
    ledger.label_counts =
        j.at("label_counts").get<std::map<std::string, std::int64_t>>();
    ledger.tie_posts = j.at("tie_posts").get<std::int64_t>();
    ledger.unlabeled_message_posts = j.at("unlabeled_message_posts").get<std::int64_t>();
    ledger.post_label = j.at("post_label").get<std::map<std::string, std::string>>();
    ledger.tie_post_ids = j.at("tie_post_ids").get<std::set<std::string>>();
    ledger.user_polarization =
        j.at("user_polarization").get<std::map<std::string, std::string>>();
    ledger.user_topic_count = j.at("user_topic_count").get<std::map<std::string, int>>();
    ledger.polarized_cohort =
        j.at("polarized_cohort").get<std::map<std::string, std::int64_t>>();
    ledger.user_lifetime_mean =
        j.at("user_lifetime_mean").get<std::map<std::string, double>>();
    ledger.mobility.intercepts = j.at("mobility").at("intercepts").get<std::vector<double>>();
    ledger.mobility.slope = j.at("mobility").at("slope").get<double>();
    ledger.user_likes_law = law_from_json(j.at("user_likes_law"));
    ledger.user_comments_law = law_from_json(j.at("user_comments_law"));
    ledger.post_shares_law = law_from_json(j.at("post_shares_law"));
    return ledger;
}

void save_dictionary(const lexicon::TermDictionary& dict, std::ostream& out) {
    out << "term,label,confidence\n";
    for (const auto& e : dict.entries) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.2f", e.confidence);
        out << e.term << ',' << e.label << ',' << buf << '\n';
    }
}

void write_outputs(const GeneratedCorpus& g, const std::string& dir) {
    std::filesystem::create_directories(dir);
    corpus::serialize_file(g.corpus, dir + "/corpus.jsonl");
    {
        std::ofstream out(dir + "/dictionary.csv", std::ios::binary);
        if (!out) throw Error("cannot write dictionary: " + dir + "/dictionary.csv");
        save_dictionary(g.dictionary, out);
    }
    {
        std::ofstream out(dir + "/ledger.json", std::ios::binary);
        if (!out) throw Error("cannot write ledger: " + dir + "/ledger.json");
        save_ledger(g.ledger, out);
    }
}

}  // namespace narmine::synthgen
