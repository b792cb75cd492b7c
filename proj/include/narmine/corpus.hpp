#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

namespace narmine::corpus {

struct Event {
    std::string user;
    std::int64_t t = 0;

    friend bool operator==(const Event&, const Event&) = default;
};

struct Post {
    std::string post_id;
    std::string page_id;
    std::string page_category;  // optional; empty when the corpus has none
    std::int64_t created_at = 0;
    std::string message;
    std::vector<Event> likes;     // sorted by (t, user) after ingestion
    std::vector<Event> comments;  // sorted by (t, user) after ingestion
    std::int64_t shares = 0;

    bool has_message() const { return !message.empty(); }

    friend bool operator==(const Post&, const Post&) = default;
};

struct UserActivity {
    std::vector<std::size_t> liked;      // post indices
    std::vector<std::size_t> commented;  // post indices

    friend bool operator==(const UserActivity&, const UserActivity&) = default;
};

// Immutable after ingestion; safe for concurrent reads.
struct Corpus {
    std::vector<Post> posts;
    std::unordered_map<std::string, std::size_t> post_index;      // post_id -> index
    std::map<std::string, UserActivity> user_index;               // user -> activity
    std::map<std::string, std::vector<std::size_t>> page_index;   // page -> post indices
    std::int64_t window_min = 0;  // min over created_at and event times
    std::int64_t window_max = 0;

    const Post& post(const std::string& post_id) const;
    bool empty() const { return posts.empty(); }
};

struct CorpusSummary {
    std::int64_t pages = 0;
    std::int64_t posts = 0;
    std::int64_t likes = 0;
    std::int64_t comments = 0;
    std::int64_t shares = 0;
    std::int64_t likers = 0;      // distinct users with >= 1 like
    std::int64_t commenters = 0;  // distinct users with >= 1 comment

    friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

// Builds a Corpus directly from records: sorts events, builds indexes,
// validates invariants (unique ids, non-negative timestamps and counts).
Corpus build(std::vector<Post> posts);

// One JSON record per line:
// {"post_id": str, "page_id": str, "created_at": int, "message": str,
//  "likes": [{"user": str, "t": int}], "comments": [...], "shares": int}
// plus optional "page_category". Errors carry the 1-based line number.
Corpus ingest(std::istream& in, const std::string& schema_version = "v1");
Corpus ingest_file(const std::string& path, const std::string& schema_version = "v1");

// Canonical form: ingestion order, events sorted, stable key order.
// ingest(serialize(c)) == c field-by-field.
void serialize(const Corpus& c, std::ostream& out);
void serialize_file(const Corpus& c, const std::string& path);

CorpusSummary summarize(const Corpus& c);

bool identical(const Corpus& a, const Corpus& b);

}  // namespace narmine::corpus
