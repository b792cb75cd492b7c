#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "narmine/corpus.hpp"
#include "narmine/error.hpp"
#include "narmine/rng.hpp"
#include "narmine/synthgen.hpp"

using namespace narmine;

namespace {

const char* kThreeRecords =
    R"({"post_id":"p1","page_id":"pg1","created_at":100,"message":"hello world","likes":[{"user":"u1","t":150},{"user":"u2","t":120}],"comments":[{"user":"u1","t":200}],"shares":3}
{"post_id":"p2","page_id":"pg1","created_at":110,"message":"","likes":[],"comments":[],"shares":0}
{"post_id":"p3","page_id":"pg2","created_at":105,"message":"ciao","likes":[{"user":"u2","t":300}],"comments":[{"user":"u3","t":400},{"user":"u3","t":350}],"shares":1}
)";

}  // namespace

TEST_CASE("ingest builds a consistent corpus from well-formed records") {
    std::istringstream in(kThreeRecords);
    auto c = corpus::ingest(in);
    REQUIRE(c.posts.size() == 3);
    CHECK(c.page_index.size() == 2);
    CHECK(c.user_index.size() == 3);

    // events sorted ascending after ingestion
    CHECK(c.posts[0].likes[0].user == "u2");
    CHECK(c.posts[0].likes[1].user == "u1");
    CHECK(c.posts[2].comments[0].t == 350);

    // index round-trip: every event appears in exactly one bucket
    const auto& u2 = c.user_index.at("u2");
    CHECK(u2.liked.size() == 2);
    CHECK(u2.commented.empty());
    CHECK(c.window_min == 100);
    CHECK(c.window_max == 400);
    CHECK_FALSE(c.posts[1].has_message());
}

TEST_CASE("duplicate post_id is rejected by name") {
    std::string two =
        R"({"post_id":"dup","page_id":"a","created_at":1,"message":"x","likes":[],"comments":[],"shares":0}
{"post_id":"dup","page_id":"a","created_at":2,"message":"y","likes":[],"comments":[],"shares":0}
)";
    std::istringstream in(two);
    CHECK_THROWS_WITH_AS(corpus::ingest(in), doctest::Contains("dup"), ParseError);
}

TEST_CASE("malformed line reports its line number") {
    std::string bad =
        R"({"post_id":"p1","page_id":"a","created_at":1,"message":"x","likes":[],"comments":[],"shares":0}
not json at all
)";
    std::istringstream in(bad);
    CHECK_THROWS_WITH_AS(corpus::ingest(in), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("unparseable timestamp is an error") {
    std::string bad =
        R"({"post_id":"p1","page_id":"a","created_at":"yesterday","message":"x","likes":[],"comments":[],"shares":0})";
    std::istringstream in(bad);
    CHECK_THROWS_AS(corpus::ingest(in), ParseError);

    std::string bad_event =
        R"({"post_id":"p1","page_id":"a","created_at":1,"message":"x","likes":[{"user":"u","t":1.5}],"comments":[],"shares":0})";
    std::istringstream in2(bad_event);
    CHECK_THROWS_AS(corpus::ingest(in2), ParseError);
}

TEST_CASE("negative timestamps and shares are rejected") {
    std::string bad =
        R"({"post_id":"p1","page_id":"a","created_at":1,"message":"x","likes":[{"user":"u","t":-5}],"comments":[],"shares":0})";
    std::istringstream in(bad);
    CHECK_THROWS_AS(corpus::ingest(in), ParseError);

    std::string bad2 =
        R"({"post_id":"p1","page_id":"a","created_at":1,"message":"x","likes":[],"comments":[],"shares":-1})";
    std::istringstream in2(bad2);
    CHECK_THROWS_AS(corpus::ingest(in2), ParseError);
}

TEST_CASE("unknown schema version is rejected") {
    std::istringstream in(kThreeRecords);
    CHECK_THROWS_AS(corpus::ingest(in, "v999"), ConfigError);
}

TEST_CASE("summarize counts distinct likers and raw like events") {
    std::string records =
        R"({"post_id":"p1","page_id":"a","created_at":1,"message":"x","likes":[{"user":"u1","t":5},{"user":"u1","t":9}],"comments":[],"shares":0})";
    std::istringstream in(records);
    auto c = corpus::ingest(in);
    auto s = corpus::summarize(c);
    CHECK(s.likes == 2);
    CHECK(s.likers == 1);
    CHECK(s.comments == 0);
    CHECK(s.commenters == 0);
    CHECK(s.pages == 1);
}

TEST_CASE("empty corpus summarizes to zeros") {
    std::istringstream in("");
    auto c = corpus::ingest(in);
    auto s = corpus::summarize(c);
    CHECK(s.posts == 0);
    CHECK(s.pages == 0);
    CHECK(s.likes == 0);
    CHECK(s.shares == 0);
}

TEST_CASE("serialize then ingest yields an identical corpus") {
    std::istringstream in(kThreeRecords);
    auto c = corpus::ingest(in);
    std::ostringstream buf;
    corpus::serialize(c, buf);
    std::istringstream again(buf.str());
    auto c2 = corpus::ingest(again);
    CHECK(corpus::identical(c, c2));

    // and the canonical form is a fixed point
    std::ostringstream buf2;
    corpus::serialize(c2, buf2);
    CHECK(buf.str() == buf2.str());
}

TEST_CASE("summarize is invariant under record order permutation") {
    std::istringstream in(kThreeRecords);
    auto c = corpus::ingest(in);
    auto s1 = corpus::summarize(c);

    std::vector<std::string> lines;
    std::istringstream split(kThreeRecords);
    std::string line;
    while (std::getline(split, line))
        if (!line.empty()) lines.push_back(line);
    std::reverse(lines.begin(), lines.end());
    std::string reversed;
    for (const auto& l : lines) reversed += l + "\n";
    std::istringstream in2(reversed);
    auto s2 = corpus::summarize(corpus::ingest(in2));
    CHECK(s1 == s2);
}

TEST_CASE("synthetic corpus round-trips with ledger-exact totals") {
    // Full-scale post count; events scale with the user pool to keep the
    // suite fast while still exercising the 208,591-post record volume.
    auto spec = synthgen::paper_shaped_spec(0.02, 11);
    spec.n_posts = 208591;
    auto generated = synthgen::generate_corpus(spec);

    auto s = corpus::summarize(generated.corpus);
    CHECK(s == generated.ledger.totals);
    CHECK(s.posts == 208591);
    CHECK(s.pages == 39);

    std::ostringstream buf;
    corpus::serialize(generated.corpus, buf);
    std::istringstream again(buf.str());
    auto c2 = corpus::ingest(again);
    CHECK(corpus::identical(generated.corpus, c2));
    auto s2 = corpus::summarize(c2);
    CHECK(s2 == generated.ledger.totals);
}

TEST_CASE("generator is deterministic for a fixed seed and spec") {
    auto spec = synthgen::paper_shaped_spec(0.002, 7);
    auto g1 = synthgen::generate_corpus(spec);
    auto g2 = synthgen::generate_corpus(spec);
    std::ostringstream b1, b2;
    corpus::serialize(g1.corpus, b1);
    corpus::serialize(g2.corpus, b2);
    CHECK(b1.str() == b2.str());
    CHECK(g1.ledger.totals == g2.ledger.totals);

    auto spec2 = synthgen::paper_shaped_spec(0.002, 8);
    auto g3 = synthgen::generate_corpus(spec2);
    std::ostringstream b3;
    corpus::serialize(g3.corpus, b3);
    CHECK(b1.str() != b3.str());
}
