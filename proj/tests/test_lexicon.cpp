#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "narmine/corpus.hpp"
#include "narmine/error.hpp"
#include "narmine/lexicon.hpp"
#include "narmine/rng.hpp"
#include "narmine/synthgen.hpp"

using namespace narmine;

namespace {

corpus::Corpus tiny_corpus(const std::vector<std::string>& messages) {
    std::vector<corpus::Post> posts;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        corpus::Post p;
        p.post_id = "p" + std::to_string(i);
        p.page_id = "pg";
        p.created_at = static_cast<std::int64_t>(i);
        p.message = messages[i];
        posts.push_back(std::move(p));
    }
    return corpus::build(std::move(posts));
}

lexicon::TermDictionary dict_from_csv(const std::string& body,
                                      lexicon::DictionaryOptions opts = {}) {
    std::istringstream in(body);
    return lexicon::load_dictionary(in, opts);
}

}  // namespace

TEST_CASE("tokenize folds case and strips punctuation") {
    auto tokens = lexicon::tokenize("Scie Chimiche, scie chimiche!");
    CHECK(tokens == std::vector<std::string>{"scie", "chimiche", "scie", "chimiche"});
}

TEST_CASE("tokenize of empty message is empty") {
    CHECK(lexicon::tokenize("").empty());
    CHECK(lexicon::tokenize("  ,,, !!").empty());
}

TEST_CASE("accent folding is opt-in") {
    lexicon::NormalizationConfig plain;
    auto kept = lexicon::tokenize("verit\xc3\xa0", plain);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0] == "verit\xc3\xa0");

    lexicon::NormalizationConfig folded;
    folded.accent_fold = true;
    auto f = lexicon::tokenize("Verit\xc3\xa0 perch\xc3\xa9", folded);
    CHECK(f == std::vector<std::string>{"verita", "perche"});
}

TEST_CASE("stemmer hook applies per token") {
    lexicon::NormalizationConfig cfg;
    cfg.stemmer = [](const std::string& t) { return t.substr(0, 3); };
    CHECK(lexicon::tokenize("komplotto", cfg) == std::vector<std::string>{"kom"});
}

TEST_CASE("dictionary loads labels and confidence filter") {
    auto dict = dict_from_csv("term,label,confidence\nscie,environment,0.95\nvaccini,health,0.85\n");
    CHECK(dict.size() == 1);  // 0.85 < default 0.9 cut
    CHECK(dict.has("scie"));
    CHECK_FALSE(dict.has("vaccini"));

    lexicon::DictionaryOptions loose;
    loose.min_confidence = 0.5;
    auto dict2 = dict_from_csv("term,label,confidence\nscie,environment,0.95\nvaccini,health,0.85\n", loose);
    CHECK(dict2.size() == 2);
    CHECK(dict2.label_set == std::vector<std::string>{"environment", "health"});
}

TEST_CASE("dictionary rejects duplicates and unknown labels") {
    CHECK_THROWS_AS(dict_from_csv("term,label\nscie,env\nScie,env\n"), ParseError);

    lexicon::DictionaryOptions opts;
    opts.allowed_labels = {"environment"};
    CHECK_THROWS_AS(dict_from_csv("term,label\nscie,diet\n", opts), ParseError);
}

TEST_CASE("build_dtm keeps terms above the occurrence threshold") {
    auto c = tiny_corpus({"alpha beta", "alpha beta", "alpha"});
    lexicon::DtmOptions opts;
    opts.min_occurrences = 1;
    auto dtm = lexicon::build_dtm(c, opts);
    // alpha: 3 occurrences, beta: 2 -> both strictly above 1
    REQUIRE(dtm.terms == std::vector<std::string>{"alpha", "beta"});
    CHECK(dtm.marginals == std::vector<std::int64_t>{3, 2});

    opts.min_occurrences = 2;
    auto dtm2 = lexicon::build_dtm(c, opts);
    CHECK(dtm2.terms == std::vector<std::string>{"alpha"});  // strict >
}

TEST_CASE("two posts sharing one term at threshold 1") {
    auto c = tiny_corpus({"shared", "shared"});
    lexicon::DtmOptions opts;
    opts.min_occurrences = 1;
    auto dtm = lexicon::build_dtm(c, opts);
    REQUIRE(dtm.n_cols() == 1);
    CHECK(dtm.marginals[0] == 2);
}

TEST_CASE("threshold larger than any count errors or yields empty per config") {
    auto c = tiny_corpus({"rare words only"});
    lexicon::DtmOptions opts;
    opts.min_occurrences = 100;
    CHECK_THROWS_AS(lexicon::build_dtm(c, opts), Error);

    opts.error_when_empty = false;
    auto dtm = lexicon::build_dtm(c, opts);
    CHECK(dtm.n_cols() == 0);
    CHECK(dtm.n_rows() == 1);
}

TEST_CASE("corpus with no messages is an empty document set") {
    auto c = tiny_corpus({"", ""});
    CHECK_THROWS_WITH_AS(lexicon::build_dtm(c, {}), doctest::Contains("empty document set"),
                         Error);
}

TEST_CASE("restrict_to_dictionary intersects columns and is idempotent") {
    auto c = tiny_corpus({"a b c", "a b", "c c"});
    lexicon::DtmOptions opts;
    opts.min_occurrences = 0;
    auto dtm = lexicon::build_dtm(c, opts);
    auto dict = dict_from_csv("term,label\nb,topic1\nc,topic2\nd,topic1\n");
    auto restricted = lexicon::restrict_to_dictionary(dtm, dict);
    CHECK(restricted.terms == std::vector<std::string>{"b", "c"});
    CHECK(restricted.n_rows() == 3);  // all-zero rows retained

    auto twice = lexicon::restrict_to_dictionary(restricted, dict);
    CHECK(twice.terms == restricted.terms);
    CHECK(twice.marginals == restricted.marginals);
}

TEST_CASE("disjoint dictionary is an error") {
    auto c = tiny_corpus({"a b", "b a"});
    lexicon::DtmOptions opts;
    opts.min_occurrences = 0;
    auto dtm = lexicon::build_dtm(c, opts);
    auto dict = dict_from_csv("term,label\nzzz,topic\n");
    CHECK_THROWS_WITH_AS(lexicon::restrict_to_dictionary(dtm, dict),
                         doctest::Contains("disjoint"), Error);
}

TEST_CASE("multi-word dictionary terms match longest-first") {
    auto dict = dict_from_csv("term,label\nscie chimiche,environment\nscie,environment\n");
    auto counts = lexicon::count_terms({"scie", "chimiche", "scie", "rosse"}, &dict);
    CHECK(counts["scie chimiche"] == 1);
    CHECK(counts["scie"] == 1);  // the lone one, not part of the phrase
    CHECK(counts["rosse"] == 1);

    auto c = tiny_corpus({"scie chimiche scie"});
    lexicon::DtmOptions opts;
    opts.min_occurrences = 0;
    opts.phrases = &dict;
    auto dtm = lexicon::build_dtm(c, opts);
    int phrase_col = dtm.term_index("scie chimiche");
    REQUIRE(phrase_col >= 0);
    CHECK(dtm.marginals[static_cast<std::size_t>(phrase_col)] == 1);
}

TEST_CASE("dtm is invariant under post order permutation") {
    auto c1 = tiny_corpus({"a a b", "b c", "c a"});
    auto c2 = tiny_corpus({"c a", "b c", "a a b"});
    lexicon::DtmOptions opts;
    opts.min_occurrences = 0;
    auto d1 = lexicon::build_dtm(c1, opts);
    auto d2 = lexicon::build_dtm(c2, opts);
    CHECK(d1.terms == d2.terms);
    CHECK(d1.marginals == d2.marginals);
}

TEST_CASE("dtm entries equal recount of tokenized messages") {
    auto spec = synthgen::paper_shaped_spec(0.002, 21);
    auto g = synthgen::generate_corpus(spec);
    lexicon::DtmOptions opts;
    opts.min_occurrences = 0;
    opts.phrases = &g.dictionary;
    auto dtm = lexicon::build_dtm(g.corpus, opts);

    rng::Rng pick(99);
    for (int trial = 0; trial < 50; ++trial) {
        auto row = static_cast<Eigen::Index>(pick.below(dtm.n_rows()));
        const auto& post = g.corpus.post(dtm.post_ids[static_cast<std::size_t>(row)]);
        auto expected = lexicon::count_terms(lexicon::tokenize(post.message), &g.dictionary);
        for (std::size_t col = 0; col < dtm.n_cols(); ++col) {
            std::int64_t want = 0;
            if (auto it = expected.find(dtm.terms[col]); it != expected.end())
                want = it->second;
            CHECK(dtm.counts.coeff(row, static_cast<Eigen::Index>(col)) == want);
        }
    }
}

TEST_CASE("planted dictionary of 159 terms is recovered exactly") {
    auto spec = synthgen::paper_shaped_spec(0.01, 7);
    auto g = synthgen::generate_corpus(spec);
    CHECK(g.dictionary.size() == 159);

    lexicon::DtmOptions opts;
    opts.min_occurrences = spec.min_occurrence_target;
    opts.phrases = &g.dictionary;
    auto full = lexicon::build_dtm(g.corpus, opts);
    auto restricted = lexicon::restrict_to_dictionary(full, g.dictionary);
    CHECK(restricted.n_cols() == 159);
    for (std::int64_t m : restricted.marginals) CHECK(m > spec.min_occurrence_target);

    // surviving columns equal an independent counting pass
    std::map<std::string, std::int64_t> totals;
    for (const auto& p : g.corpus.posts) {
        if (!p.has_message()) continue;
        for (const auto& [term, n] : lexicon::count_terms(lexicon::tokenize(p.message),
                                                          &g.dictionary))
            totals[term] += n;
    }
    std::set<std::string> expected_cols;
    for (const auto& [term, n] : totals)
        if (n > spec.min_occurrence_target) expected_cols.insert(term);
    std::set<std::string> got_cols(full.terms.begin(), full.terms.end());
    CHECK(got_cols == expected_cols);
}
