#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "narmine/corpus.hpp"

namespace narmine::lexicon {

struct NormalizationConfig {
    bool case_fold = true;
    bool accent_fold = false;  // fold Latin-1 accents to ASCII (Italian text)
    // Optional per-token hook; identity when unset.
    std::function<std::string(const std::string&)> stemmer;
};

// Splits on non-alphanumeric characters; multi-byte UTF-8 sequences count as
// letters. Empty message yields an empty list.
std::vector<std::string> tokenize(const std::string& message,
                                  const NormalizationConfig& norm = {});

struct TermDictionary {
    struct Entry {
        std::string term;                 // normalized, tokens joined by ' '
        std::vector<std::string> tokens;  // >= 1; > 1 for multi-word terms
        std::string label;
        double confidence = 1.0;
    };

    std::vector<Entry> entries;          // sorted by term
    std::vector<std::string> label_set;  // sorted distinct labels

    bool has(const std::string& term) const;
    const Entry* find(const std::string& term) const;
    std::size_t size() const { return entries.size(); }
    bool has_phrases() const;
};

struct DictionaryOptions {
    // When empty the label set is derived from the file.
    std::vector<std::string> allowed_labels;
    double min_confidence = 0.9;  // rows below are dropped
    NormalizationConfig norm;
};

// CSV rows: term,label[,confidence]. Terms are normalized on load;
// duplicates after normalization are an error.
TermDictionary load_dictionary(std::istream& in, const DictionaryOptions& opts = {});
TermDictionary load_dictionary_file(const std::string& path,
                                    const DictionaryOptions& opts = {});

struct DocTermMatrix {
    std::vector<std::string> post_ids;  // rows: posts with non-empty messages
    std::vector<std::string> terms;     // columns, lexicographically sorted
    Eigen::SparseMatrix<std::int32_t> counts;  // post x term occurrence counts
    std::vector<std::int64_t> marginals;       // column sums

    std::size_t n_rows() const { return post_ids.size(); }
    std::size_t n_cols() const { return terms.size(); }
    int term_index(const std::string& term) const;  // -1 when absent
};

struct DtmOptions {
    std::int64_t min_occurrences = 500;  // keep terms with total count > this
    bool error_when_empty = true;        // empty vocabulary: throw vs 0-column matrix
    NormalizationConfig norm;
    // When set, multi-word dictionary terms are matched as contiguous token
    // runs (longest match first) and counted as single terms.
    const TermDictionary* phrases = nullptr;
};

// Term occurrence counts for one token stream, phrase-aware.
std::map<std::string, std::int64_t> count_terms(const std::vector<std::string>& tokens,
                                                const TermDictionary* phrases);

DocTermMatrix build_dtm(const corpus::Corpus& c, const DtmOptions& opts = {});

// Column intersection with the dictionary; rows are kept even when all-zero.
DocTermMatrix restrict_to_dictionary(const DocTermMatrix& dtm,
                                     const TermDictionary& dict);

// Sparse triplets CSV: post_id,term,count.
void save_triplets(const DocTermMatrix& dtm, std::ostream& out);
void save_triplets_file(const DocTermMatrix& dtm, const std::string& path);
DocTermMatrix load_triplets(std::istream& in);
DocTermMatrix load_triplets_file(const std::string& path);

}  // namespace narmine::lexicon
