#include "narmine/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "narmine/csv.hpp"
#include "narmine/error.hpp"

namespace narmine::lexicon {

namespace {

// Latin-1 supplement accent folding; second byte of a 0xC3-prefixed sequence.
char fold_accent_second_byte(unsigned char b) {
    // Lowercase block 0xA0..0xBF, uppercase block 0x80..0x9F.
    if (b >= 0x80 && b <= 0x9F) b += 0x20;
    switch (b) {
        case 0xA0: case 0xA1: case 0xA2: case 0xA3: case 0xA4: case 0xA5:
            return 'a';
        case 0xA7:
            return 'c';
        case 0xA8: case 0xA9: case 0xAA: case 0xAB:
            return 'e';
        case 0xAC: case 0xAD: case 0xAE: case 0xAF:
            return 'i';
        case 0xB1:
            return 'n';
        case 0xB2: case 0xB3: case 0xB4: case 0xB5: case 0xB6:
            return 'o';
        case 0xB9: case 0xBA: case 0xBB: case 0xBC:
            return 'u';
        case 0xBD: case 0xBF:
            return 'y';
        default:
            return 0;
    }
}

bool is_token_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           c >= 0x80;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

// first token -> multi-word entries, longest first
using PhraseIndex =
    std::unordered_map<std::string, std::vector<const TermDictionary::Entry*>>;

PhraseIndex build_phrase_index(const TermDictionary& dict) {
    PhraseIndex index;
    for (const auto& e : dict.entries) {
        if (e.tokens.size() > 1) index[e.tokens.front()].push_back(&e);
    }
    for (auto& [tok, entries] : index) {
        (void)tok;
        std::sort(entries.begin(), entries.end(),
                  [](const TermDictionary::Entry* a, const TermDictionary::Entry* b) {
                      if (a->tokens.size() != b->tokens.size())
                          return a->tokens.size() > b->tokens.size();
                      return a->term < b->term;
                  });
    }
    return index;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& message,
                                  const NormalizationConfig& norm) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            if (norm.stemmer) current = norm.stemmer(current);
            if (!current.empty()) tokens.push_back(current);
            current.clear();
        }
    };
    for (std::size_t i = 0; i < message.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(message[i]);
        if (norm.accent_fold && c == 0xC3 && i + 1 < message.size()) {
            char folded = fold_accent_second_byte(static_cast<unsigned char>(message[i + 1]));
            if (folded) {
                current.push_back(folded);
                ++i;
                continue;
            }
        }
        if (!is_token_byte(c)) {
            flush();
            continue;
        }
        if (norm.case_fold && c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c + 32);
        current.push_back(static_cast<char>(c));
    }
    flush();
    return tokens;
}

bool TermDictionary::has(const std::string& term) const { return find(term) != nullptr; }

const TermDictionary::Entry* TermDictionary::find(const std::string& term) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), term,
                               [](const Entry& e, const std::string& t) { return e.term < t; });
    if (it == entries.end() || it->term != term) return nullptr;
    return &*it;
}

bool TermDictionary::has_phrases() const {
    return std::any_of(entries.begin(), entries.end(),
                       [](const Entry& e) { return e.tokens.size() > 1; });
}

TermDictionary load_dictionary(std::istream& in, const DictionaryOptions& opts) {
    auto table = csv::read(in);
    if (table.header.empty()) throw ParseError("dictionary file is empty");
    int term_col = table.require_column("term");
    int label_col = table.require_column("label");
    int conf_col = table.column("confidence");

    std::set<std::string> allowed(opts.allowed_labels.begin(), opts.allowed_labels.end());
    std::set<std::string> seen_labels;

    TermDictionary dict;
    for (const auto& row : table.rows) {
        TermDictionary::Entry e;
        e.tokens = tokenize(row[static_cast<std::size_t>(term_col)], opts.norm);
        if (e.tokens.empty())
            throw ParseError("dictionary term normalizes to nothing: '" +
                             row[static_cast<std::size_t>(term_col)] + "'");
        e.term = join_tokens(e.tokens);
        e.label = row[static_cast<std::size_t>(label_col)];
        if (e.label.empty()) throw ParseError("dictionary term '" + e.term + "' has no label");
        if (!allowed.empty() && !allowed.count(e.label))
            throw ParseError("dictionary label '" + e.label + "' not in configured label set");
        if (conf_col >= 0 && static_cast<std::size_t>(conf_col) < row.size() &&
            !row[static_cast<std::size_t>(conf_col)].empty()) {
            try {
                e.confidence = std::stod(row[static_cast<std::size_t>(conf_col)]);
            } catch (const std::exception&) {
                throw ParseError("dictionary term '" + e.term + "' has bad confidence value");
            }
        }
        if (e.confidence < opts.min_confidence) continue;
        seen_labels.insert(e.label);
        dict.entries.push_back(std::move(e));
    }

    std::sort(dict.entries.begin(), dict.entries.end(),
              [](const auto& a, const auto& b) { return a.term < b.term; });
    for (std::size_t i = 1; i < dict.entries.size(); ++i) {
        if (dict.entries[i].term == dict.entries[i - 1].term)
            throw ParseError("duplicate dictionary term: '" + dict.entries[i].term + "'");
    }
    if (!allowed.empty())
        dict.label_set.assign(allowed.begin(), allowed.end());
    else
        dict.label_set.assign(seen_labels.begin(), seen_labels.end());
    return dict;
}

TermDictionary load_dictionary_file(const std::string& path, const DictionaryOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dictionary file: " + path);
    return load_dictionary(in, opts);
}

namespace {

std::map<std::string, std::int64_t> count_terms_indexed(
    const std::vector<std::string>& tokens, const PhraseIndex* index) {
    std::map<std::string, std::int64_t> counts;
    if (!index || index->empty()) {
        for (const auto& t : tokens) ++counts[t];
        return counts;
    }
    std::size_t i = 0;
    while (i < tokens.size()) {
        auto it = index->find(tokens[i]);
        bool matched = false;
        if (it != index->end()) {
            for (const auto* entry : it->second) {
                std::size_t len = entry->tokens.size();
                if (i + len > tokens.size()) continue;
                if (std::equal(entry->tokens.begin(), entry->tokens.end(),
                               tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
                    ++counts[entry->term];
                    i += len;
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            ++counts[tokens[i]];
            ++i;
        }
    }
    return counts;
}

}  // namespace

std::map<std::string, std::int64_t> count_terms(const std::vector<std::string>& tokens,
                                                const TermDictionary* phrases) {
    if (!phrases || !phrases->has_phrases()) return count_terms_indexed(tokens, nullptr);
    PhraseIndex index = build_phrase_index(*phrases);
    return count_terms_indexed(tokens, &index);
}

int DocTermMatrix::term_index(const std::string& term) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), term);
    if (it == terms.end() || *it != term) return -1;
    return static_cast<int>(it - terms.begin());
}

DocTermMatrix build_dtm(const corpus::Corpus& c, const DtmOptions& opts) {
    if (opts.min_occurrences < 0) throw ConfigError("min_occurrences must be >= 0");

    std::vector<std::size_t> doc_posts;
    for (std::size_t i = 0; i < c.posts.size(); ++i)
        if (c.posts[i].has_message()) doc_posts.push_back(i);
    if (doc_posts.empty()) throw Error("empty document set");

    PhraseIndex index;
    const PhraseIndex* index_ptr = nullptr;
    if (opts.phrases && opts.phrases->has_phrases()) {
        index = build_phrase_index(*opts.phrases);
        index_ptr = &index;
    }

    // Pass 1: total occurrence counts.
    std::map<std::string, std::int64_t> totals;
    for (std::size_t pi : doc_posts) {
        auto counts = count_terms_indexed(tokenize(c.posts[pi].message, opts.norm), index_ptr);
        for (const auto& [term, n] : counts) totals[term] += n;
    }

    DocTermMatrix dtm;
    for (const auto& [term, n] : totals)
        if (n > opts.min_occurrences) dtm.terms.push_back(term);
    if (dtm.terms.empty() && opts.error_when_empty)
        throw Error("no terms above occurrence threshold " +
                    std::to_string(opts.min_occurrences));

    dtm.post_ids.reserve(doc_posts.size());
    for (std::size_t pi : doc_posts) dtm.post_ids.push_back(c.posts[pi].post_id);

    // Pass 2: triplets over the surviving vocabulary.
    std::vector<Eigen::Triplet<std::int32_t>> trips;
    for (std::size_t r = 0; r < doc_posts.size(); ++r) {
        auto counts =
            count_terms_indexed(tokenize(c.posts[doc_posts[r]].message, opts.norm), index_ptr);
        for (const auto& [term, n] : counts) {
            int col = dtm.term_index(term);
            if (col >= 0)
                trips.emplace_back(static_cast<int>(r), col, static_cast<std::int32_t>(n));
        }
    }
    dtm.counts.resize(static_cast<Eigen::Index>(dtm.post_ids.size()),
                      static_cast<Eigen::Index>(dtm.terms.size()));
    dtm.counts.setFromTriplets(trips.begin(), trips.end());

    dtm.marginals.assign(dtm.terms.size(), 0);
    for (int k = 0; k < dtm.counts.outerSize(); ++k)
        for (Eigen::SparseMatrix<std::int32_t>::InnerIterator it(dtm.counts, k); it; ++it)
            dtm.marginals[static_cast<std::size_t>(it.col())] += it.value();
    return dtm;
}

DocTermMatrix restrict_to_dictionary(const DocTermMatrix& dtm, const TermDictionary& dict) {
    std::vector<int> keep;
    for (std::size_t c = 0; c < dtm.terms.size(); ++c)
        if (dict.has(dtm.terms[c])) keep.push_back(static_cast<int>(c));
    if (keep.empty()) throw Error("dictionary disjoint from corpus vocabulary");

    DocTermMatrix out;
    out.post_ids = dtm.post_ids;
    out.terms.reserve(keep.size());
    for (int c : keep) out.terms.push_back(dtm.terms[static_cast<std::size_t>(c)]);

    std::vector<Eigen::Triplet<std::int32_t>> trips;
    for (std::size_t nc = 0; nc < keep.size(); ++nc) {
        for (Eigen::SparseMatrix<std::int32_t>::InnerIterator it(dtm.counts, keep[nc]); it;
             ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(nc), it.value());
    }
    out.counts.resize(dtm.counts.rows(), static_cast<Eigen::Index>(keep.size()));
    out.counts.setFromTriplets(trips.begin(), trips.end());

    out.marginals.assign(out.terms.size(), 0);
    for (std::size_t nc = 0; nc < keep.size(); ++nc)
        out.marginals[nc] = dtm.marginals[static_cast<std::size_t>(keep[nc])];
    return out;
}

void save_triplets(const DocTermMatrix& dtm, std::ostream& out) {
    out << "post_id,term,count\n";
    // Row-major for a stable on-disk order.
    std::vector<std::vector<std::pair<int, std::int32_t>>> rows(dtm.post_ids.size());
    for (int k = 0; k < dtm.counts.outerSize(); ++k)
        for (Eigen::SparseMatrix<std::int32_t>::InnerIterator it(dtm.counts, k); it; ++it)
            rows[static_cast<std::size_t>(it.row())].emplace_back(static_cast<int>(it.col()),
                                                                  it.value());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::sort(rows[r].begin(), rows[r].end());
        for (const auto& [col, n] : rows[r]) {
            out << csv::quote(dtm.post_ids[r]) << ','
                << csv::quote(dtm.terms[static_cast<std::size_t>(col)]) << ',' << n << '\n';
        }
    }
}

void save_triplets_file(const DocTermMatrix& dtm, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write matrix file: " + path);
    save_triplets(dtm, out);
}

DocTermMatrix load_triplets(std::istream& in) {
    auto table = csv::read(in);
    int pid_col = table.require_column("post_id");
    int term_col = table.require_column("term");
    int count_col = table.require_column("count");

    DocTermMatrix dtm;
    std::unordered_map<std::string, int> row_of;
    std::set<std::string> term_set;
    for (const auto& row : table.rows)
        term_set.insert(row[static_cast<std::size_t>(term_col)]);
    dtm.terms.assign(term_set.begin(), term_set.end());

    std::vector<Eigen::Triplet<std::int32_t>> trips;
    for (const auto& row : table.rows) {
        const auto& pid = row[static_cast<std::size_t>(pid_col)];
        auto [it, inserted] = row_of.emplace(pid, static_cast<int>(dtm.post_ids.size()));
        if (inserted) dtm.post_ids.push_back(pid);
        int col = dtm.term_index(row[static_cast<std::size_t>(term_col)]);
        std::int32_t n;
        try {
            n = static_cast<std::int32_t>(std::stol(row[static_cast<std::size_t>(count_col)]));
        } catch (const std::exception&) {
            throw ParseError("bad count in matrix file for post " + pid);
        }
        trips.emplace_back(it->second, col, n);
    }
    dtm.counts.resize(static_cast<Eigen::Index>(dtm.post_ids.size()),
                      static_cast<Eigen::Index>(dtm.terms.size()));
    dtm.counts.setFromTriplets(trips.begin(), trips.end());
    dtm.marginals.assign(dtm.terms.size(), 0);
    for (int k = 0; k < dtm.counts.outerSize(); ++k)
        for (Eigen::SparseMatrix<std::int32_t>::InnerIterator it(dtm.counts, k); it; ++it)
            dtm.marginals[static_cast<std::size_t>(it.col())] += it.value();
    return dtm;
}

DocTermMatrix load_triplets_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open matrix file: " + path);
    return load_triplets(in);
}

}  // namespace narmine::lexicon
