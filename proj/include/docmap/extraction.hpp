#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "docmap/corpus.hpp"
#include "docmap/vectors.hpp"

namespace docmap {

enum class Method { tfidf, yake, rake, textrank, embed };

inline constexpr Method kAllMethods[] = {Method::tfidf, Method::yake, Method::rake, Method::textrank, Method::embed};

std::string_view method_name(Method m);
// Throws ValidationError for an unknown name.
Method parse_method(std::string_view name);

struct ScoredKeyword {
    std::string text;
    double score = 0;
    int rank = 0;
};

struct KeywordSet {
    std::string doc_id;
    Method method = Method::yake;
    std::vector<ScoredKeyword> keywords;
};

enum class Better { higher, lower };

// Sort by score in the given direction, ties lexicographic by text, keep k,
// assign ranks 1..k.
std::vector<ScoredKeyword> top_k(std::vector<ScoredKeyword> scored, std::size_t k, Better better);

// --- TF-IDF -----------------------------------------------------------------

inline constexpr std::size_t kTfidfMaxPhrase = 2;

// Document frequency over the stopword-free unigram + bigram space.
struct DocumentFrequency {
    std::unordered_map<std::string, std::size_t> df;
    std::size_t documents = 0;

    void add(const TokenizedDoc& tdoc);
    std::size_t of(const std::string& phrase) const;
};

DocumentFrequency build_document_frequency(const std::vector<TokenizedDoc>& docs);

// score = tf * ln(N / df); higher is better.
KeywordSet extract_tfidf(std::string doc_id, const TokenizedDoc& tdoc, const DocumentFrequency& df, std::size_t k);

// --- YAKE -------------------------------------------------------------------

inline constexpr std::size_t kYakeMaxPhrase = 3;
inline constexpr double kYakeDedupThreshold = 0.9;

struct YakeTermFeatures {
    std::string term;
    double tf = 0;
    double tf_upper = 0;    // capitalised, not sentence-initial
    double tf_acronym = 0;  // all upper case, length > 1
    double casing = 0;
    double position = 0;
    double frequency = 0;
    double relatedness = 0;
    double dispersion = 0;
    double score = 0;  // lower is better
};

// Features of every non-stopword term, keyed by normalized form, in first
// occurrence order.
std::vector<YakeTermFeatures> yake_term_features(const TokenizedDoc& tdoc);

// 1 - edit distance / longer length; 1 for two empty strings.
double levenshtein_similarity(std::string_view a, std::string_view b);

// Lower score is better.
KeywordSet extract_yake(std::string doc_id, const TokenizedDoc& tdoc, std::size_t k);

// --- RAKE -------------------------------------------------------------------

enum class RakeMetric { degree_over_freq, freq, degree };
RakeMetric parse_rake_metric(std::string_view name);
std::string_view rake_metric_name(RakeMetric m);

// Phrases are maximal stopword- and punctuation-delimited runs.
std::map<std::string, double> rake_word_scores(const TokenizedDoc& tdoc, RakeMetric metric);
KeywordSet extract_rake(std::string doc_id, const TokenizedDoc& tdoc, std::size_t k,
                        RakeMetric metric = RakeMetric::degree_over_freq);

// --- TextRank ---------------------------------------------------------------

inline constexpr double kPageRankDamping = 0.85;
inline constexpr double kPageRankTolerance = 1e-6;
inline constexpr int kPageRankMaxIterations = 100;

// Undirected unweighted graph given as adjacency lists over node ids 0..n-1.
// Dangling nodes spread their mass uniformly, so the result sums to 1.
std::vector<double> pagerank(const std::vector<std::vector<std::size_t>>& adjacency,
                             double damping = kPageRankDamping);

// PageRank over the co-occurrence graph (window 2) of non-stopword words.
std::map<std::string, double> textrank_word_scores(const TokenizedDoc& tdoc);
KeywordSet extract_textrank(std::string doc_id, const TokenizedDoc& tdoc, std::size_t k);

// --- Embedding similarity ---------------------------------------------------

inline constexpr std::size_t kEmbedMaxPhrase = 3;

// Empty result when the document vector is zero.
KeywordSet extract_embed(std::string doc_id, const TokenizedDoc& tdoc, const DocVector& doc_vec,
                         const WordVectorStore& store, std::size_t k);

// --- Corpus-level driver ----------------------------------------------------

struct ExtractionInputs {
    const DocumentFrequency* df = nullptr;           // tfidf
    const WordVectorStore* store = nullptr;          // embed
    const std::vector<DocVector>* doc_vectors = nullptr;  // embed, aligned with docs
    RakeMetric rake_metric = RakeMetric::degree_over_freq;
};

// One KeywordSet per document, in corpus order. Runs in parallel over documents.
std::vector<KeywordSet> extract_all(Method method, const std::vector<std::string>& ids,
                                    const std::vector<TokenizedDoc>& docs, std::size_t k,
                                    const ExtractionInputs& inputs);

std::string keywords_to_jsonl(const std::vector<KeywordSet>& sets);
std::vector<KeywordSet> keywords_from_jsonl(std::string_view text);

}  // namespace docmap
