#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace docmap {

struct Document {
    std::string id;
    std::string title;
    std::string abstract;
    std::optional<std::vector<std::string>> gold_keywords;
};

struct CorpusStats {
    std::size_t documents = 0;
    std::size_t with_gold = 0;
    // Averaged over documents that carry gold keywords.
    double mean_gold_per_doc = 0.0;
};

class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> docs);

    // Throws ContractError on empty/duplicate id or blank abstract.
    void add(Document doc);

    const std::vector<Document>& documents() const noexcept { return docs_; }
    std::size_t size() const noexcept { return docs_.size(); }
    bool empty() const noexcept { return docs_.empty(); }
    const Document& operator[](std::size_t i) const { return docs_[i]; }

    CorpusStats stats() const;

    // Records dropped at ingest (blank abstracts and similar).
    std::size_t skipped = 0;

private:
    std::vector<Document> docs_;
    std::unordered_set<std::string> ids_;
};

// One JSON object per line: {"id","title","abstract","keywords"?}.
// Blank abstracts are skipped and counted in Corpus::skipped.
Corpus load_jsonl(const std::filesystem::path& path);
Corpus parse_jsonl(std::string_view text);
void write_jsonl(const Corpus& corpus, const std::filesystem::path& path);
std::string to_jsonl(const Corpus& corpus);

class StopwordSet {
public:
    StopwordSet() = default;
    explicit StopwordSet(std::unordered_set<std::string> words) : words_(std::move(words)) {}

    bool contains(std::string_view word) const { return words_.contains(std::string(word)); }
    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }

private:
    std::unordered_set<std::string> words_;
};

// The English list compiled into the library (data/stopwords_en.txt).
const StopwordSet& bundled_stopwords();
// One word per line; blank lines and lines starting with '#' are ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);
StopwordSet parse_stopwords(std::string_view text);

struct Token {
    std::string surface;
    std::string normalized;
    std::string stem;
    bool is_stopword = false;
    std::size_t sentence_index = 0;
    std::size_t position_in_doc = 0;
    // True when the text between this token and the previous one holds
    // anything other than whitespace, or this token opens a sentence.
    // Phrases never span such a break.
    bool phrase_break = true;
};

struct TokenizedDoc {
    std::vector<std::vector<Token>> sentences;

    std::size_t token_count() const;
    std::vector<Token> flat() const;
};

// ASCII case folding; bytes >= 0x80 are passed through unchanged.
std::string case_fold(std::string_view s);

// Classic Porter stemmer. Input is expected to be case-folded.
std::string stem(std::string_view word);

TokenizedDoc tokenize(std::string_view text, const StopwordSet& stopwords);
inline TokenizedDoc tokenize(const Document& doc, const StopwordSet& stopwords) {
    return tokenize(doc.abstract, stopwords);
}

struct CandidatePhrase {
    // Tokens of the first occurrence.
    std::vector<Token> tokens;
    std::string text;
    std::size_t doc_frequency = 0;
    // position_in_doc of the first token of every occurrence.
    std::vector<std::size_t> occurrences;
};

// Contiguous stopword-free n-grams (n <= max_len) inside one sentence and
// not crossing a phrase break, deduplicated by text in first-seen order.
std::vector<CandidatePhrase> candidate_phrases(const TokenizedDoc& tdoc, std::size_t max_len);

}  // namespace docmap
