#include "docmap/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "docmap/error.hpp"
#include "docmap/io.hpp"
#include "docmap/stopwords_data.hpp"

namespace docmap {
namespace {

bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Letters, digits and every byte of a multi-byte UTF-8 sequence.
bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
}

bool is_terminal(char c) {
    return c == '.' || c == '!' || c == '?';
}

}  // namespace

Corpus::Corpus(std::vector<Document> docs) {
    for (auto& d : docs) add(std::move(d));
}

void Corpus::add(Document doc) {
    if (doc.id.empty()) throw ContractError("document id must be non-empty");
    if (is_blank(doc.abstract)) throw ContractError("document '" + doc.id + "' has an empty abstract");
    if (!ids_.insert(doc.id).second) throw ContractError("duplicate document id '" + doc.id + "'");
    docs_.push_back(std::move(doc));
}

CorpusStats Corpus::stats() const {
    CorpusStats s;
    s.documents = docs_.size();
    std::size_t total = 0;
    for (const auto& d : docs_) {
        if (d.gold_keywords && !d.gold_keywords->empty()) {
            ++s.with_gold;
            total += d.gold_keywords->size();
        }
    }
    if (s.with_gold > 0) s.mean_gold_per_doc = static_cast<double>(total) / static_cast<double>(s.with_gold);
    return s;
}

Corpus parse_jsonl(std::string_view text) {
    Corpus corpus;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (is_blank(line)) {
            if (end == text.size()) break;
            continue;
        }
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        auto where = [&](const std::string& what) {
            return ParseError("line " + std::to_string(line_no) + ": " + what);
        };
        if (!obj.is_object()) throw where("expected a JSON object");
        Document doc;
        try {
            if (!obj.contains("id") || !obj["id"].is_string()) throw where("missing string field 'id'");
            doc.id = obj["id"].get<std::string>();
            if (obj.contains("title") && !obj["title"].is_null()) doc.title = obj["title"].get<std::string>();
            if (obj.contains("abstract") && !obj["abstract"].is_null())
                doc.abstract = obj["abstract"].get<std::string>();
            if (obj.contains("keywords") && !obj["keywords"].is_null())
                doc.gold_keywords = obj["keywords"].get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw where(e.what());
        }
        if (is_blank(doc.abstract)) {
            ++corpus.skipped;
            continue;
        }
        try {
            corpus.add(std::move(doc));
        } catch (const ContractError& e) {
            throw where(e.what());
        }
        if (end == text.size()) break;
    }
    return corpus;
}

Corpus load_jsonl(const std::filesystem::path& path) {
    return parse_jsonl(read_file(path));
}

std::string to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const auto& d : corpus.documents()) {
        nlohmann::ordered_json obj;
        obj["id"] = d.id;
        obj["title"] = d.title;
        obj["abstract"] = d.abstract;
        if (d.gold_keywords) obj["keywords"] = *d.gold_keywords;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
    write_file(path, to_jsonl(corpus));
}

StopwordSet parse_stopwords(std::string_view text) {
    std::unordered_set<std::string> words;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && is_space(line.back())) line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        words.insert(case_fold(line.substr(first)));
    }
    return StopwordSet(std::move(words));
}

const StopwordSet& bundled_stopwords() {
    static const StopwordSet set = parse_stopwords(detail::kBundledStopwords);
    return set;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    auto set = parse_stopwords(read_file(path));
    if (set.empty()) throw ParseError(path.string() + ": stopword file holds no entries");
    return set;
}

std::string case_fold(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::size_t TokenizedDoc::token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
}

std::vector<Token> TokenizedDoc::flat() const {
    std::vector<Token> out;
    out.reserve(token_count());
    for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
    return out;
}

TokenizedDoc tokenize(std::string_view text, const StopwordSet& stopwords) {
    TokenizedDoc out;
    std::vector<Token> current;
    std::size_t position = 0;
    bool pending_break = true;  // non-space text seen since the last token
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto close_sentence = [&] {
        if (!current.empty()) {
            out.sentences.push_back(std::move(current));
            current.clear();
        }
        pending_break = true;
    };

    while (i < n) {
        const char c = text[i];
        if (is_word_byte(c) || c == '-') {
            std::size_t j = i;
            while (j < n && (is_word_byte(text[j]) || text[j] == '-')) ++j;
            // Hyphens are kept only between word characters.
            std::size_t lo = i;
            std::size_t hi = j;
            while (lo < hi && text[lo] == '-') ++lo;
            while (hi > lo && text[hi - 1] == '-') --hi;
            if (lo > i) pending_break = true;
            if (lo < hi) {
                Token t;
                t.surface = std::string(text.substr(lo, hi - lo));
                t.normalized = case_fold(t.surface);
                t.stem = stem(t.normalized);
                t.is_stopword = stopwords.contains(t.normalized);
                t.sentence_index = out.sentences.size();
                t.position_in_doc = position++;
                t.phrase_break = pending_break || current.empty();
                current.push_back(std::move(t));
                pending_break = hi < j;
            }
            i = j;
            continue;
        }
        if (is_terminal(c) && (i + 1 == n || is_space(text[i + 1]))) {
            close_sentence();
            ++i;
            continue;
        }
        if (!is_space(c)) pending_break = true;
        ++i;
    }
    close_sentence();
    return out;
}

std::vector<CandidatePhrase> candidate_phrases(const TokenizedDoc& tdoc, std::size_t max_len) {
    if (max_len < 1 || max_len > 3) throw ContractError("candidate_phrases: max_len must be in [1, 3]");
    std::vector<CandidatePhrase> out;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& sentence : tdoc.sentences) {
        for (std::size_t start = 0; start < sentence.size(); ++start) {
            std::string text;
            for (std::size_t len = 1; len <= max_len && start + len <= sentence.size(); ++len) {
                const Token& t = sentence[start + len - 1];
                if (t.is_stopword) break;
                if (len > 1 && t.phrase_break) break;
                if (len > 1) text += ' ';
                text += t.normalized;
                auto [it, inserted] = index.try_emplace(text, out.size());
                if (inserted) {
                    CandidatePhrase c;
                    c.tokens.assign(sentence.begin() + static_cast<std::ptrdiff_t>(start),
                                    sentence.begin() + static_cast<std::ptrdiff_t>(start + len));
                    c.text = text;
                    out.push_back(std::move(c));
                }
                auto& c = out[it->second];
                ++c.doc_frequency;
                c.occurrences.push_back(sentence[start].position_in_doc);
            }
        }
    }
    return out;
}

}  // namespace docmap
