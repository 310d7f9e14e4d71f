#include <map>
#include <set>

#include "docmap/error.hpp"
#include "docmap/extraction.hpp"

namespace docmap {
namespace {

// Maximal stopword/punctuation-delimited runs, as lists of normalized words.
std::vector<std::vector<std::string>> rake_phrases(const TokenizedDoc& tdoc) {
    std::vector<std::vector<std::string>> out;
    for (const auto& sentence : tdoc.sentences) {
        std::vector<std::string> current;
        for (const auto& tok : sentence) {
            if (tok.is_stopword || tok.phrase_break) {
                if (!current.empty()) out.push_back(std::move(current));
                current.clear();
            }
            if (!tok.is_stopword) current.push_back(tok.normalized);
        }
        if (!current.empty()) out.push_back(std::move(current));
    }
    return out;
}

}  // namespace

RakeMetric parse_rake_metric(std::string_view name) {
    if (name == "degree_over_freq") return RakeMetric::degree_over_freq;
    if (name == "freq") return RakeMetric::freq;
    if (name == "degree") return RakeMetric::degree;
    throw ValidationError("rake_metric: unknown metric '" + std::string(name) +
                          "' (expected degree_over_freq, freq or degree)");
}

std::string_view rake_metric_name(RakeMetric m) {
    switch (m) {
    case RakeMetric::degree_over_freq: return "degree_over_freq";
    case RakeMetric::freq: return "freq";
    case RakeMetric::degree: return "degree";
    }
    return "?";
}

std::map<std::string, double> rake_word_scores(const TokenizedDoc& tdoc, RakeMetric metric) {
    std::map<std::string, double> freq;
    std::map<std::string, double> degree;
    for (const auto& phrase : rake_phrases(tdoc)) {
        const auto len = static_cast<double>(phrase.size());
        for (const auto& w : phrase) {
            freq[w] += 1.0;
            degree[w] += len;
        }
    }
    std::map<std::string, double> score;
    for (const auto& [w, f] : freq) {
        switch (metric) {
        case RakeMetric::degree_over_freq: score[w] = degree[w] / f; break;
        case RakeMetric::freq: score[w] = f; break;
        case RakeMetric::degree: score[w] = degree[w]; break;
        }
    }
    return score;
}

KeywordSet extract_rake(std::string doc_id, const TokenizedDoc& tdoc, std::size_t k, RakeMetric metric) {
    const auto word_score = rake_word_scores(tdoc, metric);
    std::vector<ScoredKeyword> scored;
    std::set<std::string> seen;
    for (const auto& phrase : rake_phrases(tdoc)) {
        std::string text;
        double s = 0;
        for (const auto& w : phrase) {
            if (!text.empty()) text += ' ';
            text += w;
            s += word_score.at(w);
        }
        if (seen.insert(text).second) scored.push_back({std::move(text), s, 0});
    }
    return {std::move(doc_id), Method::rake, top_k(std::move(scored), k, Better::higher)};
}

}  // namespace docmap
