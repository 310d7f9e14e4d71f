#include <cmath>
#include <unordered_set>

#include "docmap/error.hpp"
#include "docmap/extraction.hpp"

namespace docmap {

void DocumentFrequency::add(const TokenizedDoc& tdoc) {
    ++documents;
    for (const auto& c : candidate_phrases(tdoc, kTfidfMaxPhrase)) ++df[c.text];
}

std::size_t DocumentFrequency::of(const std::string& phrase) const {
    auto it = df.find(phrase);
    return it == df.end() ? 0 : it->second;
}

DocumentFrequency build_document_frequency(const std::vector<TokenizedDoc>& docs) {
    DocumentFrequency df;
    for (const auto& d : docs) df.add(d);
    return df;
}

KeywordSet extract_tfidf(std::string doc_id, const TokenizedDoc& tdoc, const DocumentFrequency& df, std::size_t k) {
    if (df.documents == 0) throw ContractError("extract_tfidf: corpus size N must be positive");
    const double n = static_cast<double>(df.documents);
    std::vector<ScoredKeyword> scored;
    for (const auto& c : candidate_phrases(tdoc, kTfidfMaxPhrase)) {
        // A document outside the frequency table still counts itself once.
        const auto d = std::max<std::size_t>(df.of(c.text), 1);
        scored.push_back({c.text, static_cast<double>(c.doc_frequency) * std::log(n / static_cast<double>(d)), 0});
    }
    return {std::move(doc_id), Method::tfidf, top_k(std::move(scored), k, Better::higher)};
}

}  // namespace docmap
