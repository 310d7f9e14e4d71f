#include <algorithm>

#include "docmap/extraction.hpp"

namespace docmap {

KeywordSet extract_embed(std::string doc_id, const TokenizedDoc& tdoc, const DocVector& doc_vec,
                         const WordVectorStore& store, std::size_t k) {
    KeywordSet out{std::move(doc_id), Method::embed, {}};
    const bool zero = std::all_of(doc_vec.vector.begin(), doc_vec.vector.end(), [](double v) { return v == 0.0; });
    if (zero || doc_vec.vector.size() != store.dim()) return out;

    std::vector<ScoredKeyword> scored;
    std::vector<double> mean(store.dim());
    for (const auto& c : candidate_phrases(tdoc, kEmbedMaxPhrase)) {
        std::fill(mean.begin(), mean.end(), 0.0);
        bool complete = true;
        for (const auto& tok : c.tokens) {
            auto v = store.find(tok.normalized);
            if (!v) {
                complete = false;
                break;
            }
            for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += (*v)[d];
        }
        if (!complete) continue;
        for (auto& x : mean) x /= static_cast<double>(c.tokens.size());
        scored.push_back({c.text, cosine(mean, doc_vec.vector), 0});
    }
    if (!scored.empty()) out.keywords = top_k(std::move(scored), k, Better::higher);
    return out;
}

}  // namespace docmap
