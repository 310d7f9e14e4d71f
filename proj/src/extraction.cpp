#include "docmap/extraction.hpp"

#include <algorithm>

#include <json.hpp>

#include "docmap/error.hpp"

namespace docmap {

std::string_view method_name(Method m) {
    switch (m) {
    case Method::tfidf: return "tfidf";
    case Method::yake: return "yake";
    case Method::rake: return "rake";
    case Method::textrank: return "textrank";
    case Method::embed: return "embed";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (auto m : kAllMethods) {
        if (method_name(m) == name) return m;
    }
    throw ValidationError("method: unknown keyword extractor '" + std::string(name) +
                          "' (expected tfidf, yake, rake, textrank or embed)");
}

std::vector<ScoredKeyword> top_k(std::vector<ScoredKeyword> scored, std::size_t k, Better better) {
    if (k < 1) throw ContractError("top_k: k must be >= 1");
    std::stable_sort(scored.begin(), scored.end(), [better](const ScoredKeyword& a, const ScoredKeyword& b) {
        if (a.score != b.score) return better == Better::higher ? a.score > b.score : a.score < b.score;
        return a.text < b.text;
    });
    if (scored.size() > k) scored.resize(k);
    for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i + 1);
    return scored;
}

std::vector<KeywordSet> extract_all(Method method, const std::vector<std::string>& ids,
                                    const std::vector<TokenizedDoc>& docs, std::size_t k,
                                    const ExtractionInputs& inputs) {
    if (ids.size() != docs.size()) throw ContractError("extract_all: ids and documents differ in length");
    if (method == Method::tfidf && !inputs.df) throw ContractError("extract_all: tfidf needs document frequencies");
    if (method == Method::embed && (!inputs.store || !inputs.doc_vectors || inputs.doc_vectors->size() != docs.size())) {
        throw ContractError("extract_all: embed needs word vectors and aligned document vectors");
    }
    std::vector<KeywordSet> out(docs.size());
    const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        switch (method) {
        case Method::tfidf: out[u] = extract_tfidf(ids[u], docs[u], *inputs.df, k); break;
        case Method::yake: out[u] = extract_yake(ids[u], docs[u], k); break;
        case Method::rake: out[u] = extract_rake(ids[u], docs[u], k, inputs.rake_metric); break;
        case Method::textrank: out[u] = extract_textrank(ids[u], docs[u], k); break;
        case Method::embed:
            out[u] = extract_embed(ids[u], docs[u], (*inputs.doc_vectors)[u], *inputs.store, k);
            break;
        }
    }
    return out;
}

std::string keywords_to_jsonl(const std::vector<KeywordSet>& sets) {
    std::string out;
    for (const auto& s : sets) {
        nlohmann::ordered_json j;
        j["id"] = s.doc_id;
        j["method"] = method_name(s.method);
        auto arr = nlohmann::ordered_json::array();
        for (const auto& kw : s.keywords) arr.push_back({{"text", kw.text}, {"score", kw.score}, {"rank", kw.rank}});
        j["keywords"] = std::move(arr);
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<KeywordSet> keywords_from_jsonl(std::string_view text) {
    std::vector<KeywordSet> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            KeywordSet s;
            s.doc_id = j.at("id").get<std::string>();
            s.method = parse_method(j.at("method").get<std::string>());
            for (const auto& kw : j.at("keywords")) {
                s.keywords.push_back({kw.at("text").get<std::string>(), kw.at("score").get<double>(),
                                      kw.at("rank").get<int>()});
            }
            out.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("keywords line " + std::to_string(line_no) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ParseError("keywords line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace docmap
