#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "docmap/extraction.hpp"

namespace docmap {

std::vector<double> pagerank(const std::vector<std::vector<std::size_t>>& adjacency, double damping) {
    const auto n = adjacency.size();
    if (n == 0) return {};
    const double nn = static_cast<double>(n);
    std::vector<double> rank(n, 1.0 / nn);
    std::vector<double> next(n);
    for (int iter = 0; iter < kPageRankMaxIterations; ++iter) {
        double dangling = 0;
        for (std::size_t v = 0; v < n; ++v) {
            if (adjacency[v].empty()) dangling += rank[v];
        }
        const double base = (1.0 - damping) / nn + damping * dangling / nn;
        std::fill(next.begin(), next.end(), base);
        for (std::size_t v = 0; v < n; ++v) {
            if (adjacency[v].empty()) continue;
            const double share = damping * rank[v] / static_cast<double>(adjacency[v].size());
            for (auto u : adjacency[v]) next[u] += share;
        }
        double delta = 0;
        for (std::size_t v = 0; v < n; ++v) delta += std::abs(next[v] - rank[v]);
        rank.swap(next);
        if (delta < kPageRankTolerance) break;
    }
    return rank;
}

namespace {

struct WordGraph {
    std::vector<std::string> words;  // first-occurrence order
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> adjacency;
};

// Edges join consecutive content words of a sentence (window 2 over the
// stopword-filtered sequence).
WordGraph build_graph(const TokenizedDoc& tdoc) {
    WordGraph g;
    std::vector<std::set<std::size_t>> edges;
    for (const auto& sentence : tdoc.sentences) {
        std::optional<std::size_t> prev;
        for (const auto& tok : sentence) {
            if (tok.is_stopword) continue;
            auto [it, inserted] = g.index.try_emplace(tok.normalized, g.words.size());
            if (inserted) {
                g.words.push_back(tok.normalized);
                edges.emplace_back();
            }
            const auto v = it->second;
            if (prev && *prev != v) {
                edges[*prev].insert(v);
                edges[v].insert(*prev);
            }
            prev = v;
        }
    }
    for (const auto& e : edges) g.adjacency.emplace_back(e.begin(), e.end());
    return g;
}

}  // namespace

std::map<std::string, double> textrank_word_scores(const TokenizedDoc& tdoc) {
    const auto g = build_graph(tdoc);
    const auto rank = pagerank(g.adjacency);
    std::map<std::string, double> out;
    for (std::size_t v = 0; v < g.words.size(); ++v) out[g.words[v]] = rank[v];
    return out;
}

KeywordSet extract_textrank(std::string doc_id, const TokenizedDoc& tdoc, std::size_t k) {
    const auto g = build_graph(tdoc);
    const auto rank = pagerank(g.adjacency);

    // Keep the top third of the vocabulary (at least one word).
    std::vector<std::size_t> order(g.words.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rank[a] != rank[b]) return rank[a] > rank[b];
        return g.words[a] < g.words[b];
    });
    const auto keep = std::min(order.size(), std::max<std::size_t>(1, (order.size() + 2) / 3));
    std::vector<bool> selected(g.words.size(), false);
    for (std::size_t i = 0; i < keep; ++i) selected[order[i]] = true;

    std::vector<ScoredKeyword> scored;
    std::set<std::string> seen;
    auto flush = [&](std::string& text, double& score) {
        if (!text.empty() && seen.insert(text).second) scored.push_back({text, score, 0});
        text.clear();
        score = 0;
    };
    for (const auto& sentence : tdoc.sentences) {
        std::string text;
        double score = 0;
        for (const auto& tok : sentence) {
            const bool chosen = !tok.is_stopword && selected[g.index.at(tok.normalized)];
            if (!chosen || tok.phrase_break) flush(text, score);
            if (!chosen) continue;
            if (!text.empty()) text += ' ';
            text += tok.normalized;
            score += rank[g.index.at(tok.normalized)];
        }
        flush(text, score);
    }
    return {std::move(doc_id), Method::textrank, top_k(std::move(scored), k, Better::higher)};
}

}  // namespace docmap
