#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "docmap/extraction.hpp"

namespace docmap {
namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

bool is_acronym(const std::string& s) {
    if (s.size() < 2) return false;
    bool letter = false;
    for (char c : s) {
        if (is_lower(c)) return false;
        letter = letter || is_upper(c);
    }
    return letter;
}

bool is_capitalised(const std::string& s) {
    return s.size() > 1 && is_upper(s[0]) && std::count_if(s.begin(), s.end(), is_upper) == 1;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct TermStats {
    std::size_t order = 0;
    double tf = 0;
    double tf_upper = 0;
    double tf_acronym = 0;
    std::set<std::size_t> sentences;
    std::map<std::string, double> left;   // neighbour -> co-occurrence count
    std::map<std::string, double> right;
};

double distinct_ratio(const std::map<std::string, double>& neighbours) {
    if (neighbours.empty()) return 0.0;
    double total = 0;
    for (const auto& [w, c] : neighbours) total += c;
    return static_cast<double>(neighbours.size()) / total;
}

}  // namespace

std::vector<YakeTermFeatures> yake_term_features(const TokenizedDoc& tdoc) {
    std::unordered_map<std::string, TermStats> stats;
    for (const auto& sentence : tdoc.sentences) {
        for (std::size_t i = 0; i < sentence.size(); ++i) {
            const auto& tok = sentence[i];
            if (tok.is_stopword) continue;
            auto [it, inserted] = stats.try_emplace(tok.normalized);
            auto& s = it->second;
            if (inserted) s.order = stats.size() - 1;
            s.tf += 1;
            if (is_acronym(tok.surface)) {
                s.tf_acronym += 1;
            } else if (i > 0 && is_capitalised(tok.surface)) {
                s.tf_upper += 1;
            }
            s.sentences.insert(tok.sentence_index);
            // Window 1: the adjacent token on each side, unless punctuation
            // separates them.
            if (i > 0 && !tok.phrase_break) s.left[sentence[i - 1].normalized] += 1;
            if (i + 1 < sentence.size() && !sentence[i + 1].phrase_break) s.right[sentence[i + 1].normalized] += 1;
        }
    }
    if (stats.empty()) return {};

    std::vector<double> tfs;
    double max_tf = 0;
    for (const auto& [w, s] : stats) {
        tfs.push_back(s.tf);
        max_tf = std::max(max_tf, s.tf);
    }
    const double mean_tf = std::accumulate(tfs.begin(), tfs.end(), 0.0) / static_cast<double>(tfs.size());
    double var = 0;
    for (double t : tfs) var += (t - mean_tf) * (t - mean_tf);
    const double std_tf = std::sqrt(var / static_cast<double>(tfs.size()));
    const double sentences = static_cast<double>(tdoc.sentences.size());

    std::vector<YakeTermFeatures> out(stats.size());
    for (const auto& [w, s] : stats) {
        YakeTermFeatures f;
        f.term = w;
        f.tf = s.tf;
        f.tf_upper = s.tf_upper;
        f.tf_acronym = s.tf_acronym;
        f.casing = std::max(s.tf_upper, s.tf_acronym) / (1.0 + std::log(s.tf));
        std::vector<double> ids(s.sentences.begin(), s.sentences.end());
        f.position = std::log(std::log(3.0 + median(ids)));
        f.frequency = s.tf / (mean_tf + std_tf);
        f.relatedness = 1.0 + (distinct_ratio(s.left) + distinct_ratio(s.right)) * (s.tf / max_tf);
        f.dispersion = static_cast<double>(s.sentences.size()) / sentences;
        f.score = (f.relatedness * f.position) /
                  (f.casing + f.frequency / f.relatedness + f.dispersion / f.relatedness);
        out[s.order] = std::move(f);
    }
    return out;
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
    const auto longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        prev.swap(cur);
    }
    return 1.0 - static_cast<double>(prev[b.size()]) / static_cast<double>(longest);
}

KeywordSet extract_yake(std::string doc_id, const TokenizedDoc& tdoc, std::size_t k) {
    KeywordSet out{std::move(doc_id), Method::yake, {}};
    const auto features = yake_term_features(tdoc);
    std::unordered_map<std::string, double> term_score;
    for (const auto& f : features) term_score[f.term] = f.score;

    std::vector<ScoredKeyword> scored;
    for (const auto& c : candidate_phrases(tdoc, kYakeMaxPhrase)) {
        double prod = 1.0;
        double sum = 0.0;
        for (const auto& tok : c.tokens) {
            const double s = term_score.at(tok.normalized);
            prod *= s;
            sum += s;
        }
        scored.push_back({c.text, prod / (static_cast<double>(c.doc_frequency) * (1.0 + sum)), 0});
    }
    if (scored.empty()) return out;

    // Best first, then drop anything too similar to an already kept phrase.
    auto ranked = top_k(std::move(scored), std::numeric_limits<std::size_t>::max(), Better::lower);
    std::vector<ScoredKeyword> kept;
    for (auto& cand : ranked) {
        if (kept.size() == k) break;
        const bool near_duplicate = std::any_of(kept.begin(), kept.end(), [&](const ScoredKeyword& kw) {
            return levenshtein_similarity(kw.text, cand.text) >= kYakeDedupThreshold;
        });
        if (!near_duplicate) kept.push_back(std::move(cand));
    }
    out.keywords = top_k(std::move(kept), k, Better::lower);
    return out;
}

}  // namespace docmap
