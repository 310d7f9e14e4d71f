#pragma once

// Planted-topic corpora with matching word vectors, for the end-to-end
// checks. Topic t owns words "t<t>w<i>"; a few shared filler words carry no
// topic signal.

#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "docmap/corpus.hpp"
#include "docmap/io.hpp"

namespace docmap::testing {

struct SyntheticParams {
    int topics = 5;
    int docs_per_topic = 60;
    int words_per_topic = 20;
    int sentences = 6;
    int words_per_sentence = 9;
    int dim = 16;
    double vector_noise = 0.15;
    double generic_share = 0.15;  // words shared by every topic; the rest of the non-topic half is filler
    bool gold = true;
    std::uint64_t seed = 7;
};

struct SyntheticData {
    Corpus corpus;
    std::vector<int> topic;                       // planted topic per document
    std::vector<std::vector<std::string>> vocab;  // per topic
    std::string vec_text;
};

inline std::string topic_word(int t, int i) {
    // Letters only so the stemmer leaves the word alone.
    std::string w = "topic";
    w += static_cast<char>('a' + t);
    w += "word";
    w += static_cast<char>('a' + i % 26);
    if (i >= 26) w += static_cast<char>('a' + i / 26);
    return w;
}

inline SyntheticData make_synthetic(const SyntheticParams& params) {
    static const char* kFiller[] = {"the", "of", "and", "in", "with", "for", "was", "were", "to", "a"};
    static const char* kGeneric[] = {"result", "method", "analysis", "sample", "effect", "level", "group", "data"};
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SyntheticData out;
    out.vocab.resize(static_cast<std::size_t>(params.topics));
    for (int t = 0; t < params.topics; ++t) {
        for (int i = 0; i < params.words_per_topic; ++i) out.vocab[static_cast<std::size_t>(t)].push_back(topic_word(t, i));
    }

    // Vectors: one random unit centroid per topic, words scattered around it.
    std::ostringstream vec;
    const int generic_n = static_cast<int>(std::size(kGeneric));
    vec << params.topics * params.words_per_topic + generic_n << ' ' << params.dim << '\n';
    for (int t = 0; t < params.topics; ++t) {
        std::vector<double> c(static_cast<std::size_t>(params.dim));
        double norm = 0;
        for (auto& v : c) {
            v = gauss(rng);
            norm += v * v;
        }
        for (auto& v : c) v /= std::sqrt(norm);
        for (const auto& w : out.vocab[static_cast<std::size_t>(t)]) {
            vec << w;
            for (double v : c) vec << ' ' << format_sig(v + params.vector_noise * gauss(rng), 6);
            vec << '\n';
        }
    }
    for (const char* w : kGeneric) {
        vec << w;
        for (int d = 0; d < params.dim; ++d) vec << ' ' << format_sig(0.3 * gauss(rng), 6);
        vec << '\n';
    }
    out.vec_text = vec.str();

    std::uniform_int_distribution<int> pick_word(0, params.words_per_topic - 1);
    std::uniform_int_distribution<int> pick_filler(0, static_cast<int>(std::size(kFiller)) - 1);
    std::uniform_int_distribution<int> pick_generic(0, generic_n - 1);
    int id = 0;
    for (int d = 0; d < params.docs_per_topic; ++d) {
        for (int t = 0; t < params.topics; ++t) {
            const auto& words = out.vocab[static_cast<std::size_t>(t)];
            std::string text;
            for (int s = 0; s < params.sentences; ++s) {
                for (int w = 0; w < params.words_per_sentence; ++w) {
                    const double u = unit(rng);
                    std::string word;
                    if (u < 0.5) {
                        word = words[static_cast<std::size_t>(pick_word(rng))];
                    } else if (u < 1.0 - params.generic_share) {
                        word = kFiller[pick_filler(rng)];
                    } else {
                        word = kGeneric[pick_generic(rng)];
                    }
                    if (w == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
                    if (!text.empty()) text += ' ';
                    text += word;
                }
                text += '.';
            }
            Document doc;
            doc.id = "doc" + std::to_string(id++);
            doc.title = "Synthetic document " + doc.id;
            doc.abstract = text;
            if (params.gold) {
                // Gold keywords: three topic words the document actually uses.
                std::vector<std::string> gold;
                for (const auto& w : words) {
                    if (gold.size() == 3) break;
                    if (text.find(w) != std::string::npos) gold.push_back(w);
                }
                doc.gold_keywords = gold;
            }
            out.topic.push_back(t);
            out.corpus.add(std::move(doc));
        }
    }
    return out;
}

// Adjusted Rand index; entries equal to `ignore` in `a` count as one extra
// singleton class each.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    std::map<std::pair<int, int>, long> joint;
    std::map<int, long> ca, cb;
    int next_singleton = -1000000;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int la = a[i] < 0 ? next_singleton-- : a[i];
        ++joint[{la, b[i]}];
        ++ca[la];
        ++cb[b[i]];
    }
    auto c2 = [](long x) { return static_cast<double>(x) * static_cast<double>(x - 1) / 2.0; };
    double sum_joint = 0, sum_a = 0, sum_b = 0;
    for (const auto& [k, v] : joint) sum_joint += c2(v);
    for (const auto& [k, v] : ca) sum_a += c2(v);
    for (const auto& [k, v] : cb) sum_b += c2(v);
    const double total = c2(static_cast<long>(a.size()));
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (sum_joint - expected) / (max_index - expected);
}

}  // namespace docmap::testing
