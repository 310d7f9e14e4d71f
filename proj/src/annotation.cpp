#include "docmap/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <json.hpp>

#include "docmap/clustering.hpp"
#include "docmap/error.hpp"

namespace docmap {
namespace {

double log_choose(long a, long b) {
    return std::lgamma(static_cast<double>(a) + 1.0) - std::lgamma(static_cast<double>(b) + 1.0) -
           std::lgamma(static_cast<double>(a - b) + 1.0);
}

}  // namespace

Presence keyword_presence(const std::vector<KeywordSet>& sets) {
    Presence out;
    std::set<std::string> seen;
    for (const auto& s : sets) {
        if (!seen.insert(s.doc_id).second) throw ContractError("keyword_presence: duplicate document id '" + s.doc_id + "'");
        for (const auto& kw : s.keywords) out[kw.text].insert(s.doc_id);
    }
    return out;
}

double hypergeom_sf(long k, long K, long n, long N) {
    if (N < 0 || n < 0 || K < 0 || k < 0 || n > N || K > N || k > n || k > K) {
        throw ContractError("hypergeom_sf: need 0 <= k <= n <= N and k <= K <= N (k=" + std::to_string(k) +
                            ", K=" + std::to_string(K) + ", n=" + std::to_string(n) + ", N=" + std::to_string(N) + ")");
    }
    const long lowest = std::max(0L, n - (N - K));
    if (k <= lowest) return 1.0;
    const long highest = std::min(K, n);
    const double denom = log_choose(N, n);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(highest - k + 1));
    for (long i = k; i <= highest; ++i) terms.push_back(log_choose(K, i) + log_choose(N - K, n - i) - denom);
    const double top = *std::max_element(terms.begin(), terms.end());
    double s = 0;
    for (double t : terms) s += std::exp(t - top);
    return std::min(1.0, std::exp(top + std::log(s)));
}

LabelResult label_clusters(const Presence& presence, const std::vector<std::string>& ids,
                           std::span<const int> assignments, int num_clusters, const LabelParams& params) {
    if (!(params.alpha > 0 && params.alpha < 1)) throw ContractError("label_clusters: alpha must be in (0, 1)");
    if (ids.size() != assignments.size()) throw ContractError("label_clusters: ids and assignments differ in length");
    std::unordered_map<std::string, int> cluster_of;
    std::vector<long> size(static_cast<std::size_t>(std::max(num_clusters, 0)), 0);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const int c = assignments[i];
        if (c >= num_clusters) throw ContractError("label_clusters: assignment exceeds cluster count");
        cluster_of[ids[i]] = c;
        if (c >= 0) ++size[static_cast<std::size_t>(c)];
    }
    const long total = static_cast<long>(ids.size());

    LabelResult result;
    std::vector<std::vector<EnrichedKeyword>> tested(size.size());
    for (int c = 0; c < num_clusters; ++c) {
        if (size[static_cast<std::size_t>(c)] == 0) result.empty_clusters.push_back(c);
    }
    for (const auto& [text, docs] : presence) {
        std::vector<long> in_cluster(size.size(), 0);
        long background = 0;
        for (const auto& id : docs) {
            auto it = cluster_of.find(id);
            if (it == cluster_of.end()) continue;
            ++background;
            if (it->second >= 0) ++in_cluster[static_cast<std::size_t>(it->second)];
        }
        for (std::size_t c = 0; c < size.size(); ++c) {
            if (in_cluster[c] < 1) continue;
            EnrichedKeyword e;
            e.text = text;
            e.cluster = static_cast<int>(c);
            e.k = in_cluster[c];
            e.n = size[c];
            e.K_bg = background;
            e.N_bg = total;
            e.p_value = hypergeom_sf(e.k, e.K_bg, e.n, e.N_bg);
            e.q_value = e.p_value;
            tested[c].push_back(std::move(e));
        }
    }

    if (params.fdr) {
        std::vector<EnrichedKeyword*> all;
        for (auto& t : tested) {
            for (auto& e : t) all.push_back(&e);
        }
        std::stable_sort(all.begin(), all.end(), [](auto* a, auto* b) { return a->p_value < b->p_value; });
        const double m = static_cast<double>(all.size());
        double running = 1.0;
        for (std::size_t r = all.size(); r-- > 0;) {
            running = std::min(running, all[r]->p_value * m / static_cast<double>(r + 1));
            all[r]->q_value = running;
        }
    }

    for (std::size_t c = 0; c < tested.size(); ++c) {
        if (size[c] == 0) continue;
        ClusterLabels cl;
        cl.cluster = static_cast<int>(c);
        for (auto& e : tested[c]) {
            const double stat = params.fdr ? e.q_value : e.p_value;
            // Enrichment direction: cluster rate at least the background rate.
            const bool enriched = e.k * e.N_bg >= e.K_bg * e.n;
            if (stat < params.alpha && enriched) cl.labels.push_back(std::move(e));
        }
        std::stable_sort(cl.labels.begin(), cl.labels.end(), [](const EnrichedKeyword& a, const EnrichedKeyword& b) {
            if (a.p_value != b.p_value) return a.p_value < b.p_value;
            if (a.k != b.k) return a.k > b.k;
            return a.text < b.text;
        });
        if (cl.labels.size() > params.top_m) cl.labels.resize(params.top_m);
        result.clusters.push_back(std::move(cl));
    }
    return result;
}

std::string labels_to_json(const std::vector<ClusterLabels>& labels) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& cl : labels) {
        nlohmann::ordered_json j;
        j["cluster"] = cl.cluster;
        auto ls = nlohmann::ordered_json::array();
        for (const auto& e : cl.labels) {
            ls.push_back({{"text", e.text}, {"p", e.p_value}, {"k", e.k}, {"n", e.n}, {"K", e.K_bg}, {"N", e.N_bg}});
        }
        j["labels"] = std::move(ls);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<ClusterLabels> labels_from_json(std::string_view text) {
    std::vector<ClusterLabels> out;
    try {
        const auto arr = nlohmann::json::parse(text);
        for (const auto& j : arr) {
            ClusterLabels cl;
            cl.cluster = j.at("cluster").get<int>();
            for (const auto& l : j.at("labels")) {
                EnrichedKeyword e;
                e.text = l.at("text").get<std::string>();
                e.cluster = cl.cluster;
                e.p_value = l.at("p").get<double>();
                e.k = l.at("k").get<long>();
                e.n = l.at("n").get<long>();
                e.K_bg = l.at("K").get<long>();
                e.N_bg = l.at("N").get<long>();
                cl.labels.push_back(std::move(e));
            }
            out.push_back(std::move(cl));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("labels JSON: ") + e.what());
    }
    return out;
}

}  // namespace docmap
