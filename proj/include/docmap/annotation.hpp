#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docmap/extraction.hpp"

namespace docmap {

// keyword -> ids of the documents whose top-k set lists it.
using Presence = std::map<std::string, std::set<std::string>>;

// Throws ContractError on a repeated document id.
Presence keyword_presence(const std::vector<KeywordSet>& sets);

// Upper tail P(X >= k) of the hypergeometric distribution: K marked items
// among N, n drawn. Summed in log space from log-gamma terms.
double hypergeom_sf(long k, long K, long n, long N);

struct EnrichedKeyword {
    std::string text;
    int cluster = 0;
    long k = 0;     // cluster documents listing the keyword
    long n = 0;     // cluster size
    long K_bg = 0;  // corpus documents listing the keyword
    long N_bg = 0;  // corpus size, unassigned documents included
    double p_value = 1.0;
    double q_value = 1.0;  // Benjamini-Hochberg, only meaningful with fdr
};

struct ClusterLabels {
    int cluster = 0;
    std::vector<EnrichedKeyword> labels;  // p ascending, k descending, text
};

struct LabelParams {
    double alpha = 0.05;
    std::size_t top_m = 5;
    // Filter on BH-adjusted q-values (over every test of the run) instead of raw p.
    bool fdr = false;
};

struct LabelResult {
    std::vector<ClusterLabels> clusters;  // non-empty clusters only
    std::vector<int> empty_clusters;
};

// `ids` and `assignments` are aligned; kUnassigned documents count toward the
// background only. Clusters are 0..num_clusters-1.
LabelResult label_clusters(const Presence& presence, const std::vector<std::string>& ids,
                           std::span<const int> assignments, int num_clusters, const LabelParams& params);

std::string labels_to_json(const std::vector<ClusterLabels>& labels);
std::vector<ClusterLabels> labels_from_json(std::string_view text);

}  // namespace docmap
