#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "docmap/corpus.hpp"
#include "docmap/extraction.hpp"
#include "docmap/vectors.hpp"

namespace docmap {

struct PipelineConfig {
    std::filesystem::path corpus;   // .jsonl, or PubMed efetch .xml
    std::filesystem::path vectors;  // textual .vec
    std::filesystem::path out_dir = "docmap_out";
    std::optional<std::filesystem::path> stopwords;
    std::optional<std::size_t> vectors_limit;

    std::size_t k_keywords = 20;
    Method method = Method::yake;
    RakeMetric rake_metric = RakeMetric::degree_over_freq;
    std::vector<Method> eval_methods{std::begin(kAllMethods), std::end(kAllMethods)};

    double perplexity = 30.0;
    int tsne_iterations = 1000;
    double learning_rate = 200.0;

    int k_clusters = 9;
    int gmm_restarts = 5;
    double assign_threshold = 0.6;

    double alpha = 0.05;
    std::size_t labels_per_cluster = 5;
    std::size_t exemplars_per_cluster = 3;
    bool fdr = false;
    bool f1_of_means = false;

    std::uint64_t seed = 0;
    int threads = 0;  // 0 = OpenMP default
};

// Applies the keys of `j` over `base`. Unknown keys and wrong types raise
// ValidationError naming the field; range checks are in validate().
PipelineConfig apply_config(PipelineConfig base, const nlohmann::json& j);
// File values first, then `overrides` (e.g. collected CLI flags). An empty
// file counts as {}.
PipelineConfig resolve_config(const std::optional<std::filesystem::path>& file, const nlohmann::json& overrides);
void validate(const PipelineConfig& config);
// `threads` is left out: results do not depend on it.
nlohmann::ordered_json config_to_json(const PipelineConfig& config, bool include_out_dir = true);

// A .xml file is read as PubMed efetch output, a directory as every *.xml
// inside it (sorted by name), anything else as corpus JSONL.
Corpus load_corpus(const std::filesystem::path& path);
std::vector<TokenizedDoc> tokenize_all(const Corpus& corpus, const StopwordSet& stopwords);
std::vector<DocVector> compute_doc_vectors(const Corpus& corpus, const std::vector<TokenizedDoc>& docs,
                                           const WordVectorStore& store);

// Sub-seeds for the stochastic stages, derived from the global seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);

struct ArtifactEntry {
    std::string path;  // relative to out_dir
    std::string kind;
    std::string sha256;
    std::size_t bytes = 0;
};

struct PipelineResult {
    std::vector<ArtifactEntry> artifacts;
    std::vector<std::string> notices;
    std::string manifest_json;
};

// Runs every stage in order and writes out_dir/manifest.json. A failing stage
// aborts with its name in the message; artifacts already written stay.
PipelineResult run_pipeline(const PipelineConfig& config);

// Recomputes the hash of every artifact listed in a manifest; returns the
// paths that no longer match.
std::vector<std::string> verify_manifest(const std::filesystem::path& out_dir);

}  // namespace docmap
