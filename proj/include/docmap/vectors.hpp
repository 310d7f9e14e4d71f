#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "docmap/corpus.hpp"
#include "docmap/matrix.hpp"

namespace docmap {

// Word -> dense vector, all of one dimension. Immutable once loaded.
class WordVectorStore {
public:
    WordVectorStore() = default;
    explicit WordVectorStore(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return index_.size(); }

    // Returns false (and keeps the existing entry) for a repeated word.
    bool insert(std::string word, std::span<const double> vec);
    // nullopt when out of vocabulary.
    std::optional<std::span<const double>> find(std::string_view word) const;

    // Load-time duplicate count.
    std::size_t duplicates = 0;

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> values_;
};

// Text format: "<count> <dim>" header then "word v1 ... v_dim" per line.
// `limit` caps the number of rows read.
WordVectorStore load_vec(const std::filesystem::path& path, std::optional<std::size_t> limit = std::nullopt);
WordVectorStore parse_vec(std::string_view text, std::optional<std::size_t> limit = std::nullopt);

struct DocVector {
    std::string doc_id;
    std::vector<double> vector;
    double oov_fraction = 0.0;
};

// Mean of the vectors of all in-vocabulary non-stopword token occurrences.
DocVector doc_vector(std::string doc_id, const TokenizedDoc& tdoc, const WordVectorStore& store);

// 0 when either argument is the zero vector.
double cosine(std::span<const double> u, std::span<const double> v);

// Stacks DocVectors into an n x d matrix.
Matrix stack(const std::vector<DocVector>& docs);

// TSV: id, oov_fraction, then the d components.
std::string doc_vectors_to_tsv(const std::vector<DocVector>& docs);
std::vector<DocVector> doc_vectors_from_tsv(std::string_view text);

}  // namespace docmap
