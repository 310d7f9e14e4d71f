#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "docmap/corpus.hpp"
#include "docmap/error.hpp"
#include "docmap/extraction.hpp"

namespace docmap {

class NoGoldKeywordsError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Case-fold, punctuation to spaces, Porter-stem every word, single-space join.
std::string normalize_keyword(std::string_view keyword);

// Matches among the predictions, each gold keyword used at most once.
std::size_t match(const std::vector<std::string>& predicted, const std::vector<std::string>& gold);

struct Prf {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

// Precision over min(n, |predictions|) so short lists are not penalised.
Prf prf_at_n(const KeywordSet& predicted, const std::vector<std::string>& gold, std::size_t n);

struct EvalRow {
    std::size_t n = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

struct EvalReport {
    std::string method;
    std::vector<EvalRow> rows;  // n = 1..k
    std::size_t docs_evaluated = 0;
};

struct EvalOptions {
    // F1 of the averaged P and R instead of the average per-document F1.
    bool f1_of_means = false;
};

// Macro averages over documents with at least one gold keyword.
EvalReport evaluate(const std::vector<KeywordSet>& sets, const Corpus& corpus, std::size_t k,
                    const EvalOptions& options = {});

// "method,n,precision,recall,f1", 6 decimals.
std::string reports_to_csv(const std::vector<EvalReport>& reports);
// "method,n,recall,precision".
std::string pr_curve_to_csv(const std::vector<EvalReport>& reports);
std::vector<EvalReport> reports_from_csv(std::string_view text);

}  // namespace docmap
