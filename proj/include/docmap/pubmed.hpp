#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docmap/corpus.hpp"
#include "docmap/error.hpp"

namespace docmap::pubmed {

struct PubMedRecord {
    std::string pmid;
    std::string title;
    // AbstractText bodies in document order; section labels are dropped.
    std::vector<std::string> abstract_sections;
    std::vector<std::string> author_keywords;

    std::string abstract() const;  // sections joined with single spaces
};

class EmptyCorpusError : public ParseError {
public:
    using ParseError::ParseError;
};

// All PubmedArticle records in document order, with or without abstracts.
std::vector<PubMedRecord> parse_records(std::string_view xml);

// Records without abstract text are skipped and counted in Corpus::skipped.
// Throws EmptyCorpusError when nothing is extractable.
Corpus parse_efetch_xml(const std::filesystem::path& path);
Corpus parse_efetch_xml_text(std::string_view xml);
// Several batch files (in the given order) merged into one corpus; repeated
// PMIDs after the first are counted as skipped.
Corpus parse_efetch_files(const std::vector<std::filesystem::path>& paths);

struct HttpResponse {
    int status = 0;
    std::string body;
};

// GET against the E-utilities host; `target` is path plus query string.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& target) = 0;
};

class Clock {
public:
    using duration = std::chrono::duration<double>;
    virtual ~Clock() = default;
    virtual duration now() = 0;
    virtual void sleep_for(duration d) = 0;
};

class SystemClock final : public Clock {
public:
    duration now() override;
    void sleep_for(duration d) override;
};

struct FetchOptions {
    std::string query;
    std::size_t max_records = 0;
    std::optional<std::string> api_key;
    std::filesystem::path out_dir;
    std::size_t batch_size = 200;
    int max_attempts = 3;
    Clock::duration initial_backoff{1.0};
};

struct FetchResult {
    std::vector<std::string> pmids;
    std::vector<std::filesystem::path> files;
};

// esearch then batched efetch, writing out_dir/batch_{index}.xml.
// Requests are spaced >= 1/3 s apart (0.1 s with an API key).
FetchResult fetch(const FetchOptions& options, HttpTransport& http, Clock& clock);

// HTTPS transport for eutils.ncbi.nlm.nih.gov.
std::unique_ptr<HttpTransport> make_eutils_transport();

std::string url_encode(std::string_view s);

}  // namespace docmap::pubmed
