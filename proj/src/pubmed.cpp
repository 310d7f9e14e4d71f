#include "docmap/pubmed.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_set>

#include "docmap/io.hpp"
#include "docmap/xml.hpp"

namespace docmap::pubmed {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Collapse internal whitespace runs (XML line wrapping) to single spaces.
std::string squeeze(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

PubMedRecord read_article(const xml::Node& article) {
    PubMedRecord rec;
    const auto* citation = article.child("MedlineCitation");
    if (!citation) return rec;
    if (const auto* pmid = citation->child("PMID")) rec.pmid = trim(pmid->text_content());
    if (const auto* art = citation->child("Article")) {
        if (const auto* title = art->child("ArticleTitle")) rec.title = squeeze(title->text_content());
        if (const auto* abs = art->child("Abstract")) {
            for (const auto* section : abs->children_named("AbstractText")) {
                auto text = squeeze(section->text_content());
                if (!text.empty()) rec.abstract_sections.push_back(std::move(text));
            }
        }
    }
    for (const auto* list : citation->children_named("KeywordList")) {
        for (const auto* kw : list->children_named("Keyword")) {
            auto text = squeeze(kw->text_content());
            if (!text.empty()) rec.author_keywords.push_back(std::move(text));
        }
    }
    return rec;
}

bool numeric(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void append_records(std::string_view xml_text, Corpus& corpus, std::unordered_set<std::string>& seen) {
    for (auto& rec : parse_records(xml_text)) {
        if (!numeric(rec.pmid) || rec.abstract_sections.empty() || !seen.insert(rec.pmid).second) {
            ++corpus.skipped;
            continue;
        }
        Document doc;
        doc.id = rec.pmid;
        doc.title = std::move(rec.title);
        doc.abstract = rec.abstract();
        if (!rec.author_keywords.empty()) doc.gold_keywords = std::move(rec.author_keywords);
        corpus.add(std::move(doc));
    }
}

}  // namespace

std::string PubMedRecord::abstract() const {
    std::string out;
    for (const auto& s : abstract_sections) {
        if (!out.empty()) out += ' ';
        out += s;
    }
    return out;
}

std::vector<PubMedRecord> parse_records(std::string_view xml_text) {
    const auto root = xml::parse(xml_text);
    if (root.name != "PubmedArticleSet") {
        throw ParseError("expected <PubmedArticleSet> root, found <" + root.name + ">");
    }
    std::vector<PubMedRecord> out;
    for (const auto* article : root.children_named("PubmedArticle")) out.push_back(read_article(*article));
    return out;
}

Corpus parse_efetch_xml_text(std::string_view xml_text) {
    Corpus corpus;
    std::unordered_set<std::string> seen;
    append_records(xml_text, corpus, seen);
    if (corpus.empty()) throw EmptyCorpusError("no PubMed record with an abstract was found");
    return corpus;
}

Corpus parse_efetch_xml(const std::filesystem::path& path) {
    try {
        return parse_efetch_xml_text(read_file(path));
    } catch (const EmptyCorpusError& e) {
        throw EmptyCorpusError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Corpus parse_efetch_files(const std::vector<std::filesystem::path>& paths) {
    Corpus corpus;
    std::unordered_set<std::string> seen;
    for (const auto& p : paths) {
        try {
            append_records(read_file(p), corpus, seen);
        } catch (const ParseError& e) {
            throw ParseError(p.string() + ": " + e.what());
        }
    }
    if (corpus.empty()) throw EmptyCorpusError("no PubMed record with an abstract was found");
    return corpus;
}

Clock::duration SystemClock::now() {
    return std::chrono::duration_cast<duration>(std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(duration d) {
    if (d.count() > 0) std::this_thread::sleep_for(d);
}

std::string url_encode(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if ((u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9') || c == '-' || c == '_' ||
            c == '.' || c == '~') {
            out += c;
        } else {
            out += '%';
            out += hex[u >> 4];
            out += hex[u & 0xF];
        }
    }
    return out;
}

namespace {

class Session {
public:
    Session(const FetchOptions& opt, HttpTransport& http, Clock& clock)
        : opt_(opt), http_(http), clock_(clock), min_spacing_(opt.api_key ? 0.1 : 1.0 / 3.0) {}

    std::string get(const std::string& target) {
        std::string full = target;
        if (opt_.api_key) full += "&api_key=" + url_encode(*opt_.api_key);
        auto backoff = opt_.initial_backoff;
        std::string last_error;
        for (int attempt = 1; attempt <= opt_.max_attempts; ++attempt) {
            throttle();
            HttpResponse r;
            try {
                r = http_.get(full);
            } catch (const std::exception& e) {
                r.status = 0;
                r.body = e.what();
            }
            if (r.status == 200) return std::move(r.body);
            last_error = r.status == 0 ? "transport error: " + r.body : "HTTP " + std::to_string(r.status);
            if (attempt < opt_.max_attempts) {
                clock_.sleep_for(backoff);
                backoff *= 2.0;
            }
        }
        throw FetchError("request failed after " + std::to_string(opt_.max_attempts) + " attempts (" +
                         last_error + "): " + target);
    }

private:
    const FetchOptions& opt_;
    HttpTransport& http_;
    Clock& clock_;
    Clock::duration min_spacing_;
    std::optional<Clock::duration> last_;

    void throttle() {
        if (last_) {
            const auto wait = *last_ + min_spacing_ - clock_.now();
            if (wait.count() > 0) clock_.sleep_for(wait);
        }
        last_ = clock_.now();
    }
};

std::vector<std::string> parse_id_list(std::string_view body) {
    const auto root = xml::parse(body);
    std::vector<std::string> ids;
    if (const auto* list = root.child("IdList")) {
        for (const auto* id : list->children_named("Id")) ids.push_back(trim(id->text_content()));
    }
    return ids;
}

}  // namespace

FetchResult fetch(const FetchOptions& options, HttpTransport& http, Clock& clock) {
    if (options.max_records < 1) throw ContractError("fetch: max_records must be >= 1");
    if (options.batch_size < 1 || options.batch_size > 200) throw ContractError("fetch: batch size must be in [1, 200]");
    if (options.query.empty()) throw ContractError("fetch: empty query");

    Session session(options, http, clock);
    const std::string search = "/entrez/eutils/esearch.fcgi?db=pubmed&term=" + url_encode(options.query) +
                               "&retmax=" + std::to_string(options.max_records);
    FetchResult result;
    try {
        result.pmids = parse_id_list(session.get(search));
    } catch (const ParseError& e) {
        throw FetchError(std::string("malformed esearch response: ") + e.what());
    }
    if (result.pmids.size() > options.max_records) result.pmids.resize(options.max_records);
    if (result.pmids.empty()) throw FetchError("no results for query '" + options.query + "'");

    for (std::size_t start = 0, index = 0; start < result.pmids.size(); start += options.batch_size, ++index) {
        const auto end = std::min(result.pmids.size(), start + options.batch_size);
        std::string ids;
        for (auto i = start; i < end; ++i) {
            if (!ids.empty()) ids += ',';
            ids += result.pmids[i];
        }
        auto body = session.get("/entrez/eutils/efetch.fcgi?db=pubmed&id=" + ids + "&retmode=xml");
        auto path = options.out_dir / ("batch_" + std::to_string(index) + ".xml");
        write_file(path, body);
        result.files.push_back(std::move(path));
    }
    return result;
}

}  // namespace docmap::pubmed
