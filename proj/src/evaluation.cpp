#include "docmap/evaluation.hpp"

#include <algorithm>
#include <unordered_map>

#include "docmap/io.hpp"

namespace docmap {
namespace {

double f1_of(double p, double r) {
    return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
}

bool is_ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

std::string normalize_keyword(std::string_view keyword) {
    std::string folded = case_fold(keyword);
    for (auto& c : folded) {
        if (static_cast<unsigned char>(c) < 0x80 && !is_ascii_alnum(c)) c = ' ';
    }
    std::string out;
    std::size_t i = 0;
    while (i < folded.size()) {
        while (i < folded.size() && folded[i] == ' ') ++i;
        auto j = i;
        while (j < folded.size() && folded[j] != ' ') ++j;
        if (j > i) {
            if (!out.empty()) out += ' ';
            out += stem(std::string_view(folded).substr(i, j - i));
        }
        i = j;
    }
    return out;
}

std::size_t match(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
    std::unordered_map<std::string, std::size_t> remaining;
    for (const auto& g : gold) {
        auto norm = normalize_keyword(g);
        if (!norm.empty()) ++remaining[norm];
    }
    std::size_t hits = 0;
    for (const auto& p : predicted) {
        auto it = remaining.find(normalize_keyword(p));
        if (it != remaining.end() && it->second > 0) {
            --it->second;
            ++hits;
        }
    }
    return hits;
}

Prf prf_at_n(const KeywordSet& predicted, const std::vector<std::string>& gold, std::size_t n) {
    if (gold.empty()) throw ContractError("prf_at_n: gold keyword list is empty");
    if (n < 1) throw ContractError("prf_at_n: n must be >= 1");
    std::vector<std::string> head;
    for (std::size_t i = 0; i < predicted.keywords.size() && i < n; ++i) head.push_back(predicted.keywords[i].text);
    const auto hits = static_cast<double>(match(head, gold));
    Prf r;
    r.precision = head.empty() ? 0.0 : hits / static_cast<double>(head.size());
    r.recall = hits / static_cast<double>(gold.size());
    r.f1 = f1_of(r.precision, r.recall);
    return r;
}

EvalReport evaluate(const std::vector<KeywordSet>& sets, const Corpus& corpus, std::size_t k,
                    const EvalOptions& options) {
    if (k < 1) throw ContractError("evaluate: k must be >= 1");
    std::unordered_map<std::string, const KeywordSet*> by_id;
    for (const auto& s : sets) by_id[s.doc_id] = &s;

    EvalReport report;
    report.method = sets.empty() ? std::string("?") : std::string(method_name(sets.front().method));
    report.rows.resize(k);
    for (std::size_t n = 1; n <= k; ++n) report.rows[n - 1].n = n;

    for (const auto& doc : corpus.documents()) {
        if (!doc.gold_keywords || doc.gold_keywords->empty()) continue;
        auto it = by_id.find(doc.id);
        if (it == by_id.end()) throw ContractError("evaluate: no keyword set for document '" + doc.id + "'");
        ++report.docs_evaluated;
        for (std::size_t n = 1; n <= k; ++n) {
            const auto prf = prf_at_n(*it->second, *doc.gold_keywords, n);
            auto& row = report.rows[n - 1];
            row.precision += prf.precision;
            row.recall += prf.recall;
            row.f1 += prf.f1;
        }
    }
    if (report.docs_evaluated == 0) throw NoGoldKeywordsError("evaluate: no document carries gold keywords");
    const double d = static_cast<double>(report.docs_evaluated);
    for (auto& row : report.rows) {
        row.precision /= d;
        row.recall /= d;
        row.f1 = options.f1_of_means ? f1_of(row.precision, row.recall) : row.f1 / d;
    }
    return report;
}

std::string reports_to_csv(const std::vector<EvalReport>& reports) {
    std::string out = "method,n,precision,recall,f1\n";
    for (const auto& r : reports) {
        for (const auto& row : r.rows) {
            out += r.method + ',' + std::to_string(row.n) + ',' + format_fixed(row.precision) + ',' +
                   format_fixed(row.recall) + ',' + format_fixed(row.f1) + '\n';
        }
    }
    return out;
}

std::string pr_curve_to_csv(const std::vector<EvalReport>& reports) {
    std::string out = "method,n,recall,precision\n";
    for (const auto& r : reports) {
        for (const auto& row : r.rows) {
            out += r.method + ',' + std::to_string(row.n) + ',' + format_fixed(row.recall) + ',' +
                   format_fixed(row.precision) + '\n';
        }
    }
    return out;
}

std::vector<EvalReport> reports_from_csv(std::string_view text) {
    std::vector<EvalReport> out;
    std::size_t line_no = 0;
    for (const auto& line : split(text, '\n')) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "method,n,precision,recall,f1") throw ParseError("eval CSV: unexpected header '" + line + "'");
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 5) throw ParseError("eval CSV line " + std::to_string(line_no) + ": expected 5 columns");
        if (out.empty() || out.back().method != f[0]) out.push_back({f[0], {}, 0});
        try {
            out.back().rows.push_back({std::stoul(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4])});
        } catch (const std::exception&) {
            throw ParseError("eval CSV line " + std::to_string(line_no) + ": bad number");
        }
    }
    return out;
}

}  // namespace docmap
