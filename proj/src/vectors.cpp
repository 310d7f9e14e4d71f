#include "docmap/vectors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "docmap/error.hpp"
#include "docmap/io.hpp"

namespace docmap {
namespace {

double parse_double(std::string_view s, std::size_t line_no) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        auto j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

bool WordVectorStore::insert(std::string word, std::span<const double> vec) {
    if (vec.size() != dim_) throw ContractError("vector dimension mismatch for '" + word + "'");
    auto [it, inserted] = index_.try_emplace(std::move(word), index_.size());
    if (!inserted) return false;
    values_.insert(values_.end(), vec.begin(), vec.end());
    return true;
}

std::optional<std::span<const double>> WordVectorStore::find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return std::span<const double>(values_.data() + it->second * dim_, dim_);
}

WordVectorStore parse_vec(std::string_view text, std::optional<std::size_t> limit) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= text.size()) return false;
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        return true;
    };

    std::string_view line;
    if (!next_line(line)) throw ParseError("line 1: missing '<count> <dim>' header");
    auto header = fields(line);
    if (header.size() != 2) throw ParseError("line 1: header must be '<count> <dim>'");
    const auto count = static_cast<std::size_t>(parse_double(header[0], 1));
    const auto dim = static_cast<std::size_t>(parse_double(header[1], 1));
    if (dim < 1) throw ParseError("line 1: dimension must be >= 1");

    WordVectorStore store(dim);
    std::vector<double> row(dim);
    std::size_t rows = 0;
    while (next_line(line)) {
        if (limit && rows >= *limit) break;
        auto f = fields(line);
        if (f.empty()) continue;
        if (f.size() != dim + 1) {
            throw ParseError("line " + std::to_string(line_no) + ": expected word plus " + std::to_string(dim) +
                             " values, found " + std::to_string(f.size() - 1));
        }
        for (std::size_t k = 0; k < dim; ++k) row[k] = parse_double(f[k + 1], line_no);
        if (!store.insert(case_fold(f[0]), row)) ++store.duplicates;
        ++rows;
    }
    if (!limit && rows != count) {
        throw ParseError("header announces " + std::to_string(count) + " rows but file holds " + std::to_string(rows));
    }
    if (store.size() == 0) throw ParseError("vector file holds no entries");
    return store;
}

WordVectorStore load_vec(const std::filesystem::path& path, std::optional<std::size_t> limit) {
    try {
        return parse_vec(read_file(path), limit);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

DocVector doc_vector(std::string doc_id, const TokenizedDoc& tdoc, const WordVectorStore& store) {
    DocVector out;
    out.doc_id = std::move(doc_id);
    out.vector.assign(store.dim(), 0.0);
    std::size_t total = 0;
    std::size_t in_vocab = 0;
    for (const auto& sentence : tdoc.sentences) {
        for (const auto& tok : sentence) {
            if (tok.is_stopword) continue;
            ++total;
            auto v = store.find(tok.normalized);
            if (!v) continue;
            ++in_vocab;
            for (std::size_t k = 0; k < out.vector.size(); ++k) out.vector[k] += (*v)[k];
        }
    }
    if (in_vocab > 0) {
        for (auto& x : out.vector) x /= static_cast<double>(in_vocab);
    }
    out.oov_fraction = total == 0 ? 1.0 : static_cast<double>(total - in_vocab) / static_cast<double>(total);
    return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw ContractError("cosine: length mismatch");
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
    return std::clamp(c, -1.0, 1.0);
}

Matrix stack(const std::vector<DocVector>& docs) {
    if (docs.empty()) return {};
    const auto d = docs.front().vector.size();
    Matrix m(docs.size(), d);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].vector.size() != d) throw ContractError("stack: inconsistent document vector dimension");
        std::copy(docs[i].vector.begin(), docs[i].vector.end(), m.row(i).begin());
    }
    return m;
}

std::string doc_vectors_to_tsv(const std::vector<DocVector>& docs) {
    std::string out;
    for (const auto& d : docs) {
        out += d.doc_id;
        out += '\t';
        out += format_sig(d.oov_fraction);
        for (double x : d.vector) {
            out += '\t';
            out += format_sig(x);
        }
        out += '\n';
    }
    return out;
}

std::vector<DocVector> doc_vectors_from_tsv(std::string_view text) {
    std::vector<DocVector> out;
    std::size_t line_no = 0;
    for (const auto& line : split(text, '\n')) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split(line, '\t');
        if (f.size() < 3) throw ParseError("doc vectors line " + std::to_string(line_no) + ": too few columns");
        DocVector d;
        d.doc_id = f[0];
        d.oov_fraction = parse_double(f[1], line_no);
        for (std::size_t k = 2; k < f.size(); ++k) d.vector.push_back(parse_double(f[k], line_no));
        if (!out.empty() && d.vector.size() != out.front().vector.size()) {
            throw ParseError("doc vectors line " + std::to_string(line_no) + ": dimension differs from line 1");
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace docmap
