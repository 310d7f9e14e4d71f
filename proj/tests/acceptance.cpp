// Acceptance checks, one PASS/FAIL line per criterion.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "docmap/annotation.hpp"
#include "docmap/clustering.hpp"
#include "docmap/evaluation.hpp"
#include "docmap/extraction.hpp"
#include "docmap/io.hpp"
#include "docmap/pipeline.hpp"
#include "docmap/projection.hpp"
#include "docmap/xml.hpp"
#include "support/extraction_oracles.hpp"
#include "support/hypergeom_oracle.hpp"
#include "support/synthetic.hpp"
#include "support/workspace.hpp"

using namespace docmap;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

// tail / C(N, n) as a double without rational normalisation: scale the
// numerator so the integer quotient carries ~70 significant bits.
double exact_ratio(const oracles::cpp_int& num, const oracles::cpp_int& den) {
    if (num == 0) return 0.0;
    const long shift = 70 + static_cast<long>(msb(den)) - static_cast<long>(msb(num));
    oracles::cpp_int q = shift >= 0 ? oracles::cpp_int((num << shift) / den) : oracles::cpp_int(num / (den << -shift));
    return std::ldexp(static_cast<double>(q), static_cast<int>(-shift));
}

Outcome hypergeom_sweep() {
    constexpr long kMaxN = 60;
    const oracles::BinomialTable c(kMaxN);
    double worst = 0;
    long cases = 0;
    std::string where;
    for (long N = 1; N <= kMaxN; ++N)
        for (long K = 0; K <= N; ++K)
            for (long n = 0; n <= N; ++n) {
                const auto tail = oracles::tail_numerators(c, K, n, N);
                const auto den = c(N, n);
                for (long k = 0; k <= std::min(K, n); ++k) {
                    const double want = exact_ratio(tail[static_cast<std::size_t>(k)], den);
                    const double err = std::abs(hypergeom_sf(k, K, n, N) - want);
                    ++cases;
                    if (!(err <= worst)) {
                        worst = err;
                        where = "(" + std::to_string(k) + "," + std::to_string(K) + "," + std::to_string(n) + "," +
                                std::to_string(N) + ")";
                    }
                }
            }
    std::ostringstream d;
    d << cases << " cases, max abs error " << worst << " at " << where;
    return {worst < 1e-10, d.str()};
}

Matrix random_matrix(std::size_t r, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    Matrix m(r, cols);
    for (auto& v : m.data()) v = g(rng);
    return m;
}

Outcome gradient_check() {
    const auto a = calibrate_affinities(pairwise_sq_dists(random_matrix(10, 5, 101)), 3.0);
    auto y = random_matrix(10, 2, 102);
    const auto g = kl_gradient(a, y);
    const double h = 1e-5;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t d = 0; d < 2; ++d) {
            const double keep = y(i, d);
            y(i, d) = keep + h;
            const double up = kl_divergence(a, y);
            y(i, d) = keep - h;
            const double down = kl_divergence(a, y);
            y(i, d) = keep;
            const double fd = (up - down) / (2 * h);
            num += (fd - g(i, d)) * (fd - g(i, d));
            den += g(i, d) * g(i, d);
        }
    const double rel = std::sqrt(num / den);
    std::ostringstream d;
    d << "relative error " << rel;
    return {rel < 1e-4, d.str()};
}

Outcome em_monotonicity() {
    double worst_drop = 0;
    std::size_t steps = 0;
    for (std::uint64_t run = 0; run < 50; ++run) {
        // Three random blobs plus background noise.
        std::mt19937_64 rng(1000 + run);
        std::normal_distribution<double> g(0, 1);
        std::uniform_real_distribution<double> u(-10, 10);
        Matrix x(300, 2);
        double cx[3], cy[3];
        for (int c = 0; c < 3; ++c) {
            cx[c] = u(rng);
            cy[c] = u(rng);
        }
        for (std::size_t i = 0; i < 300; ++i) {
            if (i % 10 == 9) {
                x(i, 0) = u(rng);
                x(i, 1) = u(rng);
            } else {
                const auto c = i % 3;
                x(i, 0) = cx[c] + g(rng);
                x(i, 1) = cy[c] + 0.5 * g(rng);
            }
        }
        GmmParams p;
        p.components = 3;
        p.seed = run;
        const auto m = fit_gmm(x, p);
        for (const auto& h : m.restart_histories)
            for (std::size_t t = 1; t < h.size(); ++t) {
                worst_drop = std::max(worst_drop, h[t - 1] - h[t]);
                ++steps;
            }
    }
    std::ostringstream d;
    d << steps << " EM steps over 50 runs, largest decrease " << worst_drop;
    return {worst_drop <= 1e-8, d.str()};
}

// Shared planted-topic fixture for criteria 4, 6 and 8.
struct Planted {
    testing::Workspace ws;
    // 5 disjoint topic vocabularies x 60 documents, plus stopword filler.
    testing::SyntheticData data = testing::make_synthetic({.generic_share = 0.0});
    PipelineConfig config;

    Planted() {
        ws.write_inputs(data);
        config.corpus = ws / "corpus.jsonl";
        config.vectors = ws / "vectors.vec";
        config.out_dir = ws / "run1";
        config.k_clusters = 5;
    }
};

Planted& planted() {
    static Planted p;
    return p;
}

std::set<std::string> words_of(const std::string& phrase) {
    std::set<std::string> out;
    std::istringstream in(phrase);
    for (std::string w; in >> w;) out.insert(w);
    return out;
}

Outcome planted_topics() {
    auto& p = planted();
    run_pipeline(p.config);
    const auto table = clusters_from_tsv(read_file(p.config.out_dir / "clusters.tsv"));
    const double ari = testing::adjusted_rand_index(table.assignments, p.data.topic);

    std::map<int, std::map<int, int>> votes;
    for (std::size_t i = 0; i < table.assignments.size(); ++i) {
        if (table.assignments[i] != kUnassigned) ++votes[table.assignments[i]][p.data.topic[i]];
    }
    std::size_t labels = 0, off_topic = 0;
    std::string example;
    for (const auto& cl : labels_from_json(read_file(p.config.out_dir / "labels.json"))) {
        int topic = -1, best = -1;
        for (const auto& [t, n] : votes[cl.cluster])
            if (n > best) {
                best = n;
                topic = t;
            }
        const auto& vocab = p.data.vocab[static_cast<std::size_t>(topic)];
        const std::set<std::string> allowed(vocab.begin(), vocab.end());
        for (const auto& l : cl.labels) {
            ++labels;
            for (const auto& w : words_of(l.text))
                if (!allowed.contains(w)) {
                    ++off_topic;
                    example = l.text;
                    break;
                }
        }
    }
    std::ostringstream d;
    d << "ARI " << ari << ", " << labels << " labels, " << off_topic << " off-topic";
    if (!example.empty()) d << " (e.g. '" << example << "')";
    return {ari >= 0.8 && labels > 0 && off_topic == 0, d.str()};
}

Outcome empty_config_defaults() {
    auto& p = planted();
    const auto cfg_path = p.ws / "empty.json";
    write_file(cfg_path, "");
    auto cfg = resolve_config(cfg_path, {{"corpus", p.config.corpus.string()},
                                         {"vectors", p.config.vectors.string()},
                                         {"out_dir", (p.ws / "defaults").string()}});
    run_pipeline(cfg);
    const auto m = nlohmann::json::parse(read_file(p.ws / "defaults" / "manifest.json"));
    const auto& c = m.at("config");
    const bool ok = c.at("k") == 20 && c.at("threshold") == 0.6 && c.at("alpha") == 0.05 &&
                    c.at("labels_per_cluster") == 5;
    std::ostringstream d;
    d << "k=" << c.at("k") << " threshold=" << c.at("threshold") << " alpha=" << c.at("alpha")
      << " labels_per_cluster=" << c.at("labels_per_cluster");
    return {ok, d.str()};
}

Outcome recall_monotone() {
    auto& p = planted();
    std::size_t curves = 0, violations = 0;
    for (const auto* dir : {"run1", "defaults"}) {
        const auto path = p.ws / dir / "eval.csv";
        for (const auto& r : reports_from_csv(read_file(path))) {
            ++curves;
            for (std::size_t i = 1; i < r.rows.size(); ++i)
                if (r.rows[i].recall < r.rows[i - 1].recall) ++violations;
        }
    }
    std::ostringstream d;
    d << curves << " recall curves, " << violations << " decreases";
    return {curves >= 10 && violations == 0, d.str()};
}

Outcome extractor_oracles() {
    std::vector<std::string> failed;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) failed.push_back(what);
    };
    const StopwordSet none;
    auto score_of = [](const KeywordSet& ks, const std::string& t) {
        for (const auto& k : ks.keywords)
            if (k.text == t) return k.score;
        return std::nan("");
    };

    const std::vector<TokenizedDoc> docs{tokenize("a a b", none), tokenize("b c", none)};
    const auto df = build_document_frequency(docs);
    const auto tf = extract_tfidf("d1", docs[0], df, 20);
    expect(std::abs(score_of(tf, "a") - 2 * std::log(2.0)) < 1e-9, "tfidf a");
    expect(score_of(tf, "b") == 0.0, "tfidf b");
    const auto every = build_document_frequency({tokenize("x x x y", none), tokenize("x z", none)});
    expect(score_of(extract_tfidf("d", tokenize("x x x y", none), every, 20), "x") == 0.0, "tfidf df=N");
    expect(tf.keywords.size() == 4, "tfidf exhaustion");

    const StopwordSet sw({"of", "the"});
    const auto rtd = tokenize("red apple of the red tree", sw);
    const auto rs = rake_word_scores(rtd, RakeMetric::degree_over_freq);
    expect(std::abs(rs.at("red") - 2) < 1e-9 && std::abs(rs.at("apple") - 2) < 1e-9 &&
               std::abs(rs.at("tree") - 2) < 1e-9,
           "rake word scores");
    expect(rake_word_scores(rtd, RakeMetric::degree).at("red") == 4.0, "rake deg(red)");
    const auto rk = extract_rake("d", rtd, 20);
    expect(rk.keywords.size() == 2 && rk.keywords[0].text == "red apple" && rk.keywords[1].text == "red tree" &&
               std::abs(rk.keywords[0].score - 4) < 1e-9 && std::abs(rk.keywords[1].score - 4) < 1e-9,
           "rake phrases");
    const auto dl = extract_rake("d", tokenize("deep learning", none), 20, RakeMetric::degree);
    expect(dl.keywords.size() == 1 && std::abs(dl.keywords[0].score - 4) < 1e-9, "rake deep learning");
    const auto fr = rake_word_scores(rtd, RakeMetric::freq);
    expect(fr.at("red") == 2.0 && fr.at("apple") == 1.0, "rake freq");

    const auto tri = pagerank({{1, 2}, {0, 2}, {0, 1}});
    for (double v : tri) expect(std::abs(v - 1.0 / 3.0) < 1e-9, "pagerank triangle");
    const auto chain = pagerank({{1}, {0, 2}, {1}});
    expect(chain[1] > chain[0] && chain[1] > chain[2], "pagerank chain");
    expect(std::abs(chain[0] + chain[1] + chain[2] - 1) < 1e-6, "pagerank sum");

    const auto yk = extract_yake("d", tokenize(oracles::kYakeText, bundled_stopwords()), 100);
    bool same = yk.keywords.size() == std::size(oracles::kYakeRanking);
    for (std::size_t i = 0; same && i < yk.keywords.size(); ++i)
        same = yk.keywords[i].text == oracles::kYakeRanking[i].text;
    expect(same, "yake ranking");
    expect(score_of(yk, "telomere") < score_of(yk, "aging"), "yake early repeated term");

    std::string d = failed.empty() ? "tfidf, rake, textrank and yake examples reproduced" : "failed:";
    for (const auto& f : failed) d += " " + f;
    return {failed.empty(), d};
}

Outcome determinism() {
    auto& p = planted();
    auto second = p.config;
    second.out_dir = p.ws / "run2";
    run_pipeline(second);
    const auto a = read_file(p.config.out_dir / "manifest.json");
    const auto b = read_file(second.out_dir / "manifest.json");
    return {a == b, a == b ? "manifests identical (" + std::to_string(a.size()) + " bytes)" : "manifests differ"};
}

int run_cli(const testing::Workspace& ws, const std::string& args) {
    const std::string cmd = std::string("\"") + DOCMAP_CLI_PATH + "\" " + args + " >\"" + (ws / "cli.log").string() +
                            "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void collect(const xml::Node& n, const std::string& name, const std::string& cls, std::vector<const xml::Node*>& out) {
    if (n.name == name) {
        const auto* c = n.attribute("class");
        if (c && *c == cls) out.push_back(&n);
    }
    for (const auto& ch : n.children) collect(ch, name, cls, out);
}

Outcome curves_structure() {
    testing::Workspace ws;
    testing::SyntheticParams params;
    params.topics = 3;
    params.docs_per_topic = 10;
    ws.write_inputs(testing::make_synthetic(params));
    const std::size_t k = 20;
    const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
    std::string kw_args;
    std::vector<std::string> methods;
    for (auto m : kAllMethods) {
        const std::string name(method_name(m));
        methods.push_back(name);
        const auto out = ws / ("kw_" + name + ".jsonl");
        std::string args = "keywords --corpus " + q(ws / "corpus.jsonl") + " --method " + name + " --k 20 --out " + q(out);
        if (m == Method::embed) args += " --vectors " + q(ws / "vectors.vec");
        if (run_cli(ws, args) != 0) return {false, "keywords --method " + name + " failed: " + read_file(ws / "cli.log")};
        kw_args += " " + q(out);
    }
    if (run_cli(ws, "evaluate --corpus " + q(ws / "corpus.jsonl") + " --k 20 --out " + q(ws / "eval.csv") +
                        " --keywords" + kw_args) != 0)
        return {false, "evaluate failed: " + read_file(ws / "cli.log")};
    if (run_cli(ws, "render-curves --eval " + q(ws / "eval.csv") + " --out " + q(ws / "curves.svg")) != 0)
        return {false, "render-curves failed: " + read_file(ws / "cli.log")};

    const auto root = xml::parse(read_file(ws / "curves.svg"));
    std::vector<const xml::Node*> panels;
    collect(root, "g", "panel", panels);
    bool ok = panels.size() == 4;
    std::string problem;
    for (const auto* panel : panels) {
        std::vector<const xml::Node*> lines;
        collect(*panel, "polyline", "curve", lines);
        std::vector<std::string> seen;
        for (const auto* l : lines) {
            seen.push_back(*l->attribute("data-method"));
            const auto& pts = *l->attribute("points");
            if (static_cast<std::size_t>(std::count(pts.begin(), pts.end(), ',')) != k) {
                ok = false;
                problem = "a curve does not have " + std::to_string(k) + " vertices";
            }
        }
        if (seen != methods) {
            ok = false;
            problem = "panel curves do not match the requested methods";
        }
    }
    // The n axis of the chart data runs 1..k for every method.
    for (const auto& r : reports_from_csv(read_file(ws / "eval.csv"))) {
        for (std::size_t i = 0; i < r.rows.size(); ++i)
            if (r.rows[i].n != i + 1) ok = false;
        if (r.rows.size() != k) ok = false;
    }
    std::ostringstream d;
    d << panels.size() << " panels, " << methods.size() << " methods";
    if (!problem.empty()) d << "; " << problem;
    return {ok, d.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;  // 0 = no time limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "hypergeometric tail matches exact enumeration (N <= 60)", 10, hypergeom_sweep},
        {2, "t-SNE gradient matches central differences", 5, gradient_check},
        {3, "EM log-likelihood never decreases", 30, em_monotonicity},
        {4, "planted topics recovered end to end", 120, planted_topics},
        {5, "empty config runs with k=20, threshold 0.6, alpha 0.05, 5 labels", 0, empty_config_defaults},
        {6, "mean recall@n non-decreasing for every method", 0, recall_monotone},
        {7, "extractor toy examples", 0, extractor_oracles},
        {8, "identical config and seed give identical manifests", 0, determinism},
        {9, "evaluate + render-curves chart structure", 0, curves_structure},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.budget_s > 0 && secs >= c.budget_s) {
            o.pass = false;
            o.detail += "; over the time budget";
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " [" << o.detail
                  << "; " << std::fixed;
        std::cout.precision(2);
        std::cout << secs << " s]" << std::defaultfloat << std::endl;
        std::cout.precision(6);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
