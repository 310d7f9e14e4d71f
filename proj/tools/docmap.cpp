// docmap command-line front end. Each subcommand reads and writes the same
// files the pipeline produces, so stages can be rerun one at a time.
#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "docmap/annotation.hpp"
#include "docmap/clustering.hpp"
#include "docmap/corpus.hpp"
#include "docmap/error.hpp"
#include "docmap/evaluation.hpp"
#include "docmap/extraction.hpp"
#include "docmap/io.hpp"
#include "docmap/kernels.hpp"
#include "docmap/pipeline.hpp"
#include "docmap/projection.hpp"
#include "docmap/pubmed.hpp"
#include "docmap/render.hpp"
#include "docmap/vectors.hpp"

namespace fs = std::filesystem;
using namespace docmap;

namespace {

StopwordSet stopwords_from(const std::string& path) {
    return path.empty() ? bundled_stopwords() : load_stopwords(path);
}

std::optional<std::size_t> opt_limit(std::size_t limit) {
    if (limit == 0) return std::nullopt;
    return limit;
}

void log(const std::string& msg) { std::cerr << "docmap: " << msg << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"docmap: annotated two-dimensional document maps"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);

    // fetch
    auto* fetch = app.add_subcommand("fetch", "download PubMed records through E-utilities");
    std::string f_query, f_out, f_api_key;
    std::size_t f_max = 100;
    fetch->add_option("--query", f_query, "esearch term")->required();
    fetch->add_option("--max", f_max, "maximum number of records")->check(CLI::PositiveNumber);
    fetch->add_option("--out", f_out, "directory for batch_*.xml")->required();
    fetch->add_option("--api-key", f_api_key, "NCBI API key (default: $NCBI_API_KEY)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "normalize efetch XML or JSONL into corpus JSONL");
    std::string i_in, i_out;
    ingest->add_option("--input", i_in, "JSONL, efetch .xml, or a directory of .xml")->required();
    ingest->add_option("--out", i_out, "corpus JSONL")->required();

    // vectors
    auto* vectors = app.add_subcommand("vectors", "average word vectors into document vectors");
    std::string v_corpus, v_vec, v_out, v_stop;
    std::size_t v_limit = 0;
    vectors->add_option("--corpus", v_corpus)->required();
    vectors->add_option("--vectors", v_vec, ".vec word vectors")->required();
    vectors->add_option("--limit", v_limit, "read only the first N vectors (0 = all)");
    vectors->add_option("--stopwords", v_stop);
    vectors->add_option("--out", v_out, "doc_vectors.tsv")->required();

    // project
    auto* project = app.add_subcommand("project", "t-SNE projection to two dimensions");
    std::string p_in, p_out;
    TsneParams tp;
    std::uint64_t p_seed = 0;
    project->add_option("--input", p_in, "doc_vectors.tsv")->required();
    project->add_option("--out", p_out, "projection.tsv")->required();
    project->add_option("--perplexity", tp.perplexity);
    project->add_option("--iterations", tp.iterations)->check(CLI::PositiveNumber);
    project->add_option("--learning-rate", tp.learning_rate);
    project->add_option("--seed", p_seed);

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Gaussian mixture clustering of the map");
    std::string c_in, c_out, c_exemplars, c_model;
    GmmParams gp;
    std::size_t c_top = 3;
    std::uint64_t c_seed = 0;
    cluster->add_option("--input", c_in, "projection.tsv")->required();
    cluster->add_option("--out", c_out, "clusters.tsv")->required();
    cluster->add_option("--k", gp.components, "number of components")->check(CLI::PositiveNumber);
    cluster->add_option("--threshold", gp.threshold, "minimum posterior for assignment");
    cluster->add_option("--restarts", gp.restarts)->check(CLI::PositiveNumber);
    cluster->add_option("--seed", c_seed);
    cluster->add_option("--exemplars", c_exemplars, "exemplars.json");
    cluster->add_option("--exemplars-per-cluster", c_top)->check(CLI::PositiveNumber);
    cluster->add_option("--model", c_model, "gmm.json");

    // keywords
    auto* keywords = app.add_subcommand("keywords", "per-document keyword extraction");
    std::string k_corpus, k_out, k_method = "yake", k_metric = "degree_over_freq", k_vec, k_stop;
    std::size_t k_k = 20, k_limit = 0;
    keywords->add_option("--corpus", k_corpus)->required();
    keywords->add_option("--method", k_method, "yake|rake|tfidf|textrank|embed");
    keywords->add_option("--k", k_k, "keywords per document")->check(CLI::PositiveNumber);
    keywords->add_option("--rake-metric", k_metric, "degree_over_freq|freq|degree");
    keywords->add_option("--vectors", k_vec, ".vec word vectors (embed only)");
    keywords->add_option("--limit", k_limit);
    keywords->add_option("--stopwords", k_stop);
    keywords->add_option("--out", k_out, "keywords.jsonl")->required();

    // annotate
    auto* annotate = app.add_subcommand("annotate", "hypergeometric enrichment labels per cluster");
    std::string a_clusters, a_keywords, a_out;
    LabelParams lp;
    int a_k = 0;
    annotate->add_option("--clusters", a_clusters, "clusters.tsv")->required();
    annotate->add_option("--keywords", a_keywords, "keywords.jsonl")->required();
    annotate->add_option("--num-clusters", a_k, "cluster count (default: highest id + 1)");
    annotate->add_option("--alpha", lp.alpha);
    annotate->add_option("--labels", lp.top_m, "labels per cluster")->check(CLI::PositiveNumber);
    annotate->add_flag("--fdr", lp.fdr, "Benjamini-Hochberg adjusted p-values");
    annotate->add_option("--out", a_out, "labels.json")->required();

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "precision/recall/F1 against gold keywords");
    std::string e_corpus, e_out, e_curve;
    std::vector<std::string> e_keywords;
    std::size_t e_k = 20;
    bool e_f1m = false;
    evaluate_cmd->add_option("--corpus", e_corpus)->required();
    evaluate_cmd->add_option("--keywords", e_keywords, "one keywords.jsonl per method")->required();
    evaluate_cmd->add_option("--k", e_k)->check(CLI::PositiveNumber);
    evaluate_cmd->add_flag("--f1-of-means", e_f1m);
    evaluate_cmd->add_option("--out", e_out, "eval.csv")->required();
    evaluate_cmd->add_option("--pr-curve", e_curve, "pr_curve.csv");

    // render-map
    auto* rmap = app.add_subcommand("render-map", "SVG scatter of the labelled map");
    std::string m_clusters, m_labels, m_model, m_out;
    rmap->add_option("--clusters", m_clusters, "clusters.tsv")->required();
    rmap->add_option("--labels", m_labels, "labels.json");
    rmap->add_option("--model", m_model, "gmm.json, for label anchors");
    rmap->add_option("--out", m_out, "map.svg")->required();

    // render-curves
    auto* rcurves = app.add_subcommand("render-curves", "four-panel evaluation chart");
    std::string r_eval, r_out;
    rcurves->add_option("--eval", r_eval, "eval.csv")->required();
    rcurves->add_option("--out", r_out, "curves.svg")->required();

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "run every stage");
    std::string pl_config;
    pipe->add_option("--config", pl_config, "JSON config; flags override its values");
    std::map<std::string, CLI::Option*> str_flags, int_flags, num_flags;
    std::map<std::string, std::string> str_vals;
    std::map<std::string, long long> int_vals;
    std::map<std::string, double> num_vals;
    for (const char* key : {"corpus", "vectors", "out_dir", "stopwords", "method", "rake_metric"}) {
        std::string flag = std::string("--") + key;
        if (std::string(key) == "out_dir") flag = "--out";
        str_flags[key] = pipe->add_option(flag, str_vals[key]);
    }
    for (const char* key : {"k", "vectors_limit", "tsne_iterations", "clusters", "gmm_restarts", "labels_per_cluster",
                            "exemplars_per_cluster", "seed"}) {
        int_flags[key] = pipe->add_option(std::string("--") + key, int_vals[key]);
    }
    for (const char* key : {"perplexity", "learning_rate", "threshold", "alpha"}) {
        num_flags[key] = pipe->add_option(std::string("--") + key, num_vals[key]);
    }
    std::vector<std::string> pl_eval_methods;
    auto* pl_eval_opt = pipe->add_option("--eval-methods", pl_eval_methods);
    bool pl_fdr = false, pl_f1m = false;
    auto* pl_fdr_opt = pipe->add_flag("--fdr", pl_fdr);
    auto* pl_f1m_opt = pipe->add_flag("--f1-of-means", pl_f1m);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::validation);
    }

    try {
        kernels::set_num_threads(threads);

        if (fetch->parsed()) {
            pubmed::FetchOptions o;
            o.query = f_query;
            o.max_records = f_max;
            o.out_dir = f_out;
            if (!f_api_key.empty()) {
                o.api_key = f_api_key;
            } else if (const char* env = std::getenv("NCBI_API_KEY"); env && *env) {
                o.api_key = env;
            }
            auto http = pubmed::make_eutils_transport();
            pubmed::SystemClock clock;
            const auto r = pubmed::fetch(o, *http, clock);
            log("fetched " + std::to_string(r.pmids.size()) + " records into " + std::to_string(r.files.size()) +
                " file(s)");
        } else if (ingest->parsed()) {
            const auto corpus = load_corpus(i_in);
            write_jsonl(corpus, i_out);
            const auto s = corpus.stats();
            log(std::to_string(s.documents) + " documents, " + std::to_string(s.with_gold) + " with gold keywords, " +
                std::to_string(corpus.skipped) + " skipped");
        } else if (vectors->parsed()) {
            const auto corpus = load_jsonl(v_corpus);
            const auto store = load_vec(v_vec, opt_limit(v_limit));
            const auto docs = tokenize_all(corpus, stopwords_from(v_stop));
            write_file(v_out, doc_vectors_to_tsv(compute_doc_vectors(corpus, docs, store)));
        } else if (project->parsed()) {
            const auto dv = doc_vectors_from_tsv(read_file(p_in));
            std::vector<std::string> ids;
            for (const auto& d : dv) ids.push_back(d.doc_id);
            tp.seed = derive_seed(p_seed, "tsne");
            const auto proj = tsne(stack(dv), tp);
            write_file(p_out, projection_to_tsv(ids, proj.coords));
            log("KL " + format_sig(proj.initial_kl, 6) + " -> " + format_sig(proj.final_kl, 6));
        } else if (cluster->parsed()) {
            const auto table = projection_from_tsv(read_file(c_in));
            gp.seed = derive_seed(c_seed, "gmm");
            const auto model = fit_gmm(table.coords, gp);
            write_file(c_out, clusters_to_tsv(table.ids, table.coords, model.assignments));
            if (!c_model.empty()) write_file(c_model, model_to_json(model));
            if (!c_exemplars.empty()) {
                write_file(c_exemplars,
                           exemplars_to_json(silhouette_exemplars(table.coords, table.ids, model.assignments, c_top)));
            }
        } else if (keywords->parsed()) {
            const auto method = parse_method(k_method);
            const auto corpus = load_jsonl(k_corpus);
            const auto docs = tokenize_all(corpus, stopwords_from(k_stop));
            std::vector<std::string> ids;
            for (const auto& d : corpus.documents()) ids.push_back(d.id);
            ExtractionInputs in;
            in.rake_metric = parse_rake_metric(k_metric);
            const auto df = build_document_frequency(docs);
            in.df = &df;
            WordVectorStore store(0);
            std::vector<DocVector> dvecs;
            if (method == Method::embed) {
                if (k_vec.empty()) throw ValidationError("--vectors: required for method embed");
                store = load_vec(k_vec, opt_limit(k_limit));
                dvecs = compute_doc_vectors(corpus, docs, store);
                in.store = &store;
                in.doc_vectors = &dvecs;
            }
            write_file(k_out, keywords_to_jsonl(extract_all(method, ids, docs, k_k, in)));
        } else if (annotate->parsed()) {
            const auto table = clusters_from_tsv(read_file(a_clusters));
            const auto sets = keywords_from_jsonl(read_file(a_keywords));
            int k = a_k;
            if (k == 0) {
                for (int c : table.assignments) k = std::max(k, c + 1);
            }
            if (k < 1) throw ValidationError("--num-clusters: no assigned documents to infer it from");
            const auto result = label_clusters(keyword_presence(sets), table.ids, table.assignments, k, lp);
            for (int c : result.empty_clusters) log("cluster " + std::to_string(c) + " is empty");
            write_file(a_out, labels_to_json(result.clusters));
        } else if (evaluate_cmd->parsed()) {
            const auto corpus = load_jsonl(e_corpus);
            EvalOptions opt;
            opt.f1_of_means = e_f1m;
            std::vector<EvalReport> reports;
            for (const auto& path : e_keywords) {
                reports.push_back(evaluate(keywords_from_jsonl(read_file(path)), corpus, e_k, opt));
            }
            write_file(e_out, reports_to_csv(reports));
            if (!e_curve.empty()) write_file(e_curve, pr_curve_to_csv(reports));
        } else if (rmap->parsed()) {
            const auto table = clusters_from_tsv(read_file(m_clusters));
            MapScene scene;
            for (std::size_t i = 0; i < table.ids.size(); ++i) {
                scene.points.push_back({table.coords(i, 0), table.coords(i, 1), table.assignments[i]});
            }
            if (!m_labels.empty()) {
                std::optional<ClusterModel> model;
                if (!m_model.empty()) model = model_from_json(read_file(m_model));
                for (const auto& cl : labels_from_json(read_file(m_labels))) {
                    MapLabel l;
                    l.cluster = cl.cluster;
                    if (model && cl.cluster < model->k) {
                        l.x = model->components[static_cast<std::size_t>(cl.cluster)].mean[0];
                        l.y = model->components[static_cast<std::size_t>(cl.cluster)].mean[1];
                    } else {
                        // No model: anchor at the centroid of the assigned points.
                        double sx = 0, sy = 0;
                        int cnt = 0;
                        for (const auto& p : scene.points) {
                            if (p.cluster != cl.cluster) continue;
                            sx += p.x;
                            sy += p.y;
                            ++cnt;
                        }
                        if (cnt > 0) {
                            l.x = sx / cnt;
                            l.y = sy / cnt;
                        }
                    }
                    for (const auto& e : cl.labels) l.labels.push_back(e.text);
                    scene.labels.push_back(std::move(l));
                }
            }
            render_map(scene, m_out);
        } else if (rcurves->parsed()) {
            render_curves(reports_from_csv(read_file(r_eval)), r_out);
        } else if (pipe->parsed()) {
            nlohmann::json overrides = nlohmann::json::object();
            for (const auto& [key, opt] : str_flags) {
                if (opt->count() > 0) overrides[key] = str_vals[key];
            }
            for (const auto& [key, opt] : int_flags) {
                if (opt->count() > 0) overrides[key] = int_vals[key];
            }
            for (const auto& [key, opt] : num_flags) {
                if (opt->count() > 0) overrides[key] = num_vals[key];
            }
            if (pl_eval_opt->count() > 0) overrides["eval_methods"] = pl_eval_methods;
            if (pl_fdr_opt->count() > 0) overrides["fdr"] = pl_fdr;
            if (pl_f1m_opt->count() > 0) overrides["f1_of_means"] = pl_f1m;
            if (app.get_option("--threads")->count() > 0) overrides["threads"] = threads;
            std::optional<fs::path> file;
            if (!pl_config.empty()) file = pl_config;
            const auto config = resolve_config(file, overrides);
            if (config.corpus.empty()) throw ValidationError("corpus: required");
            if (config.vectors.empty()) throw ValidationError("vectors: required");
            const auto result = run_pipeline(config);
            for (const auto& n : result.notices) log("notice: " + n);
            log("wrote " + std::to_string(result.artifacts.size()) + " artifacts to " + config.out_dir.string());
        }
    } catch (const std::exception& e) {
        std::cerr << "docmap: error: " << e.what() << '\n';
        return static_cast<int>(exit_code(e));
    }
    return 0;
}
