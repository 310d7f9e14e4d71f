#include "docmap/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "docmap/annotation.hpp"
#include "docmap/clustering.hpp"
#include "docmap/error.hpp"
#include "docmap/evaluation.hpp"
#include "docmap/io.hpp"
#include "docmap/kernels.hpp"
#include "docmap/projection.hpp"
#include "docmap/pubmed.hpp"
#include "docmap/render.hpp"

namespace docmap {
namespace {

using nlohmann::json;

template <typename T>
T get_field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string(key) + ": wrong type");
    }
}

// Re-throws the same error category with the stage name prefixed.
template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
    const std::string prefix = std::string("stage '") + name + "': ";
    try {
        return fn();
    } catch (const NoGoldKeywordsError& e) {
        throw NoGoldKeywordsError(prefix + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(prefix + e.what());
    } catch (const ContractError& e) {
        throw ContractError(prefix + e.what());
    } catch (const ParseError& e) {
        throw ParseError(prefix + e.what());
    } catch (const IoError& e) {
        throw IoError(prefix + e.what());
    } catch (const NumericError& e) {
        throw NumericError(prefix + e.what());
    }
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

PipelineConfig apply_config(PipelineConfig c, const json& j) {
    if (j.is_null()) return c;
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "corpus") {
            c.corpus = get_field<std::string>(j, "corpus");
        } else if (key == "vectors") {
            c.vectors = get_field<std::string>(j, "vectors");
        } else if (key == "out_dir") {
            c.out_dir = get_field<std::string>(j, "out_dir");
        } else if (key == "stopwords") {
            if (value.is_null()) {
                c.stopwords.reset();
            } else {
                c.stopwords = get_field<std::string>(j, "stopwords");
            }
        } else if (key == "vectors_limit") {
            if (value.is_null()) {
                c.vectors_limit.reset();
            } else {
                const auto v = get_field<long long>(j, "vectors_limit");
                if (v < 1) throw ValidationError("vectors_limit: must be >= 1");
                c.vectors_limit = static_cast<std::size_t>(v);
            }
        } else if (key == "k") {
            const auto v = get_field<long long>(j, "k");
            if (v < 1) throw ValidationError("k: must be >= 1");
            c.k_keywords = static_cast<std::size_t>(v);
        } else if (key == "method") {
            c.method = parse_method(get_field<std::string>(j, "method"));
        } else if (key == "rake_metric") {
            c.rake_metric = parse_rake_metric(get_field<std::string>(j, "rake_metric"));
        } else if (key == "eval_methods") {
            c.eval_methods.clear();
            for (const auto& m : get_field<std::vector<std::string>>(j, "eval_methods")) c.eval_methods.push_back(parse_method(m));
        } else if (key == "perplexity") {
            c.perplexity = get_field<double>(j, "perplexity");
        } else if (key == "tsne_iterations") {
            c.tsne_iterations = get_field<int>(j, "tsne_iterations");
        } else if (key == "learning_rate") {
            c.learning_rate = get_field<double>(j, "learning_rate");
        } else if (key == "clusters") {
            c.k_clusters = get_field<int>(j, "clusters");
        } else if (key == "gmm_restarts") {
            c.gmm_restarts = get_field<int>(j, "gmm_restarts");
        } else if (key == "threshold") {
            c.assign_threshold = get_field<double>(j, "threshold");
        } else if (key == "alpha") {
            c.alpha = get_field<double>(j, "alpha");
        } else if (key == "labels_per_cluster") {
            const auto v = get_field<long long>(j, "labels_per_cluster");
            if (v < 1) throw ValidationError("labels_per_cluster: must be >= 1");
            c.labels_per_cluster = static_cast<std::size_t>(v);
        } else if (key == "exemplars_per_cluster") {
            const auto v = get_field<long long>(j, "exemplars_per_cluster");
            if (v < 1) throw ValidationError("exemplars_per_cluster: must be >= 1");
            c.exemplars_per_cluster = static_cast<std::size_t>(v);
        } else if (key == "fdr") {
            c.fdr = get_field<bool>(j, "fdr");
        } else if (key == "f1_of_means") {
            c.f1_of_means = get_field<bool>(j, "f1_of_means");
        } else if (key == "seed") {
            const auto v = get_field<long long>(j, "seed");
            if (v < 0) throw ValidationError("seed: must be >= 0");
            c.seed = static_cast<std::uint64_t>(v);
        } else if (key == "threads") {
            c.threads = get_field<int>(j, "threads");
        } else {
            throw ValidationError(key + ": unknown configuration key");
        }
    }
    return c;
}

void validate(const PipelineConfig& c) {
    if (c.corpus.empty()) throw ValidationError("corpus: path is required");
    if (c.vectors.empty()) throw ValidationError("vectors: path is required");
    if (c.k_keywords < 1) throw ValidationError("k: must be >= 1");
    if (!(c.perplexity > 1.0)) throw ValidationError("perplexity: must be > 1");
    if (c.tsne_iterations < 1) throw ValidationError("tsne_iterations: must be >= 1");
    if (!(c.learning_rate > 0)) throw ValidationError("learning_rate: must be > 0");
    if (c.k_clusters < 1) throw ValidationError("clusters: must be >= 1");
    if (c.gmm_restarts < 1) throw ValidationError("gmm_restarts: must be >= 1");
    if (!(c.assign_threshold >= 0 && c.assign_threshold < 1)) throw ValidationError("threshold: must be in [0, 1)");
    if (!(c.alpha > 0 && c.alpha < 1)) throw ValidationError("alpha: must be in (0, 1)");
    if (c.labels_per_cluster < 1) throw ValidationError("labels_per_cluster: must be >= 1");
    if (c.threads < 0) throw ValidationError("threads: must be >= 0");
    if (c.eval_methods.empty()) throw ValidationError("eval_methods: must name at least one method");
}

PipelineConfig resolve_config(const std::optional<std::filesystem::path>& file, const json& overrides) {
    PipelineConfig c;
    if (file) {
        const auto text = read_file(*file);
        if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
            json j;
            try {
                j = json::parse(text);
            } catch (const json::parse_error& e) {
                throw ParseError("config: " + file->string() + ": " + e.what());
            }
            c = apply_config(c, j);
        }
    }
    c = apply_config(c, overrides);
    validate(c);
    return c;
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c, bool include_out_dir) {
    nlohmann::ordered_json j;
    j["corpus"] = c.corpus.generic_string();
    j["vectors"] = c.vectors.generic_string();
    if (include_out_dir) j["out_dir"] = c.out_dir.generic_string();
    j["stopwords"] = c.stopwords ? nlohmann::ordered_json(c.stopwords->generic_string()) : nlohmann::ordered_json();
    j["vectors_limit"] = c.vectors_limit ? nlohmann::ordered_json(*c.vectors_limit) : nlohmann::ordered_json();
    j["k"] = c.k_keywords;
    j["method"] = method_name(c.method);
    j["rake_metric"] = rake_metric_name(c.rake_metric);
    auto methods = nlohmann::ordered_json::array();
    for (auto m : c.eval_methods) methods.push_back(method_name(m));
    j["eval_methods"] = std::move(methods);
    j["perplexity"] = c.perplexity;
    j["tsne_iterations"] = c.tsne_iterations;
    j["learning_rate"] = c.learning_rate;
    j["clusters"] = c.k_clusters;
    j["gmm_restarts"] = c.gmm_restarts;
    j["threshold"] = c.assign_threshold;
    j["alpha"] = c.alpha;
    j["labels_per_cluster"] = c.labels_per_cluster;
    j["exemplars_per_cluster"] = c.exemplars_per_cluster;
    j["fdr"] = c.fdr;
    j["f1_of_means"] = c.f1_of_means;
    j["seed"] = c.seed;
    return j;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage_name) {
    std::uint64_t x = seed ^ fnv1a(stage_name);
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Corpus load_corpus(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(path)) {
            if (e.is_regular_file() && e.path().extension() == ".xml") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw IoError("no .xml files in '" + path.string() + "'");
        return pubmed::parse_efetch_files(files);
    }
    if (path.extension() == ".xml") return pubmed::parse_efetch_xml(path);
    return load_jsonl(path);
}

std::vector<TokenizedDoc> tokenize_all(const Corpus& corpus, const StopwordSet& stopwords) {
    std::vector<TokenizedDoc> out(corpus.size());
    const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = tokenize(corpus[static_cast<std::size_t>(i)], stopwords);
    }
    return out;
}

std::vector<DocVector> compute_doc_vectors(const Corpus& corpus, const std::vector<TokenizedDoc>& docs,
                                           const WordVectorStore& store) {
    if (docs.size() != corpus.size()) throw ContractError("compute_doc_vectors: corpus and tokens differ in length");
    std::vector<DocVector> out(docs.size());
    const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out[u] = doc_vector(corpus[u].id, docs[u], store);
    }
    return out;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    validate(config);
    kernels::set_num_threads(config.threads);

    PipelineResult result;
    const auto& dir = config.out_dir;
    std::filesystem::create_directories(dir);
    auto emit = [&](const std::string& name, const std::string& kind, const std::string& content) {
        write_file(dir / name, content);
        result.artifacts.push_back({name, kind, sha256_hex(content), content.size()});
    };
    nlohmann::ordered_json stats;

    const auto corpus = stage("ingest", [&] { return load_corpus(config.corpus); });
    if (corpus.size() < 2) throw ContractError("stage 'ingest': need at least 2 documents");
    const auto cstats = corpus.stats();
    stats["documents"] = cstats.documents;
    stats["skipped_records"] = corpus.skipped;
    stats["documents_with_gold"] = cstats.with_gold;
    stats["mean_gold_per_document"] = cstats.mean_gold_per_doc;

    const auto stopwords = stage("ingest", [&] {
        return config.stopwords ? load_stopwords(*config.stopwords) : bundled_stopwords();
    });
    const auto tdocs = tokenize_all(corpus, stopwords);
    std::vector<std::string> ids;
    for (const auto& d : corpus.documents()) ids.push_back(d.id);

    const auto store = stage("vectors", [&] { return load_vec(config.vectors, config.vectors_limit); });
    const auto dvecs = stage("vectors", [&] { return compute_doc_vectors(corpus, tdocs, store); });
    const auto zero_docs = std::count_if(dvecs.begin(), dvecs.end(), [](const DocVector& d) {
        return std::all_of(d.vector.begin(), d.vector.end(), [](double v) { return v == 0.0; });
    });
    stats["zero_vector_documents"] = zero_docs;
    if (zero_docs > 0) result.notices.push_back(std::to_string(zero_docs) + " document(s) have no in-vocabulary words");
    // Later stages read back the written artifacts, so a stage-by-stage CLI
    // run over the same files reproduces every byte.
    const auto dvec_tsv = doc_vectors_to_tsv(dvecs);
    emit("doc_vectors.tsv", "doc_vectors", dvec_tsv);

    const auto projection = stage("project", [&] {
        TsneParams p;
        p.perplexity = config.perplexity;
        p.iterations = config.tsne_iterations;
        p.learning_rate = config.learning_rate;
        p.seed = derive_seed(config.seed, "tsne");
        return tsne(stack(doc_vectors_from_tsv(dvec_tsv)), p);
    });
    stats["tsne_initial_kl"] = projection.initial_kl;
    stats["tsne_final_kl"] = projection.final_kl;
    const auto proj_tsv = projection_to_tsv(ids, projection.coords);
    emit("projection.tsv", "projection", proj_tsv);
    const auto coords = projection_from_tsv(proj_tsv).coords;

    const auto model = stage("cluster", [&] {
        GmmParams p;
        p.components = config.k_clusters;
        p.restarts = config.gmm_restarts;
        p.threshold = config.assign_threshold;
        p.seed = derive_seed(config.seed, "gmm");
        return fit_gmm(coords, p);
    });
    const auto unassigned = std::count(model.assignments.begin(), model.assignments.end(), kUnassigned);
    stats["unassigned_documents"] = unassigned;
    stats["gmm_log_likelihood"] = model.log_likelihood;
    emit("clusters.tsv", "clusters", clusters_to_tsv(ids, coords, model.assignments));
    const auto model_json = model_to_json(model);
    emit("gmm.json", "cluster_model", model_json);
    const auto anchors = model_from_json(model_json);
    std::string exemplars_json = "{}\n";
    try {
        exemplars_json = exemplars_to_json(
            silhouette_exemplars(coords, ids, model.assignments, config.exemplars_per_cluster));
    } catch (const ContractError&) {
        result.notices.push_back("fewer than two non-empty clusters; no silhouette exemplars");
    }
    emit("exemplars.json", "exemplars", exemplars_json);

    const auto df = build_document_frequency(tdocs);
    ExtractionInputs inputs;
    inputs.df = &df;
    inputs.store = &store;
    inputs.doc_vectors = &dvecs;
    inputs.rake_metric = config.rake_metric;
    const auto keywords = stage("keywords", [&] { return extract_all(config.method, ids, tdocs, config.k_keywords, inputs); });
    emit("keywords.jsonl", "keywords", keywords_to_jsonl(keywords));

    const auto labels = stage("annotate", [&] {
        LabelParams p;
        p.alpha = config.alpha;
        p.top_m = config.labels_per_cluster;
        p.fdr = config.fdr;
        return label_clusters(keyword_presence(keywords), ids, model.assignments, model.k, p);
    });
    for (int c : labels.empty_clusters) result.notices.push_back("cluster " + std::to_string(c) + " is empty; no labels");
    emit("labels.json", "labels", labels_to_json(labels.clusters));

    MapScene scene;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        scene.points.push_back({coords(i, 0), coords(i, 1), model.assignments[i]});
    }
    for (const auto& cl : labels.clusters) {
        MapLabel l;
        l.cluster = cl.cluster;
        const auto& g = anchors.components[static_cast<std::size_t>(cl.cluster)];
        l.x = g.mean[0];
        l.y = g.mean[1];
        for (const auto& e : cl.labels) l.labels.push_back(e.text);
        scene.labels.push_back(std::move(l));
    }
    emit("map.svg", "map", stage("render-map", [&] { return render_map_svg(scene); }));

    if (cstats.with_gold == 0) {
        result.notices.push_back("corpus has no gold keywords; evaluation skipped");
    } else {
        const auto reports = stage("evaluate", [&] {
            std::vector<EvalReport> out;
            EvalOptions opt;
            opt.f1_of_means = config.f1_of_means;
            for (auto m : config.eval_methods) {
                const auto sets = m == config.method ? keywords : extract_all(m, ids, tdocs, config.k_keywords, inputs);
                out.push_back(evaluate(sets, corpus, config.k_keywords, opt));
            }
            return out;
        });
        emit("eval.csv", "eval", reports_to_csv(reports));
        emit("pr_curve.csv", "pr_curve", pr_curve_to_csv(reports));
        emit("curves.svg", "curves", stage("render-curves", [&] { return render_curves_svg(reports); }));
    }

    const auto echo = config_to_json(config, false);
    emit("config.json", "config", echo.dump(2) + "\n");

    nlohmann::ordered_json manifest;
    manifest["config"] = echo;
    auto arts = nlohmann::ordered_json::array();
    for (const auto& a : result.artifacts) {
        arts.push_back({{"path", a.path}, {"kind", a.kind}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    }
    manifest["artifacts"] = std::move(arts);
    manifest["stats"] = std::move(stats);
    manifest["notices"] = result.notices;
    result.manifest_json = manifest.dump(2) + "\n";
    write_file(dir / "manifest.json", result.manifest_json);
    return result;
}

std::vector<std::string> verify_manifest(const std::filesystem::path& out_dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(out_dir / "manifest.json"));
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    std::vector<std::string> bad;
    for (const auto& a : manifest.at("artifacts")) {
        const auto path = a.at("path").get<std::string>();
        std::string content;
        try {
            content = read_file(out_dir / path);
        } catch (const IoError&) {
            bad.push_back(path);
            continue;
        }
        if (sha256_hex(content) != a.at("sha256").get<std::string>()) bad.push_back(path);
    }
    return bad;
}

}  // namespace docmap
