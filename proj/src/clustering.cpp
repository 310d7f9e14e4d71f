#include "docmap/clustering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "docmap/error.hpp"
#include "docmap/io.hpp"

namespace docmap {
namespace {

using kernels::Gaussian2;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double sq_dist(const Matrix& x, std::size_t i, const double* c) {
    const double dx = x(i, 0) - c[0];
    const double dy = x(i, 1) - c[1];
    return dx * dx + dy * dy;
}

// Weighted mean and covariance; weights may be any non-negative vector.
void weighted_moments(const Matrix& x, const std::vector<double>& w, double total, Gaussian2& g, double reg) {
    const auto n = x.rows();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += w[i] * x(i, 0);
        my += w[i] * x(i, 1);
    }
    mx /= total;
    my /= total;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x(i, 0) - mx;
        const double dy = x(i, 1) - my;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * dy;
        syy += w[i] * dy * dy;
    }
    g.mean[0] = mx;
    g.mean[1] = my;
    g.cov[0] = sxx / total + reg;
    g.cov[1] = sxy / total;
    g.cov[2] = syy / total + reg;
}

std::vector<Gaussian2> kmeans_init(const Matrix& x, int k, std::mt19937_64& rng, const GmmParams& params) {
    const auto n = x.rows();
    const auto uk = static_cast<std::size_t>(k);
    std::vector<std::array<double, 2>> centers;
    centers.reserve(uk);

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const auto first = pick(rng);
    centers.push_back({x(first, 0), x(first, 1)});
    std::vector<double> d2(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (centers.size() < uk) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, sq_dist(x, i, c.data()));
            d2[i] = best;
            total += best;
        }
        std::size_t chosen = n - 1;
        if (total > 0) {
            double r = unit(rng) * total;
            for (std::size_t i = 0; i < n; ++i) {
                r -= d2[i];
                if (r < 0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centers.push_back({x(chosen, 0), x(chosen, 1)});
    }

    std::vector<std::size_t> label(n, 0);
    for (int step = 0; step < params.kmeans_steps; ++step) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < uk; ++c) {
                const double d = sq_dist(x, i, centers[c].data());
                if (d < best) {
                    best = d;
                    label[i] = c;
                }
            }
        }
        std::vector<std::array<double, 3>> acc(uk, {0, 0, 0});
        for (std::size_t i = 0; i < n; ++i) {
            acc[label[i]][0] += x(i, 0);
            acc[label[i]][1] += x(i, 1);
            acc[label[i]][2] += 1;
        }
        for (std::size_t c = 0; c < uk; ++c) {
            if (acc[c][2] > 0) centers[c] = {acc[c][0] / acc[c][2], acc[c][1] / acc[c][2]};
        }
    }

    Gaussian2 global;
    weighted_moments(x, std::vector<double>(n, 1.0), static_cast<double>(n), global, params.regularization);

    std::vector<Gaussian2> comps(uk);
    std::vector<double> w(n);
    for (std::size_t c = 0; c < uk; ++c) {
        double count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = label[i] == c ? 1.0 : 0.0;
            count += w[i];
        }
        if (count >= 2) {
            weighted_moments(x, w, count, comps[c], params.regularization);
        } else {
            comps[c] = global;
            comps[c].mean[0] = centers[c][0];
            comps[c].mean[1] = centers[c][1];
        }
        comps[c].weight = std::max(count, 1.0);
    }
    double total = 0;
    for (const auto& g : comps) total += g.weight;
    for (auto& g : comps) g.weight /= total;
    return comps;
}

void m_step(const Matrix& x, const Matrix& resp, std::vector<Gaussian2>& comps, double reg) {
    const auto n = x.rows();
    const auto k = static_cast<std::ptrdiff_t>(comps.size());
    std::vector<double> nk(comps.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < k; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        std::vector<double> w(n);
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = resp(i, uc);
            total += w[i];
        }
        nk[uc] = total;
        // A starved component keeps its previous shape.
        if (total > 1e-10) weighted_moments(x, w, total, comps[uc], reg);
    }
    double sum = 0;
    for (double v : nk) sum += std::max(v, 1e-300);
    for (std::size_t c = 0; c < comps.size(); ++c) comps[c].weight = std::max(nk[c], 1e-300) / sum;
}

double sum(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s;
}

struct RunResult {
    std::vector<Gaussian2> comps;
    Matrix resp;
    double ll = 0;
    int iterations = 0;
    std::vector<double> history;
};

RunResult run_em(const Matrix& x, int k, std::uint64_t seed, const GmmParams& params) {
    std::mt19937_64 rng(seed);
    RunResult r;
    r.comps = kmeans_init(x, k, rng, params);
    const auto n = static_cast<double>(x.rows());
    for (int iter = 0; iter < params.max_iterations; ++iter) {
        const auto row_ll = kernels::parallel::gmm_e_step(x, r.comps, r.resp);
        r.ll = sum(row_ll);
        if (!std::isfinite(r.ll)) throw NumericError("EM produced a non-finite log-likelihood");
        r.history.push_back(r.ll);
        r.iterations = iter + 1;
        if (iter > 0 && (r.ll - r.history[r.history.size() - 2]) / n < params.tolerance) break;
        if (iter + 1 == params.max_iterations) break;
        m_step(x, r.resp, r.comps, params.regularization);
    }
    return r;
}

}  // namespace

ClusterModel fit_gmm(const Matrix& coords, const GmmParams& params) {
    const auto n = coords.rows();
    const int k = params.components;
    if (coords.cols() != 2) throw ContractError("fit_gmm: coordinates must be n x 2");
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw ContractError("fit_gmm: need 1 <= K <= n (K = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");
    }
    if (params.restarts < 1 || params.max_iterations < 1) throw ContractError("fit_gmm: restarts and iterations must be >= 1");
    for (double v : coords.data()) {
        if (!std::isfinite(v)) throw ContractError("fit_gmm: non-finite coordinate");
    }
    if (k > 1) {
        bool identical = true;
        for (std::size_t i = 1; i < n && identical; ++i) {
            identical = coords(i, 0) == coords(0, 0) && coords(i, 1) == coords(0, 1);
        }
        if (identical) throw NumericError("fit_gmm: all points are identical, cannot fit more than one component");
    }

    ClusterModel model;
    model.k = k;
    model.threshold = params.threshold;
    RunResult best;
    bool have = false;
    for (int r = 0; r < params.restarts; ++r) {
        auto run = run_em(coords, k, splitmix64(params.seed + static_cast<std::uint64_t>(r)), params);
        model.restart_histories.push_back(run.history);
        if (!have || run.ll > best.ll) {
            best = std::move(run);
            model.best_restart = r;
            have = true;
        }
    }
    model.components = std::move(best.comps);
    model.posteriors = std::move(best.resp);
    model.log_likelihood = best.ll;
    model.iterations = best.iterations;
    model.assignments = assign(model.posteriors, params.threshold);
    return model;
}

Matrix posteriors(const Matrix& coords, std::span<const kernels::Gaussian2> components) {
    Matrix resp;
    kernels::parallel::gmm_e_step(coords, components, resp);
    return resp;
}

std::vector<int> assign(const Matrix& post, double threshold) {
    std::vector<int> out(post.rows(), kUnassigned);
    for (std::size_t i = 0; i < post.rows(); ++i) {
        const auto row = post.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c] > row[best]) best = c;
        }
        if (!row.empty() && row[best] > threshold) out[i] = static_cast<int>(best);
    }
    return out;
}

std::vector<double> silhouette_values(const Matrix& coords, std::span<const int> assignments) {
    if (assignments.size() != coords.rows()) throw ContractError("silhouette: assignment count differs from points");
    return kernels::parallel::silhouette(coords, assignments);
}

Exemplars silhouette_exemplars(const Matrix& coords, const std::vector<std::string>& ids,
                               std::span<const int> assignments, std::size_t top_m) {
    if (ids.size() != coords.rows()) throw ContractError("silhouette_exemplars: id count differs from points");
    int k = 0;
    for (int a : assignments) k = std::max(k, a + 1);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] >= 0) members[static_cast<std::size_t>(assignments[i])].push_back(i);
    }
    const auto non_empty = std::count_if(members.begin(), members.end(), [](const auto& m) { return !m.empty(); });
    if (non_empty < 2) throw ContractError("silhouette_exemplars: need at least two non-empty clusters");

    const auto s = silhouette_values(coords, assignments);
    Exemplars out(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
        auto idx = members[c];
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
        if (idx.size() > top_m) idx.resize(top_m);
        for (auto i : idx) out[c].push_back({ids[i], s[i]});
    }
    return out;
}

std::string clusters_to_tsv(const std::vector<std::string>& ids, const Matrix& coords,
                            std::span<const int> assignments) {
    if (ids.size() != coords.rows() || assignments.size() != coords.rows()) {
        throw ContractError("clusters_to_tsv: length mismatch");
    }
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += ids[i] + '\t' + format_sig(coords(i, 0)) + '\t' + format_sig(coords(i, 1)) + '\t';
        out += assignments[i] == kUnassigned ? std::string("-") : std::to_string(assignments[i]);
        out += '\n';
    }
    return out;
}

ClusterTable clusters_from_tsv(std::string_view text) {
    ClusterTable t;
    std::vector<double> xy;
    std::size_t line_no = 0;
    for (const auto& line : split(text, '\n')) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split(line, '\t');
        if (f.size() != 4) throw ParseError("cluster line " + std::to_string(line_no) + ": expected 4 columns");
        t.ids.push_back(f[0]);
        try {
            xy.push_back(std::stod(f[1]));
            xy.push_back(std::stod(f[2]));
            t.assignments.push_back(f[3] == "-" ? kUnassigned : std::stoi(f[3]));
        } catch (const std::exception&) {
            throw ParseError("cluster line " + std::to_string(line_no) + ": bad value");
        }
        if (t.assignments.back() < kUnassigned) throw ParseError("cluster line " + std::to_string(line_no) + ": bad cluster");
    }
    t.coords = Matrix(t.ids.size(), 2);
    std::copy(xy.begin(), xy.end(), t.coords.data().begin());
    return t;
}

std::string exemplars_to_json(const Exemplars& exemplars) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < exemplars.size(); ++c) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& e : exemplars[c]) arr.push_back({{"id", e.id}, {"silhouette", e.silhouette}});
        j[std::to_string(c)] = std::move(arr);
    }
    return j.dump(2) + "\n";
}

std::string model_to_json(const ClusterModel& model) {
    nlohmann::ordered_json j;
    j["K"] = model.k;
    j["threshold"] = model.threshold;
    j["log_likelihood"] = model.log_likelihood;
    j["iterations"] = model.iterations;
    auto comps = nlohmann::ordered_json::array();
    for (const auto& g : model.components) {
        comps.push_back({{"weight", g.weight},
                         {"mean", {g.mean[0], g.mean[1]}},
                         {"cov", {{g.cov[0], g.cov[1]}, {g.cov[1], g.cov[2]}}}});
    }
    j["components"] = std::move(comps);
    return j.dump(2) + "\n";
}

ClusterModel model_from_json(std::string_view text) {
    ClusterModel m;
    try {
        const auto j = nlohmann::json::parse(text);
        m.k = j.at("K").get<int>();
        m.threshold = j.value("threshold", 0.6);
        m.log_likelihood = j.value("log_likelihood", 0.0);
        for (const auto& c : j.at("components")) {
            Gaussian2 g;
            g.weight = c.at("weight").get<double>();
            g.mean[0] = c.at("mean").at(0).get<double>();
            g.mean[1] = c.at("mean").at(1).get<double>();
            g.cov[0] = c.at("cov").at(0).at(0).get<double>();
            g.cov[1] = c.at("cov").at(0).at(1).get<double>();
            g.cov[2] = c.at("cov").at(1).at(1).get<double>();
            m.components.push_back(g);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("cluster model JSON: ") + e.what());
    }
    if (static_cast<std::size_t>(m.k) != m.components.size()) throw ParseError("cluster model JSON: K disagrees with components");
    return m;
}

}  // namespace docmap
