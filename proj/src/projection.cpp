#include "docmap/projection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "docmap/error.hpp"
#include "docmap/io.hpp"
#include "docmap/kernels.hpp"

namespace docmap {
namespace {

void require_finite(const Matrix& m, const char* what) {
    for (double v : m.data()) {
        if (!std::isfinite(v)) throw ContractError(std::string(what) + ": non-finite input");
    }
}

void recenter(Matrix& y) {
    const auto n = static_cast<double>(y.rows());
    for (std::size_t c = 0; c < y.cols(); ++c) {
        double mean = 0;
        for (std::size_t i = 0; i < y.rows(); ++i) mean += y(i, c);
        mean /= n;
        for (std::size_t i = 0; i < y.rows(); ++i) y(i, c) -= mean;
    }
}

double max_abs(const Matrix& m) {
    double best = 0;
    for (double v : m.data()) {
        if (!std::isfinite(v)) return v;
        best = std::max(best, std::abs(v));
    }
    return best;
}

bool all_finite(const Matrix& m) {
    return std::all_of(m.data().begin(), m.data().end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

Matrix pairwise_sq_dists(const Matrix& x) {
    if (x.rows() < 2) throw ContractError("pairwise_sq_dists: need at least 2 points");
    require_finite(x, "pairwise_sq_dists");
    return kernels::parallel::pairwise_sq_dists(x);
}

Affinities calibrate_affinities(const Matrix& sq_dists, double perplexity) {
    const auto n = sq_dists.rows();
    if (n < 2 || sq_dists.cols() != n) throw ContractError("calibrate_affinities: need a square matrix with n >= 2");
    if (!(perplexity > 1.0) || perplexity >= static_cast<double>(n)) {
        throw ContractError("calibrate_affinities: perplexity must satisfy 1 < perplexity < n (n = " +
                            std::to_string(n) + ")");
    }
    Matrix cond;
    const auto rows = kernels::parallel::calibrate_rows(sq_dists, perplexity, cond);

    Affinities a;
    a.n = n;
    a.perplexity = perplexity;
    a.p = Matrix(n, n);
    for (const auto& r : rows) {
        a.betas.push_back(r.beta);
        a.entropies_bits.push_back(r.entropy_bits);
    }
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    std::vector<double> row_sum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = std::max((cond(i, j) + cond(j, i)) * scale, kAffinityFloor);
            a.p(i, j) = v;
            row_sum[i] += v;
        }
    }
    double total = 0;
    for (double s : row_sum) total += s;
    for (double& v : a.p.data()) v /= total;
    return a;
}

double kl_divergence(const Affinities& affinities, const Matrix& coords) {
    if (coords.rows() != affinities.n || coords.cols() != 2) throw ContractError("kl_divergence: shape mismatch");
    return kernels::parallel::kl_divergence(affinities.p, coords);
}

Matrix kl_gradient(const Affinities& affinities, const Matrix& coords) {
    if (coords.rows() != affinities.n || coords.cols() != 2) throw ContractError("kl_gradient: shape mismatch");
    Matrix grad;
    kernels::parallel::tsne_gradient(affinities.p, coords, 1.0, grad);
    return grad;
}

Projection tsne(const Matrix& x, const TsneParams& params) {
    require_finite(x, "tsne");
    if (params.perplexity >= static_cast<double>(x.rows())) {
        throw ContractError("tsne: perplexity " + format_sig(params.perplexity, 6) + " must be below the point count " +
                            std::to_string(x.rows()));
    }
    return tsne(calibrate_affinities(pairwise_sq_dists(x), params.perplexity), params);
}

Projection tsne(const Affinities& affinities, const TsneParams& params) {
    if (params.iterations < 1 || !(params.learning_rate > 0)) {
        throw ContractError("tsne: iterations and learning rate must be positive");
    }
    const auto n = affinities.n;
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, params.init_stddev);

    Matrix y(n, 2);
    for (double& v : y.data()) v = normal(rng);

    Projection out;
    out.seed = params.seed;
    out.initial_kl = kl_divergence(affinities, y);

    Matrix grad;
    Matrix update(n, 2);
    Matrix gains(n, 2, 1.0);
    const auto watchdog = std::max(1, params.watchdog_interval);
    for (int iter = 0; iter < params.iterations; ++iter) {
        const bool early = iter < params.exaggeration_iterations;
        const double exaggeration = early ? params.early_exaggeration : 1.0;
        const double momentum = iter < params.momentum_switch ? params.initial_momentum : params.final_momentum;
        kernels::parallel::tsne_gradient(affinities.p, y, exaggeration, grad);

        auto g = grad.data();
        auto u = update.data();
        auto gn = gains.data();
        auto yv = y.data();
        for (std::size_t k = 0; k < g.size(); ++k) {
            gn[k] = (std::signbit(g[k]) != std::signbit(u[k])) ? gn[k] + 0.2 : gn[k] * 0.8;
            gn[k] = std::max(gn[k], 0.01);
            u[k] = momentum * u[k] - params.learning_rate * gn[k] * g[k];
            yv[k] += u[k];
        }
        recenter(y);

        if ((iter + 1) % watchdog == 0 || iter + 1 == params.iterations) {
            if (!all_finite(y) || !all_finite(grad)) {
                throw NumericError("t-SNE diverged at iteration " + std::to_string(iter + 1) +
                                   " (max |gradient| = " + format_sig(max_abs(grad), 6) + ")");
            }
        }
    }
    recenter(y);
    out.iterations = params.iterations;
    out.final_kl = kl_divergence(affinities, y);
    out.coords = std::move(y);
    return out;
}

std::string projection_to_tsv(const std::vector<std::string>& ids, const Matrix& coords) {
    if (ids.size() != coords.rows()) throw ContractError("projection_to_tsv: id count differs from row count");
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += ids[i];
        out += '\t';
        out += format_sig(coords(i, 0));
        out += '\t';
        out += format_sig(coords(i, 1));
        out += '\n';
    }
    return out;
}

ProjectionTable projection_from_tsv(std::string_view text) {
    ProjectionTable t;
    std::vector<double> xy;
    std::size_t line_no = 0;
    for (const auto& line : split(text, '\n')) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split(line, '\t');
        if (f.size() < 3) throw ParseError("projection line " + std::to_string(line_no) + ": expected id, x, y");
        t.ids.push_back(f[0]);
        try {
            std::size_t used = 0;
            xy.push_back(std::stod(f[1], &used));
            xy.push_back(std::stod(f[2], &used));
        } catch (const std::exception&) {
            throw ParseError("projection line " + std::to_string(line_no) + ": bad coordinate");
        }
    }
    t.coords = Matrix(t.ids.size(), 2);
    std::copy(xy.begin(), xy.end(), t.coords.data().begin());
    return t;
}

}  // namespace docmap
