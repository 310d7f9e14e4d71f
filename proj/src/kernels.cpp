#include "docmap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace docmap::kernels {
namespace {

using Index = std::ptrdiff_t;

// Bisection on beta for one row of the distance matrix.
CalibrationResult calibrate_row(std::span<const double> drow, std::size_t self, double target_bits,
                                std::span<double> out) {
    const std::size_t n = drow.size();
    double dmin = std::numeric_limits<double>::infinity();
    double dsum = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self) continue;
        dmin = std::min(dmin, drow[j]);
        dsum += drow[j];
    }
    // Start at the scale of the raw distances. The spread above dmin can be
    // rounding noise (equidistant points), which would give a huge beta.
    const double dmean = dsum / static_cast<double>(n - 1);

    CalibrationResult r;
    r.beta = dmean > 0 ? 1.0 / dmean : 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();

    auto evaluate = [&](double beta) {
        double sum = 0;
        double weighted = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == self) {
                out[j] = 0;
                continue;
            }
            const double shifted = drow[j] - dmin;
            const double w = std::exp(-beta * shifted);
            out[j] = w;
            sum += w;
            weighted += w * shifted;
        }
        for (std::size_t j = 0; j < n; ++j) out[j] /= sum;
        return (std::log(sum) + beta * weighted / sum) / std::numbers::ln2;
    };

    for (int step = 1; step <= kMaxBisectionSteps; ++step) {
        r.entropy_bits = evaluate(r.beta);
        r.steps = step;
        const double diff = r.entropy_bits - target_bits;
        if (std::abs(diff) < kEntropyTolerance) break;
        if (step == kMaxBisectionSteps) break;
        if (diff > 0) {
            lo = r.beta;
            r.beta = std::isinf(hi) ? r.beta * 2.0 : 0.5 * (r.beta + hi);
        } else {
            hi = r.beta;
            r.beta = 0.5 * (r.beta + lo);
        }
    }
    return r;
}

inline double student_t(std::span<const double> a, std::span<const double> b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return 1.0 / (1.0 + dx * dx + dy * dy);
}

// Row-wise log-sum-exp normalisation; returns the row log-likelihood.
double normalise_row(std::span<double> logs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : logs) m = std::max(m, v);
    double s = 0;
    for (double v : logs) s += std::exp(v - m);
    const double lse = m + std::log(s);
    for (double& v : logs) v = std::exp(v - lse);
    return lse;
}

}  // namespace

void set_num_threads(int n) {
#ifdef _OPENMP
    if (n > 0) {
        omp_set_num_threads(n);
    } else {
        omp_set_num_threads(omp_get_num_procs());
    }
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

double log_weighted_density(const Gaussian2& g, double x, double y) {
    const double a = g.cov[0];
    const double b = g.cov[1];
    const double c = g.cov[2];
    const double det = a * c - b * b;
    const double dx = x - g.mean[0];
    const double dy = y - g.mean[1];
    const double maha = (c * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
    return std::log(g.weight) - std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * maha;
}

namespace serial {

Matrix pairwise_sq_dists(const Matrix& x) {
    const auto n = x.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < x.cols(); ++k) {
                const double diff = x(i, k) - x(j, k);
                s += diff * diff;
            }
            d(i, j) = s;
            d(j, i) = s;
        }
    }
    return d;
}

std::vector<CalibrationResult> calibrate_rows(const Matrix& d, double perplexity, Matrix& cond) {
    const auto n = d.rows();
    cond = Matrix(n, n);
    std::vector<CalibrationResult> out(n);
    const double target = std::log2(perplexity);
    for (std::size_t i = 0; i < n; ++i) out[i] = calibrate_row(d.row(i), i, target, cond.row(i));
    return out;
}

double tsne_gradient(const Matrix& p, const Matrix& y, double exaggeration, Matrix& grad) {
    const auto n = y.rows();
    Matrix num(n, n);
    double z = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double t = student_t(y.row(i), y.row(j));
            num(i, j) = t;
            num(j, i) = t;
            z += 2.0 * t;
        }
    }
    grad = Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double mult = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
            grad(i, 0) += 4.0 * mult * (y(i, 0) - y(j, 0));
            grad(i, 1) += 4.0 * mult * (y(i, 1) - y(j, 1));
        }
    }
    return z;
}

double kl_divergence(const Matrix& p, const Matrix& y) {
    const auto n = y.rows();
    double z = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) z += student_t(y.row(i), y.row(j));
        }
    }
    double kl = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || p(i, j) <= 0) continue;
            const double q = std::max(student_t(y.row(i), y.row(j)) / z, 1e-12);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    }
    return kl;
}

std::vector<double> gmm_e_step(const Matrix& x, std::span<const Gaussian2> comps, Matrix& resp) {
    const auto n = x.rows();
    const auto k = comps.size();
    resp = Matrix(n, k);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) resp(i, c) = log_weighted_density(comps[c], x(i, 0), x(i, 1));
    }
    std::vector<double> ll(n);
    for (std::size_t i = 0; i < n; ++i) ll[i] = normalise_row(resp.row(i));
    return ll;
}

std::vector<double> silhouette(const Matrix& y, std::span<const int> labels) {
    const auto n = y.rows();
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    Matrix dist(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dist(i, j) = std::hypot(y(i, 0) - y(j, 0), y(i, 1) - y(j, 1));
        }
    }
    std::vector<double> s(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i) {
        const int li = labels[i];
        if (li < 0) continue;
        if (sizes[static_cast<std::size_t>(li)] == 1) {
            s[i] = 0.0;
            continue;
        }
        double a = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && labels[j] == li) a += dist(i, j);
        }
        a /= static_cast<double>(sizes[static_cast<std::size_t>(li)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == li || sizes[static_cast<std::size_t>(c)] == 0) continue;
            double m = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (labels[j] == c) m += dist(i, j);
            }
            b = std::min(b, m / static_cast<double>(sizes[static_cast<std::size_t>(c)]));
        }
        const double denom = std::max(a, b);
        s[i] = denom > 0 ? (b - a) / denom : 0.0;
    }
    return s;
}

}  // namespace serial

namespace parallel {

Matrix pairwise_sq_dists(const Matrix& x) {
    const auto n = static_cast<Index>(x.rows());
    const auto dims = x.cols();
    Matrix d(x.rows(), x.rows());
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        const auto xi = x.row(static_cast<std::size_t>(i));
        auto out = d.row(static_cast<std::size_t>(i));
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto xj = x.row(static_cast<std::size_t>(j));
            double s = 0;
            for (std::size_t k = 0; k < dims; ++k) {
                const double diff = xi[k] - xj[k];
                s += diff * diff;
            }
            out[static_cast<std::size_t>(j)] = s;
        }
    }
    return d;
}

std::vector<CalibrationResult> calibrate_rows(const Matrix& d, double perplexity, Matrix& cond) {
    const auto n = static_cast<Index>(d.rows());
    cond = Matrix(d.rows(), d.rows());
    std::vector<CalibrationResult> out(d.rows());
    const double target = std::log2(perplexity);
#pragma omp parallel for schedule(dynamic, 16)
    for (Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out[u] = calibrate_row(d.row(u), u, target, cond.row(u));
    }
    return out;
}

double tsne_gradient(const Matrix& p, const Matrix& y, double exaggeration, Matrix& grad) {
    const auto n = static_cast<Index>(y.rows());
    std::vector<double> row_z(y.rows(), 0.0);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        const auto yi = y.row(static_cast<std::size_t>(i));
        double s = 0;
        for (Index j = 0; j < n; ++j) {
            if (j != i) s += student_t(yi, y.row(static_cast<std::size_t>(j)));
        }
        row_z[static_cast<std::size_t>(i)] = s;
    }
    double z = 0;
    for (double s : row_z) z += s;

    grad = Matrix(y.rows(), 2);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const auto yi = y.row(ui);
        const auto pi = p.row(ui);
        double gx = 0;
        double gy = 0;
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto uj = static_cast<std::size_t>(j);
            const auto yj = y.row(uj);
            const double t = student_t(yi, yj);
            const double mult = (exaggeration * pi[uj] - t / z) * t;
            gx += mult * (yi[0] - yj[0]);
            gy += mult * (yi[1] - yj[1]);
        }
        grad(ui, 0) = 4.0 * gx;
        grad(ui, 1) = 4.0 * gy;
    }
    return z;
}

double kl_divergence(const Matrix& p, const Matrix& y) {
    const auto n = static_cast<Index>(y.rows());
    std::vector<double> row_z(y.rows(), 0.0);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        double s = 0;
        for (Index j = 0; j < n; ++j) {
            if (j != i) s += student_t(y.row(static_cast<std::size_t>(i)), y.row(static_cast<std::size_t>(j)));
        }
        row_z[static_cast<std::size_t>(i)] = s;
    }
    double z = 0;
    for (double s : row_z) z += s;

    std::vector<double> row_kl(y.rows(), 0.0);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        double s = 0;
        for (Index j = 0; j < n; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            const double pij = p(ui, uj);
            if (j == i || pij <= 0) continue;
            const double q = std::max(student_t(y.row(ui), y.row(uj)) / z, 1e-12);
            s += pij * std::log(pij / q);
        }
        row_kl[ui] = s;
    }
    double kl = 0;
    for (double s : row_kl) kl += s;
    return kl;
}

std::vector<double> gmm_e_step(const Matrix& x, std::span<const Gaussian2> comps, Matrix& resp) {
    const auto n = static_cast<Index>(x.rows());
    resp = Matrix(x.rows(), comps.size());
    std::vector<double> ll(x.rows());
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        auto row = resp.row(ui);
        for (std::size_t c = 0; c < comps.size(); ++c) row[c] = log_weighted_density(comps[c], x(ui, 0), x(ui, 1));
        ll[ui] = normalise_row(row);
    }
    return ll;
}

std::vector<double> silhouette(const Matrix& y, std::span<const int> labels) {
    const auto n = static_cast<Index>(y.rows());
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    const auto uk = static_cast<std::size_t>(k);
    std::vector<std::size_t> sizes(uk, 0);
    for (int l : labels) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    std::vector<double> s(y.rows(), std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel
    {
        std::vector<double> sums(uk);
#pragma omp for schedule(static)
        for (Index i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const int li = labels[ui];
            if (li < 0) continue;
            const auto own = static_cast<std::size_t>(li);
            if (sizes[own] == 1) {
                s[ui] = 0.0;
                continue;
            }
            std::fill(sums.begin(), sums.end(), 0.0);
            for (Index j = 0; j < n; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                if (j == i || labels[uj] < 0) continue;
                sums[static_cast<std::size_t>(labels[uj])] += std::hypot(y(ui, 0) - y(uj, 0), y(ui, 1) - y(uj, 1));
            }
            const double a = sums[own] / static_cast<double>(sizes[own] - 1);
            double b = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < uk; ++c) {
                if (c == own || sizes[c] == 0) continue;
                b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
            }
            const double denom = std::max(a, b);
            s[ui] = denom > 0 ? (b - a) / denom : 0.0;
        }
    }
    return s;
}

}  // namespace parallel

}  // namespace docmap::kernels
