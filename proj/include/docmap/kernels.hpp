#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "docmap/matrix.hpp"

// Hot loops of projection and clustering. Every kernel has a plain serial
// reference (serial::) and an OpenMP row-parallel version (parallel::) used by
// the library. Parallel kernels reduce per-row partials in index order, so
// their output does not depend on the thread count.

namespace docmap::kernels {

// 0 selects the OpenMP default.
void set_num_threads(int n);
int max_threads();

struct Gaussian2 {
    double weight = 0;
    double mean[2] = {0, 0};
    double cov[3] = {1, 0, 1};  // xx, xy, yy
};

// log(weight * N(x | mean, cov)) for a 2-D point.
double log_weighted_density(const Gaussian2& g, double x, double y);

struct CalibrationResult {
    double beta = 1.0;
    double entropy_bits = 0.0;
    int steps = 0;
};

// Row i of `cond` gets p_{j|i} with the precision beta_i found by bisection so
// the row entropy (bits) matches log2(perplexity).
inline constexpr double kEntropyTolerance = 1e-5;
inline constexpr int kMaxBisectionSteps = 50;

namespace serial {

Matrix pairwise_sq_dists(const Matrix& x);
std::vector<CalibrationResult> calibrate_rows(const Matrix& d, double perplexity, Matrix& cond);
// Gradient of KL(P || Q) with P scaled by `exaggeration`. Returns the Student-t
// normaliser Z = sum_{i != j} (1 + |y_i - y_j|^2)^-1.
double tsne_gradient(const Matrix& p, const Matrix& y, double exaggeration, Matrix& grad);
double kl_divergence(const Matrix& p, const Matrix& y);
// Posterior responsibilities; returns per-point log-likelihood.
std::vector<double> gmm_e_step(const Matrix& x, std::span<const Gaussian2> comps, Matrix& resp);
// labels: component index or -1; points labelled -1 get NaN.
std::vector<double> silhouette(const Matrix& y, std::span<const int> labels);

}  // namespace serial

namespace parallel {

Matrix pairwise_sq_dists(const Matrix& x);
std::vector<CalibrationResult> calibrate_rows(const Matrix& d, double perplexity, Matrix& cond);
double tsne_gradient(const Matrix& p, const Matrix& y, double exaggeration, Matrix& grad);
double kl_divergence(const Matrix& p, const Matrix& y);
std::vector<double> gmm_e_step(const Matrix& x, std::span<const Gaussian2> comps, Matrix& resp);
std::vector<double> silhouette(const Matrix& y, std::span<const int> labels);

}  // namespace parallel

}  // namespace docmap::kernels
