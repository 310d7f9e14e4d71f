#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "docmap/matrix.hpp"

namespace docmap {

// Joint input affinities of exact t-SNE.
struct Affinities {
    std::size_t n = 0;
    Matrix p;  // symmetric, zero diagonal, sums to 1
    double perplexity = 0;
    std::vector<double> betas;          // per-point Gaussian precision 1/(2 sigma^2)
    std::vector<double> entropies_bits; // achieved conditional entropies
};

inline constexpr double kAffinityFloor = 1e-12;

// Squared Euclidean distances. Requires n >= 2 and finite entries.
Matrix pairwise_sq_dists(const Matrix& x);

// Requires 1 < perplexity < n.
Affinities calibrate_affinities(const Matrix& sq_dists, double perplexity);

struct TsneParams {
    double perplexity = 30.0;
    int iterations = 1000;
    double learning_rate = 200.0;
    std::uint64_t seed = 0;
    double early_exaggeration = 12.0;
    int exaggeration_iterations = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch = 250;
    double init_stddev = 1e-4;
    int watchdog_interval = 50;
};

struct Projection {
    Matrix coords;  // n x 2, column means ~0
    double initial_kl = 0;
    double final_kl = 0;
    int iterations = 0;
    std::uint64_t seed = 0;
};

Projection tsne(const Matrix& x, const TsneParams& params);
// Same, starting from precomputed affinities.
Projection tsne(const Affinities& affinities, const TsneParams& params);

// KL(P || Q) with Student-t Q; q_ij clamped at 1e-12.
double kl_divergence(const Affinities& affinities, const Matrix& coords);
// Analytic dKL/dy (no exaggeration).
Matrix kl_gradient(const Affinities& affinities, const Matrix& coords);

// "id \t x \t y" lines, 9 significant digits.
std::string projection_to_tsv(const std::vector<std::string>& ids, const Matrix& coords);

struct ProjectionTable {
    std::vector<std::string> ids;
    Matrix coords;
};
ProjectionTable projection_from_tsv(std::string_view text);

}  // namespace docmap
