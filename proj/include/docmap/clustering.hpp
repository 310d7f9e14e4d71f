#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docmap/kernels.hpp"
#include "docmap/matrix.hpp"

namespace docmap {

inline constexpr int kUnassigned = -1;

struct GmmParams {
    int components = 9;
    std::uint64_t seed = 0;
    int restarts = 5;
    int kmeans_steps = 10;
    double regularization = 1e-6;  // added to the covariance diagonal each M-step
    double tolerance = 1e-6;       // on mean per-point log-likelihood gain
    int max_iterations = 200;
    // A document stays unassigned when its best posterior is <= threshold.
    double threshold = 0.6;
};

struct ClusterModel {
    int k = 0;
    std::vector<kernels::Gaussian2> components;
    double log_likelihood = 0;  // total over points
    Matrix posteriors;          // n x k
    std::vector<int> assignments;
    double threshold = 0.6;
    int iterations = 0;
    // Total log-likelihood after every E-step, one list per restart.
    std::vector<std::vector<double>> restart_histories;
    int best_restart = 0;
};

// EM with full covariances on 2-D points, k-means++ seeded, best of
// params.restarts runs. Throws ContractError for k > n and NumericError when
// all points coincide with k > 1.
ClusterModel fit_gmm(const Matrix& coords, const GmmParams& params);

// Posterior responsibilities of `coords` under the given components.
Matrix posteriors(const Matrix& coords, std::span<const kernels::Gaussian2> components);

// argmax posterior if it exceeds `threshold`, else kUnassigned. Ties go to
// the lowest component index.
std::vector<int> assign(const Matrix& posteriors, double threshold);

struct Exemplar {
    std::string id;
    double silhouette = 0;
};
// Indexed by cluster; empty lists for clusters with no assigned points.
using Exemplars = std::vector<std::vector<Exemplar>>;

// Silhouette per point on the map coordinates; NaN for unassigned points.
std::vector<double> silhouette_values(const Matrix& coords, std::span<const int> assignments);

// Top `top_m` documents of each cluster by silhouette (descending, ties in
// document order). Requires at least two non-empty clusters.
Exemplars silhouette_exemplars(const Matrix& coords, const std::vector<std::string>& ids,
                               std::span<const int> assignments, std::size_t top_m);

// "id \t x \t y \t cluster" with "-" for unassigned.
std::string clusters_to_tsv(const std::vector<std::string>& ids, const Matrix& coords,
                            std::span<const int> assignments);
struct ClusterTable {
    std::vector<std::string> ids;
    Matrix coords;
    std::vector<int> assignments;
};
ClusterTable clusters_from_tsv(std::string_view text);

std::string exemplars_to_json(const Exemplars& exemplars);
std::string model_to_json(const ClusterModel& model);
// Components, threshold and log-likelihood only.
ClusterModel model_from_json(std::string_view text);

}  // namespace docmap
