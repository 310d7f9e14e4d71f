#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "docmap/clustering.hpp"
#include "docmap/error.hpp"
#include "docmap/xml.hpp"

using namespace docmap;

namespace {

Matrix blobs(std::uint64_t seed, std::initializer_list<std::pair<double, double>> centres, std::size_t per,
             double sigma) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, sigma);
    Matrix m(centres.size() * per, 2);
    std::size_t i = 0;
    for (const auto& [cx, cy] : centres) {
        for (std::size_t k = 0; k < per; ++k, ++i) {
            m(i, 0) = cx + g(rng);
            m(i, 1) = cy + g(rng);
        }
    }
    return m;
}

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
    Matrix m(r.size(), r.begin()->size());
    std::size_t i = 0;
    for (const auto& row : r) {
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("gmm: K=1 is the sample mean and covariance") {
    const auto x = blobs(1, {{2, -1}}, 200, 1.5);
    GmmParams p;
    p.components = 1;
    const auto m = fit_gmm(x, p);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        mx += x(i, 0) / 200.0;
        my += x(i, 1) / 200.0;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        sxx += (x(i, 0) - mx) * (x(i, 0) - mx) / 200.0;
        sxy += (x(i, 0) - mx) * (x(i, 1) - my) / 200.0;
        syy += (x(i, 1) - my) * (x(i, 1) - my) / 200.0;
    }
    const auto& c = m.components[0];
    CHECK(c.weight == doctest::Approx(1.0));
    CHECK(c.mean[0] == doctest::Approx(mx).epsilon(1e-12));
    CHECK(c.mean[1] == doctest::Approx(my).epsilon(1e-12));
    CHECK(c.cov[0] == doctest::Approx(sxx + p.regularization).epsilon(1e-12));
    CHECK(c.cov[1] == doctest::Approx(sxy).epsilon(1e-10));
    CHECK(c.cov[2] == doctest::Approx(syy + p.regularization).epsilon(1e-12));
}

TEST_CASE("gmm: two blobs recovered up to label swap") {
    const auto x = blobs(2, {{0, 0}, {10, 10}}, 100, 0.5);
    GmmParams p;
    p.components = 2;
    const auto m = fit_gmm(x, p);
    const int a = m.assignments[0];
    const int b = m.assignments[100];
    CHECK(a != b);
    CHECK(a != kUnassigned);
    for (std::size_t i = 0; i < 200; ++i) CHECK(m.assignments[i] == (i < 100 ? a : b));
}

TEST_CASE("gmm: log-likelihood never decreases") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto x = blobs(s, {{0, 0}, {3, 1}, {-2, 4}}, 100, 1.2);
        GmmParams p;
        p.components = 3;
        p.seed = s;
        const auto m = fit_gmm(x, p);
        CHECK(m.restart_histories.size() == 5);
        for (const auto& h : m.restart_histories) {
            for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] >= h[i - 1] - 1e-8);
        }
    }
}

TEST_CASE("gmm: stored posteriors match the returned parameters") {
    const auto x = blobs(5, {{0, 0}, {4, 0}, {2, 3}}, 60, 1.0);
    GmmParams p;
    p.components = 3;
    const auto m = fit_gmm(x, p);
    const auto post = posteriors(x, m.components);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0;
        for (int k = 0; k < 3; ++k) {
            s += m.posteriors(i, k);
            CHECK(std::abs(post(i, k) - m.posteriors(i, k)) < 1e-9);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
    double w = 0;
    for (const auto& c : m.components) w += c.weight;
    CHECK(w == doctest::Approx(1.0));
    CHECK(m.assignments == assign(m.posteriors, 0.6));
}

TEST_CASE("gmm: deterministic per seed") {
    const auto x = blobs(6, {{0, 0}, {5, 5}, {0, 5}}, 50, 1.5);
    GmmParams p;
    p.components = 3;
    p.seed = 9;
    const auto a = fit_gmm(x, p);
    const auto b = fit_gmm(x, p);
    CHECK(a.posteriors == b.posteriors);
    CHECK(a.log_likelihood == b.log_likelihood);
}

TEST_CASE("gmm: degenerate inputs") {
    GmmParams p;
    p.components = 5;
    CHECK_THROWS_AS(fit_gmm(blobs(1, {{0, 0}}, 3, 1.0), p), ContractError);
    Matrix same(10, 2, 1.5);
    p.components = 2;
    CHECK_THROWS_AS(fit_gmm(same, p), NumericError);
    p.components = 1;
    CHECK_NOTHROW(fit_gmm(same, p));
}

TEST_CASE("assign: threshold rule") {
    const auto post = rows({{0.9, 0.1}, {0.5, 0.5}, {0.61, 0.39}, {0.6, 0.4}, {0.2, 0.8}});
    CHECK(assign(post, 0.6) == std::vector<int>{0, kUnassigned, 0, kUnassigned, 1});
    CHECK(assign(rows({{0.5, 0.5}}), 0.3) == std::vector<int>{0});
}

TEST_CASE("silhouette: two pairs of points") {
    const auto y = rows({{0, 0}, {0, 1}, {10, 0}, {10, 1}});
    const std::vector<int> labels{0, 0, 1, 1};
    const auto s = silhouette_values(y, labels);
    const double b = (10.0 + std::sqrt(101.0)) / 2.0;
    for (double v : s) {
        CHECK(v == doctest::Approx((b - 1.0) / b).epsilon(1e-12));
        CHECK(v == doctest::Approx(0.9005).epsilon(1e-3));
    }
}

TEST_CASE("silhouette: singleton is zero, unassigned is NaN") {
    const auto y = rows({{0, 0}, {0, 1}, {10, 0}, {5, 5}});
    const std::vector<int> labels{0, 0, 1, kUnassigned};
    const auto s = silhouette_values(y, labels);
    CHECK(s[2] == 0.0);
    CHECK(std::isnan(s[3]));
}

TEST_CASE("exemplars: top_m per cluster") {
    const auto y = rows({{0, 0}, {0, 1}, {0, 5}, {10, 0}, {10, 1}, {99, 99}});
    const std::vector<int> labels{0, 0, 0, 1, 1, kUnassigned};
    const std::vector<std::string> ids{"a", "b", "c", "d", "e", "f"};
    const auto ex = silhouette_exemplars(y, ids, labels, 1);
    REQUIRE(ex.size() == 2);
    CHECK(ex[0].size() == 1);
    CHECK(ex[1].size() == 1);
    CHECK(ex[0][0].id == "b");  // a = 2.5 vs 3 for "a"
    const auto all = silhouette_exemplars(y, ids, labels, 10);
    CHECK(all[0].size() == 3);
    CHECK(all[0][0].silhouette >= all[0][1].silhouette);
    CHECK_THROWS_AS(silhouette_exemplars(y, ids, std::vector<int>{0, 0, 0, 0, 0, 0}, 1), ContractError);
    const auto json = exemplars_to_json(ex);
    CHECK(json.find("\"0\"") != std::string::npos);
}

TEST_CASE("clusters TSV and model JSON round trip") {
    const auto y = rows({{0.5, -1}, {2, 3}});
    const std::vector<int> a{1, kUnassigned};
    const auto text = clusters_to_tsv({"x", "y"}, y, a);
    CHECK(text.find("\t-") != std::string::npos);
    const auto t = clusters_from_tsv(text);
    CHECK(t.ids == std::vector<std::string>{"x", "y"});
    CHECK(t.assignments == a);
    CHECK(t.coords == y);

    const auto x = blobs(3, {{0, 0}, {6, 6}}, 30, 1.0);
    GmmParams p;
    p.components = 2;
    const auto m = fit_gmm(x, p);
    const auto back = model_from_json(model_to_json(m));
    CHECK(back.k == 2);
    CHECK(back.threshold == 0.6);
    CHECK(back.components[1].mean[0] == doctest::Approx(m.components[1].mean[0]).epsilon(1e-12));
    CHECK(back.log_likelihood == doctest::Approx(m.log_likelihood).epsilon(1e-12));
}

TEST_CASE("gmm: EM beats every point of a coarse parameter grid") {
    // n = 8, K = 2: two loose groups.
    const auto x = rows({{0, 0}, {0.5, 0.3}, {-0.4, 0.6}, {0.2, -0.5}, {4, 4}, {4.6, 3.5}, {3.7, 4.4}, {4.2, 4.9}});
    GmmParams p;
    p.components = 2;
    const auto m = fit_gmm(x, p);
    auto ll_of = [&](const std::vector<kernels::Gaussian2>& comps) {
        double ll = 0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double mx = -1e300;
            std::vector<double> terms;
            for (const auto& c : comps) terms.push_back(kernels::log_weighted_density(c, x(i, 0), x(i, 1)));
            for (double t : terms) mx = std::max(mx, t);
            double s = 0;
            for (double t : terms) s += std::exp(t - mx);
            ll += mx + std::log(s);
        }
        return ll;
    };
    const double em_ll = ll_of(m.components);
    CHECK(em_ll == doctest::Approx(m.log_likelihood).epsilon(1e-9));
    std::vector<double> grid;
    for (int g = 0; g <= 5; ++g) grid.push_back(-1.0 + g * 1.2);
    double best_grid = -1e300;
    for (double ax : grid)
        for (double ay : grid)
            for (double bx : grid)
                for (double by : grid)
                    for (double va : {0.1, 0.5, 2.0})
                        for (double vb : {0.1, 0.5, 2.0})
                            for (double w : {0.3, 0.5, 0.7}) {
                                std::vector<kernels::Gaussian2> c(2);
                                c[0].weight = w;
                                c[0].mean[0] = ax;
                                c[0].mean[1] = ay;
                                c[0].cov[0] = c[0].cov[2] = va;
                                c[0].cov[1] = 0;
                                c[1].weight = 1 - w;
                                c[1].mean[0] = bx;
                                c[1].mean[1] = by;
                                c[1].cov[0] = c[1].cov[2] = vb;
                                c[1].cov[1] = 0;
                                best_grid = std::max(best_grid, ll_of(c));
                            }
    CHECK(em_ll >= best_grid);
}

TEST_CASE("assign: raising the threshold never assigns more") {
    const auto x = blobs(8, {{0, 0}, {2, 2}, {4, 0}}, 40, 1.2);
    GmmParams p;
    p.components = 3;
    const auto m = fit_gmm(x, p);
    std::size_t prev = 0;
    for (double t : {0.0, 0.3, 0.5, 0.6, 0.7, 0.9, 0.99}) {
        const auto a = assign(m.posteriors, t);
        const auto un = static_cast<std::size_t>(std::count(a.begin(), a.end(), kUnassigned));
        CHECK(un >= prev);
        prev = un;
    }
    for (double s : silhouette_values(x, m.assignments)) {
        if (!std::isnan(s)) {
            CHECK(s >= -1.0);
            CHECK(s <= 1.0);
        }
    }
}
