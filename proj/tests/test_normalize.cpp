#include <cmath>

#include <doctest.h>

#include "prepbench/normalize.hpp"
#include "prepbench/rng.hpp"

using namespace prepbench;

namespace {

FeatureMatrix seeded_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
    FeatureMatrix x = make_matrix(n, d);
    CounterRng rng(seed);
    for (auto& v : x.values)
        v = rng.next_unit();
    // correlate neighboring columns so the covariance is far from diagonal
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 1; j < d; ++j)
            x.at(i, j) = 0.6 * x.at(i, j - 1) + 0.4 * x.at(i, j);
    return x;
}

// independent oracle: plain triple-loop sample covariance
std::vector<double> covariance_oracle(const FeatureMatrix& x) {
    std::vector<double> mean(x.d, 0.0);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < x.d; ++j)
            mean[j] += x.at(i, j) / static_cast<double>(x.n);
    std::vector<double> cov(x.d * x.d, 0.0);
    for (std::size_t j = 0; j < x.d; ++j)
        for (std::size_t k = 0; k < x.d; ++k) {
            double s = 0;
            for (std::size_t i = 0; i < x.n; ++i)
                s += (x.at(i, j) - mean[j]) * (x.at(i, k) - mean[k]);
            cov[j * x.d + k] = s / static_cast<double>(x.n - 1);
        }
    return cov;
}

} // namespace

TEST_CASE("fit mean on constant column") {
    FeatureMatrix x = make_matrix(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        x.at(i, 0) = 4.5;
        x.at(i, 1) = static_cast<double>(i);
    }
    auto model = fit_norm(NormKind::Mean, x);
    CHECK(model.mean[0] == doctest::Approx(4.5));
    CHECK(model.mean[1] == doctest::Approx(1.0));
}

TEST_CASE("standardize d=1 pair") {
    FeatureMatrix x = make_matrix(2, 1);
    x.at(0, 0) = 0.0;
    x.at(1, 0) = 2.0;
    auto model = fit_norm(NormKind::Standardize, x);
    CHECK(model.std_dev[0] == doctest::Approx(std::sqrt(2.0))); // n-1 convention
    auto out = apply_norm(model, x);
    CHECK(out.at(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(out.at(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("zca of identity covariance is identity") {
    // two orthogonal +/- pairs give exactly C = I for d=2
    FeatureMatrix x = make_matrix(4, 2);
    double s = std::sqrt(3.0 / 2.0);
    x.at(0, 0) = s;
    x.at(1, 0) = -s;
    x.at(2, 1) = s;
    x.at(3, 1) = -s;
    auto model = fit_norm(NormKind::Zca, x, 0.0);
    CHECK(model.whitening[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(model.whitening[3] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(model.whitening[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("centering and standardization laws") {
    auto x = seeded_matrix(50, 6, 123);

    auto centered = apply_norm(fit_norm(NormKind::Mean, x), x);
    for (std::size_t j = 0; j < x.d; ++j) {
        double m = 0;
        for (std::size_t i = 0; i < x.n; ++i)
            m += centered.at(i, j);
        CHECK(std::abs(m / static_cast<double>(x.n)) < 1e-12);
    }

    auto standardized = apply_norm(fit_norm(NormKind::Standardize, x), x);
    for (std::size_t j = 0; j < x.d; ++j) {
        double m = 0, v = 0;
        for (std::size_t i = 0; i < x.n; ++i)
            m += standardized.at(i, j);
        m /= static_cast<double>(x.n);
        for (std::size_t i = 0; i < x.n; ++i)
            v += (standardized.at(i, j) - m) * (standardized.at(i, j) - m);
        v /= static_cast<double>(x.n - 1);
        CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("zca whitens to identity covariance") {
    auto x = seeded_matrix(1000, 16, 77);
    auto model = fit_norm(NormKind::Zca, x, 0.0);
    auto white = apply_norm(model, x);
    auto cov = covariance_oracle(white);
    for (std::size_t j = 0; j < 16; ++j)
        for (std::size_t k = 0; k < 16; ++k) {
            double want = j == k ? 1.0 : 0.0;
            CHECK(std::abs(cov[j * 16 + k] - want) < 1e-6);
        }

    // symmetry is the defining zca property
    for (std::size_t j = 0; j < 16; ++j)
        for (std::size_t k = 0; k < 16; ++k)
            CHECK(std::abs(model.whitening[j * 16 + k] - model.whitening[k * 16 + j]) < 1e-9);
}

TEST_CASE("jacobi eigensolver reconstructs and is orthonormal") {
    auto x = seeded_matrix(200, 8, 9);
    auto cov = covariance_oracle(x);
    std::vector<double> eigvals, u;
    jacobi_eigen(cov, 8, eigvals, u);

    double norm_c = 0;
    for (double v : cov)
        norm_c = std::max(norm_c, std::abs(v));

    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) {
            double recon = 0, dot = 0;
            for (std::size_t i = 0; i < 8; ++i) {
                recon += u[r * 8 + i] * eigvals[i] * u[c * 8 + i];
                dot += u[i * 8 + r] * u[i * 8 + c];
            }
            CHECK(std::abs(recon - cov[r * 8 + c]) < 1e-9 * std::max(norm_c, 1.0));
            CHECK(std::abs(dot - (r == c ? 1.0 : 0.0)) < 1e-9);
        }
}

TEST_CASE("fit is deterministic") {
    auto x = seeded_matrix(100, 8, 42);
    auto a = fit_norm(NormKind::Zca, x, 1e-2);
    auto b = fit_norm(NormKind::Zca, x, 1e-2);
    CHECK(a.mean == b.mean);
    CHECK(a.whitening == b.whitening);
}

TEST_CASE("error paths") {
    FeatureMatrix one = make_matrix(1, 3);
    CHECK_THROWS_AS(fit_norm(NormKind::Standardize, one), Error);

    auto x = seeded_matrix(10, 3, 1);
    auto model = fit_norm(NormKind::Mean, x);
    FeatureMatrix wrong = make_matrix(4, 2);
    CHECK_THROWS_AS(apply_norm(model, wrong), Error);
}
