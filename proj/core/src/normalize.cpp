#include "prepbench/normalize.hpp"

#include <algorithm>
#include <cmath>

namespace prepbench {

FeatureMatrix make_matrix(std::size_t n, std::size_t d) {
    FeatureMatrix m;
    m.n = n;
    m.d = d;
    m.values.assign(n * d, 0.0);
    return m;
}

void jacobi_eigen(std::vector<double> a, std::size_t d, std::vector<double>& eigvals,
                  std::vector<double>& eigvecs) {
    eigvecs.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        eigvecs[i * d + i] = 1.0;

    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        trace += std::abs(a[i * d + i]);
    double tol = 1e-12 * std::max(trace, 1.0);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                s += 2.0 * a[i * d + j] * a[i * d + j];
        return std::sqrt(s);
    };

    const int max_sweeps = 100;
    int sweep = 0;
    while (off_norm() >= tol) {
        if (++sweep > max_sweeps)
            throw Error(ErrorCode::EigenNoConvergence, "Jacobi sweeps exhausted");
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                double apq = a[p * d + q];
                if (std::abs(apq) == 0.0)
                    continue;
                double app = a[p * d + p], aqq = a[q * d + q];
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    double akp = a[k * d + p], akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    double apk = a[p * d + k], aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    double vkp = eigvecs[k * d + p], vkq = eigvecs[k * d + q];
                    eigvecs[k * d + p] = c * vkp - s * vkq;
                    eigvecs[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    eigvals.resize(d);
    for (std::size_t i = 0; i < d; ++i)
        eigvals[i] = a[i * d + i];
}

NormModel fit_norm(NormKind kind, const FeatureMatrix& x, double epsilon) {
    if (x.n < 1 || x.d < 1)
        throw Error(ErrorCode::TooFewSamples, "empty feature matrix");
    if (kind != NormKind::Mean && x.n < 2)
        throw Error(ErrorCode::TooFewSamples, "standardize/zca need n >= 2");
    if (epsilon < 0)
        throw Error(ErrorCode::NonPositiveParam, "epsilon must be >= 0");
    if (kind == NormKind::Zca && x.d > 3072)
        throw Error(ErrorCode::TooFewSamples, "zca limited to d <= 3072");

    NormModel model;
    model.kind = kind;
    model.d = x.d;
    model.epsilon = epsilon;
    model.mean.assign(x.d, 0.0);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < x.d; ++j)
            model.mean[j] += x.at(i, j);
    for (auto& m : model.mean)
        m /= static_cast<double>(x.n);

    if (kind == NormKind::Standardize) {
        model.std_dev.assign(x.d, 0.0);
        for (std::size_t i = 0; i < x.n; ++i)
            for (std::size_t j = 0; j < x.d; ++j) {
                double c = x.at(i, j) - model.mean[j];
                model.std_dev[j] += c * c;
            }
        for (auto& s : model.std_dev)
            s = std::max(std::sqrt(s / static_cast<double>(x.n - 1)), 1e-8);
    } else if (kind == NormKind::Zca) {
        std::size_t d = x.d;
        std::vector<double> cov(d * d, 0.0);
        for (std::size_t i = 0; i < x.n; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double cj = x.at(i, j) - model.mean[j];
                for (std::size_t k = j; k < d; ++k)
                    cov[j * d + k] += cj * (x.at(i, k) - model.mean[k]);
            }
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = j; k < d; ++k) {
                cov[j * d + k] /= static_cast<double>(x.n - 1);
                cov[k * d + j] = cov[j * d + k];
            }

        std::vector<double> eigvals, u;
        jacobi_eigen(cov, d, eigvals, u);

        // W = U diag(1/sqrt(lambda + eps)) U^T
        model.whitening.assign(d * d, 0.0);
        std::vector<double> inv_sqrt(d);
        for (std::size_t i = 0; i < d; ++i)
            inv_sqrt[i] = 1.0 / std::sqrt(std::max(eigvals[i], 0.0) + epsilon);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) {
                double sum = 0.0;
                for (std::size_t i = 0; i < d; ++i)
                    sum += u[r * d + i] * inv_sqrt[i] * u[c * d + i];
                model.whitening[r * d + c] = sum;
            }
    }
    return model;
}

FeatureMatrix apply_norm(const NormModel& model, const FeatureMatrix& x) {
    if (x.d != model.d)
        throw Error(ErrorCode::DimensionMismatch, "feature dimension mismatch");
    FeatureMatrix out = make_matrix(x.n, x.d);
    switch (model.kind) {
    case NormKind::Mean:
        for (std::size_t i = 0; i < x.n; ++i)
            for (std::size_t j = 0; j < x.d; ++j)
                out.at(i, j) = x.at(i, j) - model.mean[j];
        break;
    case NormKind::Standardize:
        for (std::size_t i = 0; i < x.n; ++i)
            for (std::size_t j = 0; j < x.d; ++j)
                out.at(i, j) = (x.at(i, j) - model.mean[j]) / model.std_dev[j];
        break;
    case NormKind::Zca:
        for (std::size_t i = 0; i < x.n; ++i) {
            for (std::size_t j = 0; j < x.d; ++j) {
                double sum = 0.0;
                for (std::size_t k = 0; k < x.d; ++k)
                    sum += model.whitening[j * x.d + k] * (x.at(i, k) - model.mean[k]);
                out.at(i, j) = sum;
            }
        }
        break;
    }
    return out;
}

} // namespace prepbench
