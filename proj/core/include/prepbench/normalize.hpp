#pragma once

#include <cstddef>
#include <vector>

#include "prepbench/error.hpp"

namespace prepbench {

/// Row-major n x d matrix of flattened samples.
struct FeatureMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> values; // n*d

    double& at(std::size_t row, std::size_t col) { return values[row * d + col]; }
    double at(std::size_t row, std::size_t col) const { return values[row * d + col]; }
};

FeatureMatrix make_matrix(std::size_t n, std::size_t d);

enum class NormKind { Mean, Standardize, Zca };

struct NormModel {
    NormKind kind = NormKind::Mean;
    std::vector<double> mean;      // d
    std::vector<double> std_dev;   // d (standardize)
    std::vector<double> whitening; // d*d row-major (zca)
    double epsilon = 0.0;
    std::size_t d = 0;
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
/// a is d x d row-major, symmetric; on return eigvecs columns are eigenvectors.
void jacobi_eigen(std::vector<double> a, std::size_t d, std::vector<double>& eigvals,
                  std::vector<double>& eigvecs);

NormModel fit_norm(NormKind kind, const FeatureMatrix& x, double epsilon = 1e-2);
FeatureMatrix apply_norm(const NormModel& model, const FeatureMatrix& x);

} // namespace prepbench
