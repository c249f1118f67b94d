#pragma once

#include <cstddef>
#include <vector>

#include "virtsense/dataset.hpp"
#include "virtsense/matrix.hpp"

namespace virtsense {

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
/// Column k of `vectors` is the unit eigenvector for `values[k]`.
struct Spectrum {
    std::vector<double> values;
    Matrix vectors;
};

struct JacobiOptions {
    int max_sweeps = 100;
    /// Stop once the off-diagonal Frobenius norm falls below this fraction of the full norm.
    double relative_tolerance = 1e-15;
};

/// Unbiased sample covariance between sensors (columns).
Matrix covariance_matrix(const SensorDataset& d);
Matrix covariance_matrix(const Matrix& samples);

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
/// Throws std::runtime_error if the sweeps do not converge.
Spectrum eigendecompose_sym(const Matrix& m, const JacobiOptions& opts = {});

/// Smallest M whose top-M eigenvalues explain at least `variance_fraction`
/// of the total covariance spectrum.
std::size_t estimate_min_sensors(const SensorDataset& d, double variance_fraction = 0.95);
std::size_t min_components_for_fraction(const Spectrum& s, double variance_fraction);

}  // namespace virtsense
