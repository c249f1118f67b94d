#pragma once

#include <cstddef>
#include <cstdint>

#include "virtsense/clustering.hpp"
#include "virtsense/dataset.hpp"
#include "virtsense/matrix.hpp"
#include "virtsense/random.hpp"

namespace virtsense {

/// Planted sensor grouping used to build a synthetic correlation matrix.
using ClusterSpec = ClusteringSolution;

/// Triangular density on [low, high] with mode `peak`.
struct TriangularParams {
    double low = 0.5;
    double peak = 0.75;
    double high = 1.0;

    void validate() const;
};

inline constexpr double kDefaultEigenFloor = 1e-7;

/// One sensor per cluster first, then every other sensor to a uniform cluster.
ClusterSpec sample_cluster_spec(std::size_t n_sensors, std::size_t n_clusters, std::uint64_t seed);

/// Inverse CDF of the triangular distribution at u ∈ [0, 1].
double triangular_quantile(double u, const TriangularParams& t = {});
double sample_triangular(Rng& rng, const TriangularParams& t = {});
double sample_triangular(const TriangularParams& t, std::uint64_t seed);

/// Unit diagonal, triangular draws for co-clustered pairs, zero across clusters.
Matrix build_correlation_matrix(const ClusterSpec& spec, std::uint64_t seed, const TriangularParams& t = {});

/// Raises eigenvalues below `floor` to `floor`, rebuilds the matrix and
/// rescales it back to unit diagonal.
Matrix repair_psd(const Matrix& c, double floor = kDefaultEigenFloor);

/// Lower-triangular L with L·Lᵀ = a. Throws std::runtime_error if `a` is not positive definite.
Matrix cholesky(const Matrix& a);

/// Rows Z·Lᵀ with Z i.i.d. standard normal, min-max normalized per sensor.
/// Sensors are named s0, s1, ...
SensorDataset generate_dataset(const Matrix& correlation, std::size_t n_readings, std::uint64_t seed);

}  // namespace virtsense
