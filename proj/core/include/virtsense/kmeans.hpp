#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "virtsense/clustering.hpp"
#include "virtsense/dataset.hpp"
#include "virtsense/matrix.hpp"

namespace virtsense {

struct KMeansOptions {
    std::size_t max_iter = 300;
    /// Lloyd stops once no centroid moves farther than this.
    double tol = 1e-6;
};

struct KMeansResult {
    ClusteringSolution solution;
    Matrix centroids;
    double inertia = 0.0;
    /// Inertia after each Lloyd iteration; non-increasing.
    std::vector<double> inertia_trace;
    std::size_t iterations = 0;
};

/// Lloyd's algorithm from k-means++ seeding over the rows of `points`.
/// An emptied cluster is refilled with the point farthest from its own
/// centroid (taken from a cluster with at least two members), so the result
/// always uses all `m` clusters.
KMeansResult kmeans(const Matrix& points, std::size_t m, std::uint64_t seed, const KMeansOptions& opts = {});

/// Sum over clusters of squared Euclidean distances from members to the cluster mean.
double inertia(const Matrix& points, const ClusteringSolution& solution);

/// K-Means on each block with sensors as points. Every block uses the same
/// seed, so identical blocks yield identical solutions.
std::vector<ClusteringSolution> cluster_all_blocks(const BlockPartition& partition, std::size_t m, std::uint64_t seed,
                                                   const KMeansOptions& opts = {});

}  // namespace virtsense
