#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "virtsense/clustering.hpp"
#include "virtsense/dataset.hpp"

namespace virtsense {

inline constexpr double kQualityGuard = 1e-9;

struct QualityScore {
    std::size_t sensor = 0;
    double q = 0.0;
};

struct Representative {
    std::size_t cluster = 0;  // zero-based label
    std::size_t sensor = 0;
    double quality = 0.0;
};

/// Sample Pearson correlation. Throws std::invalid_argument on length
/// mismatch, fewer than two readings, or a constant vector.
double pearson(std::span<const double> a, std::span<const double> b);

/// (1 − Var(c)) / max(1 − Mean(c), guard) where c holds the correlations of
/// sensor `i` with every member of `cluster`, itself included. Var is the
/// population variance.
QualityScore quality(std::size_t i, std::span<const std::size_t> cluster, const SensorDataset& d);
/// Same score from precomputed correlations.
double quality_from_correlations(std::span<const double> correlations);

/// Highest-quality sensor of each cluster (lowest index on ties), ordered by cluster label.
std::vector<Representative> select_representatives(const ClusteringSolution& sol, const SensorDataset& d);

}  // namespace virtsense
