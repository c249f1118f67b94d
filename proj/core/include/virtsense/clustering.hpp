#pragma once

#include <cstddef>
#include <vector>

namespace virtsense {

/// Assignment of every sensor to one of `m` clusters.
///
/// Labels are zero-based in memory (0..m-1). Files and printed output use
/// one-based labels (1..m).
struct ClusteringSolution {
    std::vector<std::size_t> labels;
    std::size_t m = 0;

    std::size_t n_sensors() const noexcept { return labels.size(); }
    std::vector<std::size_t> cluster_sizes() const;
    /// Members of every cluster, each list in ascending sensor order.
    std::vector<std::vector<std::size_t>> clusters() const;
    /// Every label lies in [0, m) and is used at least once.
    bool is_valid() const;

    friend bool operator==(const ClusteringSolution&, const ClusteringSolution&) = default;
};

/// Relabels clusters in order of first appearance, so two solutions that
/// differ only by a label permutation compare equal afterwards.
ClusteringSolution canonical_labels(const ClusteringSolution& s);

}  // namespace virtsense
