#include "virtsense/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "virtsense/random.hpp"

namespace virtsense {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

Matrix cluster_means(const Matrix& points, const std::vector<std::size_t>& labels, std::size_t m) {
    Matrix means(m, points.cols());
    std::vector<std::size_t> counts(m, 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto src = points.row(i);
        auto dst = means.row(labels[i]);
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
        ++counts[labels[i]];
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (counts[k] == 0) continue;
        const double inv = 1.0 / static_cast<double>(counts[k]);
        for (auto& v : means.row(k)) v *= inv;
    }
    return means;
}

Matrix kmeans_plus_plus(const Matrix& points, std::size_t m, Rng& rng) {
    const std::size_t n = points.rows();
    Matrix centroids(m, points.cols());
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

    std::size_t pick = rng.uniform_index(n);
    for (std::size_t k = 0;; ++k) {
        auto src = points.row(pick);
        std::copy(src.begin(), src.end(), centroids.row(k).begin());
        if (k + 1 == m) break;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points.row(i), centroids.row(k)));
            total += nearest[i];
        }
        pick = total > 0.0 ? rng.weighted_index(nearest, total) : rng.uniform_index(n);
    }
    return centroids;
}

// Single-point transfers (Hartigan): move a point whenever doing so lowers the
// total, accounting for both means shifting. Lloyd fixed points are not always
// stable under this, so it runs after Lloyd and can only reduce inertia.
bool transfer_pass(const Matrix& points, std::vector<std::size_t>& labels, Matrix& centroids, std::size_t m) {
    const std::size_t n = points.rows();
    std::vector<std::size_t> counts(m, 0);
    for (auto l : labels) ++counts[l];
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t from = labels[i];
        if (counts[from] < 2) continue;
        const auto x = points.row(i);
        const double nf = static_cast<double>(counts[from]);
        const double removal = nf / (nf - 1.0) * squared_distance(x, centroids.row(from));
        double best = removal;
        std::size_t to = from;
        for (std::size_t k = 0; k < m; ++k) {
            if (k == from) continue;
            const double nk = static_cast<double>(counts[k]);
            const double added = nk / (nk + 1.0) * squared_distance(x, centroids.row(k));
            if (added < best * (1.0 - 1e-12)) {
                best = added;
                to = k;
            }
        }
        if (to == from) continue;
        auto cf = centroids.row(from);
        auto ct = centroids.row(to);
        const double nt = static_cast<double>(counts[to]);
        for (std::size_t d = 0; d < x.size(); ++d) {
            cf[d] = (cf[d] * nf - x[d]) / (nf - 1.0);
            ct[d] = (ct[d] * nt + x[d]) / (nt + 1.0);
        }
        --counts[from];
        ++counts[to];
        labels[i] = to;
        moved = true;
    }
    return moved;
}

}  // namespace

double inertia(const Matrix& points, const ClusteringSolution& solution) {
    if (solution.labels.size() != points.rows()) throw std::invalid_argument("inertia: label count mismatch");
    const Matrix means = cluster_means(points, solution.labels, solution.m);
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) total += squared_distance(points.row(i), means.row(solution.labels[i]));
    return total;
}

KMeansResult kmeans(const Matrix& points, std::size_t m, std::uint64_t seed, const KMeansOptions& opts) {
    const std::size_t n = points.rows();
    if (m == 0 || m > n)
        throw std::invalid_argument("kmeans: cluster count " + std::to_string(m) + " outside [1, " + std::to_string(n) + "]");
    for (double v : points.data())
        if (!std::isfinite(v)) throw std::invalid_argument("kmeans: non-finite point coordinate");

    Rng rng(seed);
    KMeansResult result;
    Matrix centroids = kmeans_plus_plus(points, m, rng);
    std::vector<std::size_t> labels(n, 0);
    std::vector<double> dist(n, 0.0);

    for (std::size_t iter = 0; iter < std::max<std::size_t>(opts.max_iter, 1); ++iter) {
        std::vector<std::size_t> counts(m, 0);
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_k = 0;
            for (std::size_t k = 0; k < m; ++k) {
                const double d = squared_distance(points.row(i), centroids.row(k));
                if (d < best) {
                    best = d;
                    best_k = k;
                }
            }
            labels[i] = best_k;
            dist[i] = best;
            ++counts[best_k];
        }

        for (std::size_t k = 0; k < m; ++k) {
            if (counts[k] > 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[labels[i]] < 2) continue;
                if (far == n || dist[i] > dist[far]) far = i;
            }
            --counts[labels[far]];
            labels[far] = k;
            dist[far] = 0.0;
            counts[k] = 1;
        }

        Matrix updated = cluster_means(points, labels, m);
        double shift = 0.0;
        for (std::size_t k = 0; k < m; ++k) shift = std::max(shift, squared_distance(updated.row(k), centroids.row(k)));
        centroids = std::move(updated);
        result.inertia_trace.push_back(inertia(points, ClusteringSolution{labels, m}));
        result.iterations = iter + 1;
        if (std::sqrt(shift) < opts.tol) break;
    }

    for (std::size_t pass = 0; pass < std::max<std::size_t>(opts.max_iter, 1); ++pass) {
        if (!transfer_pass(points, labels, centroids, m)) break;
        centroids = cluster_means(points, labels, m);
        result.inertia_trace.push_back(inertia(points, ClusteringSolution{labels, m}));
    }

    result.solution = ClusteringSolution{std::move(labels), m};
    result.centroids = std::move(centroids);
    result.inertia = result.inertia_trace.back();
    return result;
}

std::vector<ClusteringSolution> cluster_all_blocks(const BlockPartition& partition, std::size_t m, std::uint64_t seed,
                                                   const KMeansOptions& opts) {
    std::vector<ClusteringSolution> out;
    out.reserve(partition.size());
    for (const auto& block : partition.blocks) out.push_back(kmeans(block.sensor_points, m, seed, opts).solution);
    return out;
}

}  // namespace virtsense
