#include "virtsense/repsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace virtsense {

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("pearson: need at least two readings");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw std::invalid_argument("pearson: correlation undefined for a constant vector");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double quality_from_correlations(std::span<const double> c) {
    if (c.empty()) throw std::invalid_argument("quality: empty correlation vector");
    const double n = static_cast<double>(c.size());
    double mean = 0.0;
    for (double v : c) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : c) var += (v - mean) * (v - mean);
    var /= n;
    return (1.0 - var) / std::max(1.0 - mean, kQualityGuard);
}

QualityScore quality(std::size_t i, std::span<const std::size_t> cluster, const SensorDataset& d) {
    if (std::find(cluster.begin(), cluster.end(), i) == cluster.end())
        throw std::invalid_argument("quality: sensor is not a member of the cluster");
    const auto si = d.sensor(i);
    std::vector<double> c;
    c.reserve(cluster.size());
    for (auto j : cluster) c.push_back(j == i ? pearson(si, si) : pearson(si, d.sensor(j)));
    return {i, quality_from_correlations(c)};
}

std::vector<Representative> select_representatives(const ClusteringSolution& sol, const SensorDataset& d) {
    if (sol.n_sensors() != d.n_sensors()) throw std::invalid_argument("select_representatives: sensor count mismatch");
    std::vector<std::vector<double>> columns(d.n_sensors());
    for (std::size_t j = 0; j < d.n_sensors(); ++j) columns[j] = d.sensor(j);

    std::vector<Representative> reps;
    const auto clusters = sol.clusters();
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        const auto& members = clusters[k];
        if (members.empty()) throw std::invalid_argument("select_representatives: empty cluster");
        // Pairwise correlations once per cluster.
        const std::size_t n = members.size();
        std::vector<double> r(n * n, 1.0);
        for (std::size_t a = 0; a < n; ++a) {
            r[a * n + a] = pearson(columns[members[a]], columns[members[a]]);
            for (std::size_t b = a + 1; b < n; ++b)
                r[a * n + b] = r[b * n + a] = pearson(columns[members[a]], columns[members[b]]);
        }
        Representative best{k, members.front(), -std::numeric_limits<double>::infinity()};
        for (std::size_t a = 0; a < n; ++a) {
            const double q = quality_from_correlations(std::span<const double>(r).subspan(a * n, n));
            if (q > best.quality) best = {k, members[a], q};
        }
        reps.push_back(best);
    }
    return reps;
}

}  // namespace virtsense
