#include "virtsense/clustering.hpp"

#include <limits>

namespace virtsense {

std::vector<std::size_t> ClusteringSolution::cluster_sizes() const {
    std::vector<std::size_t> sizes(m, 0);
    for (auto l : labels)
        if (l < m) ++sizes[l];
    return sizes;
}

std::vector<std::vector<std::size_t>> ClusteringSolution::clusters() const {
    std::vector<std::vector<std::size_t>> out(m);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < m) out[labels[i]].push_back(i);
    return out;
}

bool ClusteringSolution::is_valid() const {
    if (m == 0 || labels.size() < m) return false;
    std::vector<bool> used(m, false);
    for (auto l : labels) {
        if (l >= m) return false;
        used[l] = true;
    }
    for (bool u : used)
        if (!u) return false;
    return true;
}

ClusteringSolution canonical_labels(const ClusteringSolution& s) {
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> remap(s.m, unset);
    std::size_t next = 0;
    ClusteringSolution out{std::vector<std::size_t>(s.labels.size()), s.m};
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
        auto& r = remap.at(s.labels[i]);
        if (r == unset) r = next++;
        out.labels[i] = r;
    }
    return out;
}

}  // namespace virtsense
