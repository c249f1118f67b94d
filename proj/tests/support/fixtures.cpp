#include "fixtures.hpp"

#include <string>

#include "virtsense/random.hpp"

namespace fixture {

LinearSensors linear_sensors(std::size_t n_samples, std::size_t clusters, std::size_t per_cluster, double noise,
                             std::uint64_t seed) {
    virtsense::Rng rng(seed);
    const std::size_t n = clusters * per_cluster;
    LinearSensors out;
    out.truth = {std::vector<std::size_t>(n), clusters};
    std::vector<double> gain(n), offset(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.truth.labels[j] = j % clusters;
        out.data.names.push_back("s" + std::to_string(j));
        gain[j] = 0.5 + rng.uniform01();
        offset[j] = rng.uniform01() - 0.5;
    }
    out.data.values = virtsense::Matrix(n_samples, n);
    std::vector<double> latent(clusters);
    for (std::size_t i = 0; i < n_samples; ++i) {
        for (auto& v : latent) v = rng.uniform01();
        for (std::size_t j = 0; j < n; ++j)
            out.data.values(i, j) = gain[j] * latent[j % clusters] + offset[j] + noise * rng.normal();
    }
    return out;
}

}  // namespace fixture
