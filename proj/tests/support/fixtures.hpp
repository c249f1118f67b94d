#pragma once

#include <cstdint>

#include "virtsense/clustering.hpp"
#include "virtsense/dataset.hpp"

namespace fixture {

struct LinearSensors {
    virtsense::SensorDataset data;
    virtsense::ClusteringSolution truth;
};

/// `clusters` independent uniform latent signals; each sensor is a random increasing
/// affine function of its cluster's signal plus Gaussian noise of `noise` sd.
LinearSensors linear_sensors(std::size_t n_samples, std::size_t clusters, std::size_t per_cluster, double noise,
                             std::uint64_t seed);

}  // namespace fixture
