#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "virtsense/clustering.hpp"
#include "virtsense/dataset.hpp"
#include "virtsense/matrix.hpp"
#include "virtsense/random.hpp"

namespace virtsense {

/// Search schedule for ant-colony fusion of block clusterings.
struct Fac2tParams {
    /// Fraction of the pheromone table retained each iteration.
    double alpha = 0.8;
    /// Candidate sensors moved per ant per iteration.
    std::size_t beta = 20;
    /// beta drops by one every `gamma` iterations, never below 1.
    std::size_t gamma = 20;
    /// Every `tau`-th iteration pairs sensors uniformly instead of by pheromone.
    std::size_t tau = 10;
    /// alpha is multiplied by `theta` after every iteration, capped at `alpha_max`.
    double theta = 1.007;
    double alpha_max = 0.995;
    /// Colony size; 0 means one ant per block.
    std::size_t n_ants = 0;
    std::size_t iterations = 200;
    /// Added to each block's inertia before taking the reciprocal.
    double epsilon_g = 1e-12;
    /// Accepted for configuration compatibility; no step of the search reads it.
    double delta = 15.0;

    void validate() const;
};

/// Symmetric, nonnegative sensor-pair score matrix.
class PheromoneTable {
public:
    PheromoneTable() = default;
    explicit PheromoneTable(std::size_t n_sensors) : values_(n_sensors, n_sensors) {}

    std::size_t size() const noexcept { return values_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }
    std::span<const double> row(std::size_t i) const noexcept { return values_.row(i); }
    const Matrix& values() const noexcept { return values_; }

    /// Adds `weight` to every pair sharing a cluster in `s`, diagonal included.
    void deposit(const ClusteringSolution& s, double weight);
    void scale(double factor);

private:
    Matrix values_;
};

struct Colony {
    std::vector<ClusteringSolution> ants;
    /// Cached objective of each ant, same order as `ants`.
    std::vector<double> metrics;

    std::size_t size() const noexcept { return ants.size(); }
};

struct HistoryEntry {
    std::size_t iteration = 0;
    double best_metric = 0.0;
    double mean_metric = 0.0;
    double alpha = 0.0;
    std::size_t beta = 0;
};
using RunHistory = std::vector<HistoryEntry>;

struct Fac2tResult {
    ClusteringSolution best;
    double best_metric = 0.0;
    /// Entry 0 is the initial colony; entry n follows iteration n.
    RunHistory history;
    Colony final_colony;
};

/// Read-only snapshot handed to an observer after initialization and after every iteration.
struct IterationView {
    std::size_t iteration;
    const Colony& colony;
    const PheromoneTable& pheromone;
    double best_metric;
};
using Fac2tObserver = std::function<void(const IterationView&)>;

/// Sum over blocks of 1 / (inertia of the block under `s` + epsilon_g).
double objective(const ClusteringSolution& s, const BlockPartition& blocks, double epsilon_g = 1e-12);

/// F_ij = 1 when sensors i and j share a cluster (so F_ii = 1).
Matrix adjacency(const ClusteringSolution& s);

/// Seeds the colony from block solutions and deposits each ant's metric into a zero table.
std::pair<Colony, PheromoneTable> init_colony(std::span<const ClusteringSolution> solutions, const Fac2tParams& p,
                                              const BlockPartition& blocks, std::uint64_t seed);

/// Moves `beta` distinct random sensors into the cluster of a pheromone-sampled
/// partner; a singleton source cluster first receives the partner cluster's
/// weakest member so the cluster count never changes.
ClusteringSolution mutate_ant(const ClusteringSolution& ant, const PheromoneTable& pheromone, std::size_t beta,
                              std::size_t iteration, std::size_t tau, Rng& rng);
ClusteringSolution mutate_ant(const ClusteringSolution& ant, const PheromoneTable& pheromone, std::size_t beta,
                              std::size_t iteration, std::size_t tau, std::uint64_t seed);

/// alpha·P + (1 − alpha)·Σ_k metric_k·F(ant_k)
PheromoneTable pheromone_update(const PheromoneTable& pheromone, const Colony& colony, double alpha);

/// Best `previous.size()` ants of the union, highest metric first. Mutated ants
/// equal to a previous ant are dropped. Ties favour previous-colony ants, then
/// lower index.
Colony select_survivors(const Colony& previous, const Colony& mutated);

Fac2tResult run_fac2t(const BlockPartition& blocks, std::span<const ClusteringSolution> init_solutions,
                      const Fac2tParams& p, std::uint64_t seed, const Fac2tObserver& observer = {});

}  // namespace virtsense
