#include "virtsense/fac2t.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "virtsense/kmeans.hpp"

namespace virtsense {

namespace {

constexpr double kNegligibleRowSum = 1e-300;

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_solution(const ClusteringSolution& s, std::size_t n_sensors, std::size_t m) {
    if (s.n_sensors() != n_sensors) throw std::invalid_argument("fac2t: solution covers the wrong number of sensors");
    if (s.m != m) throw std::invalid_argument("fac2t: solutions disagree on the cluster count");
    if (!s.is_valid()) throw std::invalid_argument("fac2t: solution does not use every cluster");
}

}  // namespace

void Fac2tParams::validate() const {
    if (!(alpha > 0.0 && alpha <= alpha_max && alpha_max < 1.0))
        throw std::invalid_argument("fac2t: need 0 < alpha <= alpha_max < 1");
    if (gamma < 1 || tau < 1) throw std::invalid_argument("fac2t: gamma and tau must be >= 1");
    if (!(theta > 0.0)) throw std::invalid_argument("fac2t: theta must be > 0");
    if (!(epsilon_g > 0.0)) throw std::invalid_argument("fac2t: epsilon_g must be > 0");
}

void PheromoneTable::deposit(const ClusteringSolution& s, double weight) {
    if (s.n_sensors() != size()) throw std::invalid_argument("PheromoneTable::deposit: size mismatch");
    for (const auto& members : s.clusters())
        for (auto i : members)
            for (auto j : members) values_(i, j) += weight;
}

void PheromoneTable::scale(double factor) {
    for (auto& v : values_.data()) v *= factor;
}

double objective(const ClusteringSolution& s, const BlockPartition& blocks, double epsilon_g) {
    if (blocks.blocks.empty()) throw std::invalid_argument("objective: no blocks");
    double total = 0.0;
    for (const auto& b : blocks.blocks) total += 1.0 / (inertia(b.sensor_points, s) + epsilon_g);
    return total;
}

Matrix adjacency(const ClusteringSolution& s) {
    const std::size_t n = s.n_sensors();
    Matrix f(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) f(i, j) = s.labels[i] == s.labels[j] ? 1.0 : 0.0;
    return f;
}

std::pair<Colony, PheromoneTable> init_colony(std::span<const ClusteringSolution> solutions, const Fac2tParams& p,
                                              const BlockPartition& blocks, std::uint64_t seed) {
    if (solutions.empty()) throw std::invalid_argument("init_colony: no input solutions");
    const std::size_t n_sensors = solutions.front().n_sensors();
    const std::size_t m = solutions.front().m;
    for (const auto& s : solutions) check_solution(s, n_sensors, m);

    const std::size_t n_blocks = solutions.size();
    const std::size_t n_ants = p.n_ants == 0 ? n_blocks : p.n_ants;

    std::vector<double> block_metric(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) block_metric[b] = objective(solutions[b], blocks, p.epsilon_g);

    std::vector<std::size_t> chosen;
    if (n_ants > n_blocks) {
        for (std::size_t b = 0; b < n_blocks; ++b) chosen.insert(chosen.end(), n_ants / n_blocks, b);
        Rng rng(seed);
        while (chosen.size() < n_ants) chosen.push_back(rng.uniform_index(n_blocks));
    } else {
        std::vector<std::size_t> order(n_blocks);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return block_metric[a] > block_metric[b]; });
        order.resize(n_ants);
        std::sort(order.begin(), order.end());
        chosen = std::move(order);
    }

    Colony colony;
    PheromoneTable pheromone(n_sensors);
    for (auto b : chosen) {
        colony.ants.push_back(solutions[b]);
        colony.metrics.push_back(block_metric[b]);
        pheromone.deposit(solutions[b], block_metric[b]);
    }
    return {std::move(colony), std::move(pheromone)};
}

ClusteringSolution mutate_ant(const ClusteringSolution& ant, const PheromoneTable& pheromone, std::size_t beta,
                              std::size_t iteration, std::size_t tau, Rng& rng) {
    const std::size_t n = ant.n_sensors();
    if (pheromone.size() != n) throw std::invalid_argument("mutate_ant: pheromone table size mismatch");
    ClusteringSolution out = ant;
    if (n < 2 || beta == 0) return out;

    auto sizes = out.cluster_sizes();
    const bool uniform_round = tau > 0 && iteration % tau == 0;
    std::vector<double> weights(n);

    for (auto s : rng.sample_without_replacement(n, std::min(beta, n))) {
        std::size_t partner;
        double total = 0.0;
        if (!uniform_round) {
            auto row = pheromone.row(s);
            for (std::size_t j = 0; j < n; ++j) {
                weights[j] = j == s ? 0.0 : std::max(row[j], 0.0);
                total += weights[j];
            }
        }
        if (uniform_round || total < kNegligibleRowSum) {
            partner = rng.uniform_index(n - 1);
            if (partner >= s) ++partner;
        } else {
            partner = rng.weighted_index(weights, total);
        }

        const std::size_t from = out.labels[s];
        const std::size_t to = out.labels[partner];
        if (from == to) continue;

        if (sizes[from] == 1) {
            // Refill the source cluster with the destination member least bound to its peers.
            std::size_t weakest = n;
            double weakest_score = std::numeric_limits<double>::infinity();
            for (std::size_t z1 = 0; z1 < n; ++z1) {
                if (out.labels[z1] != to) continue;
                double score = 0.0;
                for (std::size_t z2 = 0; z2 < n; ++z2)
                    if (out.labels[z2] == to) score += pheromone(z1, z2);
                if (score < weakest_score) {
                    weakest_score = score;
                    weakest = z1;
                }
            }
            out.labels[weakest] = from;
            ++sizes[from];
            --sizes[to];
        }
        out.labels[s] = to;
        --sizes[from];
        ++sizes[to];
    }
    return out;
}

ClusteringSolution mutate_ant(const ClusteringSolution& ant, const PheromoneTable& pheromone, std::size_t beta,
                              std::size_t iteration, std::size_t tau, std::uint64_t seed) {
    Rng rng(seed);
    return mutate_ant(ant, pheromone, beta, iteration, tau, rng);
}

PheromoneTable pheromone_update(const PheromoneTable& pheromone, const Colony& colony, double alpha) {
    if (colony.metrics.size() != colony.ants.size())
        throw std::invalid_argument("pheromone_update: metrics not cached for every ant");
    PheromoneTable out = pheromone;
    out.scale(alpha);
    for (std::size_t k = 0; k < colony.size(); ++k) out.deposit(colony.ants[k], (1.0 - alpha) * colony.metrics[k]);
    return out;
}

Colony select_survivors(const Colony& previous, const Colony& mutated) {
    const std::size_t keep = previous.size();
    std::vector<std::pair<const Colony*, std::size_t>> pool;
    pool.reserve(previous.size() + mutated.size());
    for (std::size_t i = 0; i < previous.size(); ++i) pool.emplace_back(&previous, i);
    // A mutated ant identical to one already in the colony adds nothing; letting it
    // in would crowd out distinct ants with copies.
    for (std::size_t i = 0; i < mutated.size(); ++i)
        if (std::find(previous.ants.begin(), previous.ants.end(), mutated.ants[i]) == previous.ants.end())
            pool.emplace_back(&mutated, i);
    // Stable sort keeps previous-before-mutated and index order among equal metrics.
    std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
        return a.first->metrics[a.second] > b.first->metrics[b.second];
    });

    Colony out;
    for (std::size_t i = 0; i < keep && i < pool.size(); ++i) {
        out.ants.push_back(pool[i].first->ants[pool[i].second]);
        out.metrics.push_back(pool[i].first->metrics[pool[i].second]);
    }
    return out;
}

Fac2tResult run_fac2t(const BlockPartition& blocks, std::span<const ClusteringSolution> init_solutions,
                      const Fac2tParams& p, std::uint64_t seed, const Fac2tObserver& observer) {
    p.validate();
    if (init_solutions.empty()) throw std::invalid_argument("run_fac2t: no initial solutions");
    if (init_solutions.front().n_sensors() != blocks.n_sensors())
        throw std::invalid_argument("run_fac2t: solutions and blocks disagree on the sensor count");

    auto [colony, pheromone] = init_colony(init_solutions, p, blocks, mix_seed(seed, 0));

    Fac2tResult result;
    const auto first_best = static_cast<std::size_t>(
        std::max_element(colony.metrics.begin(), colony.metrics.end()) - colony.metrics.begin());
    result.best = colony.ants[first_best];
    result.best_metric = colony.metrics[first_best];

    double alpha = p.alpha;
    std::size_t beta = p.beta;
    result.history.push_back({0, result.best_metric, mean_of(colony.metrics), alpha, beta});
    if (observer) observer({0, colony, pheromone, result.best_metric});

    for (std::size_t iter = 1; iter <= p.iterations; ++iter) {
        Colony mutated;
        mutated.ants.reserve(colony.size());
        mutated.metrics.reserve(colony.size());
        for (std::size_t k = 0; k < colony.size(); ++k) {
            Rng rng(mix_seed(mix_seed(seed, iter), k));
            mutated.ants.push_back(mutate_ant(colony.ants[k], pheromone, beta, iter, p.tau, rng));
            mutated.metrics.push_back(objective(mutated.ants.back(), blocks, p.epsilon_g));
        }

        pheromone = pheromone_update(pheromone, mutated, alpha);
        colony = select_survivors(colony, mutated);

        if (colony.metrics.front() > result.best_metric) {
            result.best_metric = colony.metrics.front();
            result.best = colony.ants.front();
        }
        result.history.push_back({iter, result.best_metric, mean_of(colony.metrics), alpha, beta});
        if (observer) observer({iter, colony, pheromone, result.best_metric});

        if (iter % p.gamma == 0 && beta > 1) --beta;
        alpha = std::min(alpha * p.theta, p.alpha_max);
    }
    result.final_colony = std::move(colony);
    return result;
}

}  // namespace virtsense
