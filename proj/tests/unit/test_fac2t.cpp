#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "virtsense/fac2t.hpp"
#include "virtsense/pipeline.hpp"

using namespace virtsense;

namespace {

// Four sensors with readings 0, 1, 10, 11 repeated over `blocks` blocks of two rows.
BlockPartition line_blocks(std::size_t blocks) {
    SensorDataset d;
    d.names = {"a", "b", "c", "d"};
    d.values = Matrix(2 * blocks, 4, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        const double row[] = {0, 1, 10, 11};
        for (std::size_t j = 0; j < 4; ++j) d.values(2 * b, j) = row[j];
    }
    return partition_blocks(d, 2);
}

PheromoneTable table_from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    PheromoneTable p(n);
    for (auto [i, j] : pairs) {
        ClusteringSolution s{{}, n - 1};
        std::size_t next = 1;
        for (std::size_t k = 0; k < n; ++k) s.labels.push_back(k == i || k == j ? 0 : next++);
        p.deposit(s, 1.0);
    }
    return p;
}

void check_symmetric_nonnegative(const PheromoneTable& p) {
    CHECK(max_abs_asymmetry(p.values()) <= 1e-12);
    for (double v : p.values().data()) CHECK_UNARY(v >= 0.0);
}

}  // namespace

TEST_SUITE("fac2t") {
    TEST_CASE("objective sums reciprocal block inertia") {
        const ClusteringSolution pairs{{0, 0, 1, 1}, 2};
        CHECK(objective(pairs, line_blocks(1)) == doctest::Approx(1.0));
        CHECK(objective(pairs, line_blocks(2)) == doctest::Approx(2.0));

        SensorDataset flat{{"a", "b", "c"}, Matrix(6, 3, 0.25)};
        CHECK(objective({{0, 0, 1}, 2}, partition_blocks(flat, 2)) == doctest::Approx(3e12));

        const ClusteringSolution relabeled{{1, 1, 0, 0}, 2};
        CHECK(objective(relabeled, line_blocks(3)) == objective(pairs, line_blocks(3)));
    }

    TEST_CASE("adjacency encodes co-membership with self loops") {
        CHECK(adjacency({{0, 0, 1}, 2}) == Matrix{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}});
        CHECK(adjacency({{0, 0, 0}, 1}) == Matrix(3, 3, 1.0));
        CHECK(adjacency({{0, 1, 2}, 3}) == Matrix::identity(3));
    }

    TEST_CASE("parameter validation") {
        Fac2tParams p;
        CHECK_NOTHROW(p.validate());
        p.alpha = 0.999;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
        p = {};
        p.gamma = 0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
        p = {};
        p.tau = 0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
        p = {};
        p.theta = 0.0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }

    TEST_CASE("colony initialization") {
        const auto blocks = line_blocks(3);
        const std::vector<ClusteringSolution> sols{{{0, 0, 1, 1}, 2}, {{0, 1, 1, 1}, 2}, {{0, 0, 0, 1}, 2}};
        Fac2tParams p;

        p.n_ants = 3;
        auto [colony, table] = init_colony(sols, p, blocks, 1);
        CHECK(colony.ants == sols);
        Matrix expected(4, 4, 0.0);
        for (const auto& s : sols) {
            const auto f = adjacency(s);
            const double g = objective(s, blocks);
            for (std::size_t i = 0; i < 16; ++i) expected.data()[i] += g * f.data()[i];
        }
        CHECK(frobenius_distance(table.values(), expected) <= 1e-12 * frobenius_norm(expected));
        for (std::size_t k = 0; k < 3; ++k) CHECK(colony.metrics[k] == objective(sols[k], blocks));

        p.n_ants = 6;
        const auto doubled = init_colony(sols, p, blocks, 1).first;
        CHECK(doubled.size() == 6);
        for (const auto& s : sols) CHECK(std::count(doubled.ants.begin(), doubled.ants.end(), s) == 2);

        p.n_ants = 7;
        CHECK(init_colony(sols, p, blocks, 1).first.size() == 7);

        // The first solution (the true pairs) has by far the highest objective.
        p.n_ants = 1;
        const auto best = init_colony(sols, p, blocks, 1).first;
        REQUIRE(best.size() == 1);
        CHECK(best.ants[0] == sols[0]);

        p.n_ants = 0;
        CHECK(init_colony(sols, p, blocks, 1).first.size() == 3);
        CHECK_THROWS_AS(init_colony(std::vector<ClusteringSolution>{}, p, blocks, 1), std::invalid_argument);
    }

    TEST_CASE("zero swaps leave the ant unchanged") {
        const ClusteringSolution ant{{0, 1, 1, 2, 0}, 3};
        const auto p = table_from_pairs(5, {{0, 1}, {2, 3}});
        for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(mutate_ant(ant, p, 0, 3, 10, seed) == ant);
    }

    TEST_CASE("pairing follows the only nonzero pheromone entries") {
        // Every sensor's partners sit in the other cluster, so one swap always crosses over.
        const ClusteringSolution ant{{0, 0, 0, 1, 1, 1}, 2};
        const auto p = table_from_pairs(6, {{0, 3}, {1, 3}, {2, 3}, {4, 0}, {5, 0}});
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto out = mutate_ant(ant, p, 1, 3, 10, seed);
            std::size_t changed = 0;
            for (std::size_t i = 0; i < 6; ++i) changed += out.labels[i] != ant.labels[i];
            CHECK(changed == 1);
        }
        // Partners inside the sensor's own cluster make every move a no-op.
        const auto same = table_from_pairs(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
        for (std::uint64_t seed = 0; seed < 50; ++seed) CHECK(mutate_ant(ant, same, 2, 3, 10, seed) == ant);
    }

    TEST_CASE("empty pheromone rows fall back to uniform pairing") {
        const ClusteringSolution ant{{0, 0, 1, 1}, 2};
        const PheromoneTable zero(4);
        for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(mutate_ant(ant, zero, 2, 3, 10, seed).is_valid());
    }

    TEST_CASE("singleton source swaps in the weakest member of the target") {
        const ClusteringSolution ant{{0, 1, 1}, 2};
        PheromoneTable p(3);
        p.deposit({{0, 0, 0}, 1}, 1.0);
        bool singleton_moved = false;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto out = mutate_ant(ant, p, 1, 3, 10, seed);
            CHECK(out.is_valid());
            if (out.labels[0] != 0) {
                singleton_moved = true;
                // Sensors 1 and 2 tie on pheromone mass; the lower index moves out.
                CHECK(out.labels == std::vector<std::size_t>{1, 0, 1});
            }
        }
        CHECK(singleton_moved);
    }

    TEST_CASE("mutation preserves the cluster count under heavy singleton pressure") {
        Rng rng(77);
        for (int trial = 0; trial < 300; ++trial) {
            const std::size_t n = 8 + rng.uniform_index(10);
            const std::size_t m = 2 + rng.uniform_index(n - 2);
            ClusteringSolution ant{std::vector<std::size_t>(n), m};
            // Mostly singletons: the first m-1 sensors alone, the rest in the last cluster.
            for (std::size_t i = 0; i < n; ++i) ant.labels[i] = std::min(i, m - 1);
            PheromoneTable p(n);
            p.deposit(ant, rng.uniform01());
            p.deposit({std::vector<std::size_t>(n, 0), 1}, rng.uniform01());
            const auto out = mutate_ant(ant, p, n, trial % 4, 3, rng.next_u64());
            CHECK(out.is_valid());
            CHECK(out.m == m);
        }
    }

    TEST_CASE("pheromone update") {
        PheromoneTable p(3);
        p.deposit({{0, 0, 1}, 2}, 1.0);

        Colony c{{{{0, 1, 1}, 2}, {{0, 0, 0}, 1}}, {2.0, 4.0}};
        const auto u = pheromone_update(p, c, 0.5);
        const Matrix expected{{3.5, 2.5, 2.0}, {2.5, 3.5, 3.0}, {2.0, 3.0, 3.5}};
        CHECK(frobenius_distance(u.values(), expected) <= 1e-12);
        check_symmetric_nonnegative(u);

        CHECK(pheromone_update(p, c, 1.0).values() == p.values());
        Colony single{{{{0, 1, 1}, 2}}, {3.0}};
        const auto replaced = pheromone_update(p, single, 0.0);
        const auto f = adjacency(single.ants[0]);
        for (std::size_t i = 0; i < 9; ++i) CHECK(replaced.values().data()[i] == 3.0 * f.data()[i]);
    }

    TEST_CASE("elitist survivors") {
        const ClusteringSolution a{{0, 1}, 2}, b{{1, 0}, 2};
        const Colony prev{{a, a, a}, {3.0, 2.0, 1.0}};
        const Colony worse{{b, b, b}, {0.5, 0.4, 0.3}};
        const Colony better{{b, b, b}, {9.0, 8.0, 7.0}};
        CHECK(select_survivors(prev, worse).metrics == prev.metrics);
        CHECK(select_survivors(prev, worse).ants == prev.ants);
        CHECK(select_survivors(prev, better).ants == better.ants);

        const Colony tie{{b, b, b}, {3.0, 0.0, 0.0}};
        const auto s = select_survivors(prev, tie);
        CHECK(s.ants[0] == a);
        CHECK(s.ants[1] == b);
        CHECK(s.metrics == std::vector<double>{3.0, 3.0, 2.0});

        // Unchanged copies of colony members do not displace distinct ants.
        const ClusteringSolution c{{0, 0}, 1};
        const Colony mixed{{a, c, c}, {5.0, 4.0, 1.5}};
        const Colony copies{{a, a, a}, {5.0, 5.0, 5.0}};
        CHECK(select_survivors(mixed, copies).ants == mixed.ants);
    }

    TEST_CASE("no iterations returns the best initial ant") {
        const auto blocks = line_blocks(2);
        const std::vector<ClusteringSolution> sols{{{0, 1, 1, 1}, 2}, {{0, 0, 1, 1}, 2}};
        Fac2tParams p;
        p.iterations = 0;
        const auto r = run_fac2t(blocks, sols, p, 5);
        CHECK(r.best == sols[1]);
        CHECK(r.history.size() == 1);
    }

    TEST_CASE("zero swaps and no exploration make the colony a fixed point") {
        PipelineConfig cfg;
        cfg.synthetic.n_sensors = 20;
        cfg.synthetic.n_blocks = 4;
        cfg.synthetic.block_size = 100;
        const auto sc = make_synthetic_case(cfg.synthetic, 4, 3);
        const auto init = cluster_all_blocks(sc.blocks, 4, 1);
        Fac2tParams p;
        p.beta = 0;
        p.tau = 1'000'000;
        p.iterations = 30;
        std::vector<std::vector<double>> metrics;
        run_fac2t(sc.blocks, init, p, 9, [&](const IterationView& v) { metrics.push_back(v.colony.metrics); });
        REQUIRE(metrics.size() == 31);
        // The first selection re-sorts the colony best-first; membership stays put.
        auto sorted = [](std::vector<double> v) {
            std::sort(v.begin(), v.end());
            return v;
        };
        for (const auto& m : metrics) CHECK(sorted(m) == sorted(metrics.front()));
    }

    TEST_CASE("schedule: beta decrements with a floor, alpha grows with a cap") {
        PipelineConfig cfg;
        cfg.synthetic.n_sensors = 12;
        cfg.synthetic.n_blocks = 3;
        cfg.synthetic.block_size = 50;
        const auto sc = make_synthetic_case(cfg.synthetic, 3, 4);
        Fac2tParams p;
        p.beta = 3;
        p.gamma = 5;
        p.iterations = 400;
        const auto r = run_fac2t(sc.blocks, cluster_all_blocks(sc.blocks, 3, 2), p, 1);
        REQUIRE(r.history.size() == 401);
        CHECK(r.history[0].beta == 3);
        CHECK(r.history[0].alpha == doctest::Approx(0.8));
        CHECK(r.history[1].alpha == doctest::Approx(0.8));
        CHECK(r.history[2].alpha == doctest::Approx(0.8 * 1.007));
        CHECK(r.history[5].beta == 3);
        CHECK(r.history[6].beta == 2);
        CHECK(r.history[400].beta == 1);
        CHECK(r.history[400].alpha == doctest::Approx(0.995));
        for (const auto& h : r.history) CHECK_UNARY(h.alpha <= 0.995);
    }

    TEST_CASE("every iteration keeps M clusters, a monotone best and a valid table") {
        PipelineConfig cfg;
        cfg.synthetic.n_sensors = 30;
        cfg.synthetic.n_blocks = 5;
        cfg.synthetic.block_size = 100;
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const std::size_t m = 4 + 6 * seed;  // up to 22 clusters of 30 sensors: many singletons
            const auto sc = make_synthetic_case(cfg.synthetic, m, seed);
            Fac2tParams p;
            p.iterations = 60;
            p.beta = 8;
            p.gamma = 10;
            p.n_ants = 7;
            double last = -1.0;
            const auto r = run_fac2t(sc.blocks, cluster_all_blocks(sc.blocks, m, seed), p, seed,
                                     [&](const IterationView& v) {
                                         for (const auto& ant : v.colony.ants) {
                                             CHECK(ant.is_valid());
                                             CHECK(ant.m == m);
                                         }
                                         CHECK(v.colony.size() == 7);
                                         CHECK(v.best_metric >= last);
                                         last = v.best_metric;
                                         check_symmetric_nonnegative(v.pheromone);
                                     });
            for (std::size_t i = 1; i < r.history.size(); ++i)
                CHECK(r.history[i].best_metric >= r.history[i - 1].best_metric);
            CHECK(r.best_metric == objective(r.best, sc.blocks));
        }
    }

    TEST_CASE("fusion is deterministic and beats whole-data K-Means on separated clusters") {
        PipelineConfig cfg;
        const auto sc = make_synthetic_case(cfg.synthetic, 6, 2024);
        const auto init = cluster_all_blocks(sc.blocks, 6, 1);
        Fac2tParams p;
        p.beta = 12;
        const auto r = run_fac2t(sc.blocks, init, p, 3);
        const auto again = run_fac2t(sc.blocks, init, p, 3);
        CHECK(r.best == again.best);
        CHECK(r.best_metric == again.best_metric);
        const auto whole = kmeans(sc.data.values.transposed(), 6, 1).solution;
        CHECK(r.best_metric >= objective(whole, sc.blocks));
    }
}
