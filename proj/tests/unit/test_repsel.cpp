#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "virtsense/random.hpp"
#include "virtsense/repsel.hpp"

using namespace virtsense;

namespace {

SensorDataset columns(const std::vector<std::vector<double>>& cols) {
    SensorDataset d;
    d.values = Matrix(cols.front().size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        d.names.push_back("s" + std::to_string(j));
        d.values.set_column(j, cols[j]);
    }
    return d;
}

SensorDataset correlated(std::size_t n_sensors, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(n_sensors, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double base = rng.normal();
        for (std::size_t j = 0; j < n_sensors; ++j)
            cols[j][i] = base + (0.2 + 0.3 * static_cast<double>(j % 3)) * rng.normal();
    }
    return columns(cols);
}

}  // namespace

TEST_SUITE("repsel") {
    TEST_CASE("pearson basics") {
        const std::vector<double> a{1, 2, 3, 5};
        std::vector<double> neg;
        for (double v : a) neg.push_back(-v);
        CHECK(pearson(a, a) == doctest::Approx(1.0));
        CHECK(pearson(a, neg) == doctest::Approx(-1.0));
        const std::vector<double> x{1, 2, 3}, y{1, 2, 4};
        CHECK(pearson(x, y) == doctest::Approx(0.9819805060619657).epsilon(1e-12));
    }

    TEST_CASE("pearson contract violations") {
        const std::vector<double> a{1, 2, 3}, c{2, 2, 2}, shorter{1, 2}, one{1};
        CHECK_THROWS_AS(pearson(a, c), std::invalid_argument);
        CHECK_THROWS_AS(pearson(a, shorter), std::invalid_argument);
        CHECK_THROWS_AS(pearson(one, one), std::invalid_argument);
    }

    TEST_CASE("quality formula") {
        const std::vector<double> c{1.0, 0.8, 0.6};
        CHECK(quality_from_correlations(c) == doctest::Approx(4.866666666666667).epsilon(1e-12));
        CHECK(quality_from_correlations(c) == doctest::Approx(oracle::quality(c)).epsilon(1e-14));
        const std::vector<double> ones{1.0, 1.0, 1.0};
        CHECK(quality_from_correlations(ones) == doctest::Approx(1e9));
        const std::vector<double> self{1.0};
        CHECK(quality_from_correlations(self) == doctest::Approx(1e9));
    }

    TEST_CASE("quality of a sensor against its cluster") {
        const auto d = correlated(4, 200, 3);
        const std::vector<std::size_t> cluster{0, 1, 3};
        std::vector<double> r;
        for (auto j : cluster) r.push_back(pearson(d.sensor(1), d.sensor(j)));
        CHECK(quality(1, cluster, d).q == doctest::Approx(oracle::quality(r)).epsilon(1e-12));
        CHECK_THROWS_AS(quality(2, cluster, d), std::invalid_argument);
    }

    TEST_CASE("duplicated sensor wins its cluster") {
        Rng rng(4);
        std::vector<double> base(100), b(100), c(100);
        for (std::size_t i = 0; i < 100; ++i) {
            base[i] = rng.normal();
            b[i] = base[i] + 0.5 * rng.normal();
            c[i] = base[i] + 0.5 * rng.normal();
        }
        // Sensors 0 and 3 are identical; both dominate, the lower index wins the tie.
        const auto d = columns({base, b, c, base});
        const auto reps = select_representatives({{0, 0, 0, 0}, 1}, d);
        REQUIRE(reps.size() == 1);
        CHECK(reps[0].sensor == 0);
    }

    TEST_CASE("singleton clusters represent themselves") {
        const auto d = correlated(4, 50, 9);
        const auto reps = select_representatives({{2, 0, 3, 1}, 4}, d);
        REQUIRE(reps.size() == 4);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(reps[k].cluster == k);
            CHECK(reps[k].quality == doctest::Approx(1e9));
        }
        CHECK(reps[0].sensor == 1);
        CHECK(reps[3].sensor == 2);
    }

    TEST_CASE("selection matches brute-force quality comparison") {
        const auto d = correlated(9, 300, 12);
        const ClusteringSolution sol{{0, 1, 2, 0, 1, 2, 0, 1, 2}, 3};
        const auto reps = select_representatives(sol, d);
        std::set<std::size_t> distinct;
        for (const auto& rep : reps) {
            distinct.insert(rep.sensor);
            const auto members = sol.clusters()[rep.cluster];
            std::size_t best = members.front();
            double best_q = -1e300;
            for (auto i : members) {
                std::vector<double> r;
                for (auto j : members) r.push_back(pearson(d.sensor(i), d.sensor(j)));
                const double q = oracle::quality(r);
                if (q > best_q) {
                    best_q = q;
                    best = i;
                }
            }
            CHECK(rep.sensor == best);
        }
        CHECK(distinct.size() == 3);
    }

    TEST_CASE("selection survives reordering and affine rescaling") {
        const auto d = correlated(6, 200, 31);
        const ClusteringSolution sol{{0, 0, 0, 1, 1, 1}, 2};
        const auto base = select_representatives(sol, d);

        SensorDataset scaled = d;
        for (std::size_t i = 0; i < scaled.n_samples(); ++i)
            for (std::size_t j = 0; j < scaled.n_sensors(); ++j)
                scaled.values(i, j) = 3.0 + (1.5 + static_cast<double>(j)) * d.values(i, j);
        const auto s = select_representatives(sol, scaled);
        for (std::size_t k = 0; k < 2; ++k) CHECK(s[k].sensor == base[k].sensor);

        // Reverse the sensor order; the same physical sensors should win.
        const std::vector<std::size_t> perm{5, 4, 3, 2, 1, 0};
        const auto rev = d.select_sensors(perm);
        // Reversed positions 0..2 are originals 5..3, so label 1 is still the second group.
        const auto r = select_representatives({{1, 1, 1, 0, 0, 0}, 2}, rev);
        CHECK(perm[r[1].sensor] == base[1].sensor);
        CHECK(perm[r[0].sensor] == base[0].sensor);
    }
}
