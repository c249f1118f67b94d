#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "virtsense/random.hpp"
#include "virtsense/regress.hpp"

using namespace virtsense;

namespace {

Matrix uniform(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (auto& v : m.data()) v = rng.uniform01();
    return m;
}

Matrix linear_targets(const Matrix& x, const Matrix& coef, double intercept) {
    Matrix y = multiply(x, coef);
    for (auto& v : y.data()) v += intercept;
    return y;
}

}  // namespace

TEST_SUITE("regress") {
    TEST_CASE("mse hand cases") {
        const Matrix a{{0.3, 0.7}, {0.1, 0.9}};
        CHECK(mse(a, a) == 0.0);
        Matrix shifted = a;
        for (auto& v : shifted.data()) v += 0.1;
        CHECK(mse(shifted, a) == doctest::Approx(0.01));
        CHECK(mse(Matrix{{0, 0}, {0, 0}}, Matrix{{1, 0}, {0, 1}}) == 0.5);
        CHECK_THROWS_AS(mse(Matrix(2, 2), Matrix(2, 3)), std::invalid_argument);
    }

    TEST_CASE("regressor kind names") {
        CHECK(parse_regressor_kind("lbfr") == RegressorKind::lbfr);
        CHECK(parse_regressor_kind("ann") == RegressorKind::mlp);
        CHECK(to_string(RegressorKind::svr) == "svr");
        CHECK_THROWS_AS(parse_regressor_kind("forest"), std::invalid_argument);
    }
}

TEST_SUITE("regress.lbfr") {
    TEST_CASE("feature map has M + 2 columns") {
        const auto x = uniform(10, 4, 1);
        const std::vector<double> center(4, 0.5);
        const auto phi = lbfr_features(x, center, 1.0);
        CHECK(phi.cols() == 6);
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(phi(i, 0) == 1.0);
            CHECK(phi(i, 3) == x(i, 2));
            double d2 = 0.0;
            for (std::size_t j = 0; j < 4; ++j) d2 += (x(i, j) - 0.5) * (x(i, j) - 0.5);
            CHECK(phi(i, 5) == doctest::Approx(std::exp(-d2 / 2.0)));
        }
        CHECK(lbfr_fit(x, uniform(10, 2, 2)).weights.rows() == 6);
    }

    TEST_CASE("noiseless linear targets are fitted exactly") {
        const auto x = uniform(40, 3, 3);
        const auto y = linear_targets(x, Matrix{{0.2, -0.4}, {0.5, 0.1}, {-0.3, 0.6}}, 0.25);
        const auto model = lbfr_fit(x, y);
        const auto pred = predict(model, x);
        CHECK(mse(pred, y) <= 1e-10);
        for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(pred(7, c) - y(7, c)) <= 1e-8);
    }

    TEST_CASE("closed form agrees with gradient descent and the normal equations") {
        Rng rng(19);
        const auto x = uniform(20, 3, 20);
        Matrix y(20, 2);
        for (auto& v : y.data()) v = rng.normal();
        const double lambda = 1e-3;
        const auto model = lbfr_fit(x, y, lambda);
        const auto phi = lbfr_features(x, model.center, model.width);

        const auto gd = oracle::ridge_gradient_descent(phi, y, lambda);
        double diff = 0.0;
        for (std::size_t i = 0; i < gd.data().size(); ++i)
            diff = std::max(diff, std::abs(gd.data()[i] - model.weights.data()[i]));
        CHECK(diff <= 1e-6);

        Matrix lhs = multiply(multiply_at_b(phi, phi), model.weights);
        for (std::size_t i = 0; i < lhs.rows(); ++i)
            for (std::size_t c = 0; c < lhs.cols(); ++c) lhs(i, c) += lambda * model.weights(i, c);
        const auto rhs = multiply_at_b(phi, y);
        CHECK(frobenius_distance(lhs, rhs) <= 1e-8 * frobenius_norm(rhs));
    }

    TEST_CASE("default ridge also satisfies the normal equations") {
        const auto x = uniform(30, 4, 5);
        const auto y = uniform(30, 3, 6);
        const auto model = lbfr_fit(x, y);
        const auto phi = lbfr_features(x, model.center, model.width);
        Matrix lhs = multiply(multiply_at_b(phi, phi), model.weights);
        for (std::size_t i = 0; i < lhs.rows(); ++i)
            for (std::size_t c = 0; c < lhs.cols(); ++c) lhs(i, c) += model.lambda * model.weights(i, c);
        const auto rhs = multiply_at_b(phi, y);
        CHECK(frobenius_distance(lhs, rhs) <= 1e-8 * frobenius_norm(rhs));
    }

    TEST_CASE("center and width") {
        const Matrix x{{0, 0}, {2, 0}, {0, 2}, {2, 2}};
        const auto model = lbfr_fit(x, Matrix{{0}, {1}, {1}, {2}});
        CHECK(model.center == std::vector<double>{1.0, 1.0});
        CHECK(model.width == doctest::Approx(std::sqrt(2.0)));
        // Identical rows: zero mean distance falls back to unit width.
        const Matrix same(4, 1, 0.5);
        CHECK(lbfr_features(same, std::vector<double>{0.5}, 1.0)(0, 2) == 1.0);
    }

    TEST_CASE("too few samples or mismatched shapes are rejected") {
        CHECK_THROWS(lbfr_fit(uniform(3, 3, 1), uniform(3, 1, 2)));
        CHECK_THROWS_AS(lbfr_fit(uniform(10, 2, 1), uniform(9, 1, 2)), std::invalid_argument);
        const auto model = lbfr_fit(uniform(10, 2, 1), uniform(10, 1, 2));
        CHECK_THROWS_AS(predict(model, uniform(3, 3, 1)), std::invalid_argument);
    }
}

TEST_SUITE("regress.mlp") {
    TEST_CASE("architecture and initialization") {
        const auto net = mlp_init(4, 3, {}, 1);
        REQUIRE(net.layers.size() == 11);
        CHECK(net.layers.front().weights.rows() == 4);
        for (std::size_t l = 0; l < 10; ++l) CHECK(net.layers[l].weights.cols() == 50);
        CHECK(net.layers.back().weights.cols() == 3);
        CHECK(net.parameter_count() == 4 * 50 + 50 + 9 * (50 * 50 + 50) + 50 * 3 + 3);
        for (const auto& l : net.layers)
            for (double b : l.bias) CHECK(b == 0.0);

        // Xavier-normal spread on the widest square layer.
        const auto& w = net.layers[5].weights;
        double ss = 0.0;
        for (double v : w.data()) ss += v * v;
        const double sd = std::sqrt(ss / static_cast<double>(w.data().size()));
        CHECK(sd == doctest::Approx(std::sqrt(2.0 / 100.0)).epsilon(0.1));
    }

    TEST_CASE("a dead network outputs its last bias") {
        auto net = mlp_init(3, 2, {2, 5}, 4);
        for (auto& l : net.layers) std::fill(l.weights.data().begin(), l.weights.data().end(), 0.0);
        net.layers.back().bias = {0.25, -1.5};
        const auto y = predict(net, uniform(6, 3, 9));
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(y(i, 0) == 0.25);
            CHECK(y(i, 1) == -1.5);
        }
    }

    TEST_CASE("analytic gradient matches central differences") {
        const auto x = uniform(12, 3, 40);
        Matrix y = uniform(12, 2, 41);
        auto net = mlp_init(3, 2, {2, 5}, 42);
        // Nonzero biases exercise their gradients too.
        Rng rng(43);
        for (auto& l : net.layers)
            for (auto& b : l.bias) b = 0.1 * rng.normal();

        double loss = 0.0;
        const auto analytic = flatten_parameters(mlp_gradient(net, x, y, &loss));
        CHECK(loss == doctest::Approx(mlp_loss(net, x, y)).epsilon(1e-14));

        const auto numeric = oracle::central_difference(
            [&](const std::vector<double>& p) {
                auto probe = net;
                assign_parameters(probe, p);
                return mlp_loss(probe, x, y);
            },
            flatten_parameters(net), 1e-5);
        double worst = 0.0;
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-6});
            worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
        }
        CHECK(worst <= 1e-4);
    }

    TEST_CASE("training loss falls over the first epochs and runs are reproducible") {
        const auto x = uniform(512, 3, 50);
        const auto y = linear_targets(x, Matrix{{0.3}, {-0.2}, {0.4}}, 0.1);
        AdamParams adam;
        adam.epochs = 10;
        adam.batch_size = 64;
        const auto fit = mlp_fit(x, y, adam, 7, {2, 16});
        REQUIRE(fit.epoch_loss.size() == 10);
        for (std::size_t e = 1; e < 10; ++e) CHECK(fit.epoch_loss[e] < fit.epoch_loss[e - 1]);

        const auto again = mlp_fit(x, y, adam, 7, {2, 16});
        CHECK(flatten_parameters(again.model) == flatten_parameters(fit.model));
        const auto p1 = predict(fit.model, x);
        CHECK(p1 == predict(fit.model, x));
    }

    TEST_CASE("parameter round trip and bad settings") {
        auto net = mlp_init(2, 1, {2, 3}, 1);
        auto p = flatten_parameters(net);
        for (auto& v : p) v += 1.0;
        assign_parameters(net, p);
        CHECK(flatten_parameters(net) == p);
        p.pop_back();
        CHECK_THROWS_AS(assign_parameters(net, p), std::invalid_argument);

        AdamParams bad;
        bad.beta1 = 1.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = {};
        bad.learning_rate = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }

    TEST_CASE("divergence is reported") {
        const auto x = uniform(64, 2, 1);
        Matrix y = uniform(64, 1, 2);
        for (auto& v : y.data()) v *= 1e200;
        AdamParams adam;
        adam.epochs = 3;
        CHECK_THROWS_AS(mlp_fit(x, y, adam, 1, {2, 8}), std::runtime_error);
    }
}

TEST_SUITE("regress.svr") {
    TEST_CASE("constant model predicts its bias") {
        SvrModel m;
        m.weights = {0.0, 0.0};
        m.bias = 3.0;
        for (double v : predict(m, uniform(5, 2, 1))) CHECK(v == 3.0);
        CHECK_THROWS_AS(predict(m, uniform(5, 3, 1)), std::invalid_argument);
    }

    TEST_CASE("in-tube data reaches zero hinge loss") {
        Rng rng(6);
        const std::size_t n = 200;
        Matrix x(n, 1);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x(i, 0) = rng.uniform01();
            y[i] = 0.3 * x(i, 0) + 0.2 + 0.04 * (2.0 * rng.uniform01() - 1.0);
        }
        const auto m = svr_fit(x, y, {}, 3);
        CHECK(svr_hinge_loss(m, x, y) <= 1e-6);
    }

    TEST_CASE("objective within one percent of a grid-search optimum") {
        const std::vector<std::vector<double>> xs{{0, 1, 2, 3, 4, 5}, {0.1, 0.4, 0.5, 0.9, 1.3, 2.0}, {-1, -0.5, 0, 0.5, 1, 1.5}};
        const std::vector<std::vector<double>> ys{{0.1, 1.4, 1.9, 3.5, 3.8, 5.3}, {2.0, 1.1, 1.7, 0.2, 0.9, -0.6}, {0.3, 0.3, 0.3, 2.0, 0.3, 0.3}};
        for (std::size_t k = 0; k < xs.size(); ++k) {
            Matrix x(6, 1);
            x.set_column(0, xs[k]);
            SvrParams p;
            const auto model = svr_fit(x, ys[k], p, k);
            const auto grid = oracle::svr_grid_search(xs[k], ys[k], p.c, p.epsilon);
            CHECK(svr_objective(model, x, ys[k]) <= grid.objective * 1.01 + 1e-12);
        }
    }

    TEST_CASE("returned iterate is no worse than the start") {
        const auto x = uniform(50, 3, 8);
        const auto y = uniform(50, 1, 9).column(0);
        const auto m = svr_fit(x, y, {}, 1);
        SvrModel zero;
        zero.weights.assign(3, 0.0);
        CHECK(svr_objective(m, x, y) <= svr_objective(zero, x, y));
    }

    TEST_CASE("one model per output and reproducible under a seed") {
        const auto x = uniform(40, 2, 1);
        const auto y = uniform(40, 3, 2);
        const auto set = svr_fit_all(x, y, {}, 5);
        CHECK(set.outputs.size() == 3);
        const auto again = svr_fit_all(x, y, {}, 5);
        CHECK(predict(set, x) == predict(again, x));

        SvrParams bad;
        bad.c = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = {};
        bad.epsilon = -0.1;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
}
