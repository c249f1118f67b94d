#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "virtsense/random.hpp"
#include "virtsense/regress.hpp"

namespace virtsense {

namespace {

double residual(const SvrModel& model, std::span<const double> x, double y) {
    double s = model.bias;
    for (std::size_t j = 0; j < x.size(); ++j) s += model.weights[j] * x[j];
    return y - s;
}

double hinge_sum(const SvrModel& model, const Matrix& x, std::span<const double> y) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        total += std::max(0.0, std::abs(residual(model, x.row(i), y[i])) - model.epsilon);
    return total;
}

}  // namespace

void SvrParams::validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("svr: C must be > 0");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("svr: epsilon must be >= 0");
    if (batch_size == 0) throw std::invalid_argument("svr: batch size must be >= 1");
    if (!(learning_rate > 0.0) || !(decay >= 0.0)) throw std::invalid_argument("svr: invalid step schedule");
}

double svr_objective(const SvrModel& model, const Matrix& x, std::span<const double> y) {
    double reg = 0.0;
    for (double w : model.weights) reg += w * w;
    return 0.5 * reg + model.c * hinge_sum(model, x, y);
}

double svr_hinge_loss(const SvrModel& model, const Matrix& x, std::span<const double> y) {
    return x.rows() == 0 ? 0.0 : hinge_sum(model, x, y) / static_cast<double>(x.rows());
}

SvrModel svr_fit(const Matrix& x, std::span<const double> y, const SvrParams& params, std::uint64_t seed) {
    params.validate();
    if (x.rows() != y.size()) throw std::invalid_argument("svr_fit: input and target lengths differ");
    if (x.rows() == 0) throw std::invalid_argument("svr_fit: need at least one sample");
    for (double v : x.data())
        if (!std::isfinite(v)) throw std::invalid_argument("svr_fit: non-finite input");
    for (double v : y)
        if (!std::isfinite(v)) throw std::invalid_argument("svr_fit: non-finite target");

    const std::size_t n = x.rows();
    const std::size_t dim = x.cols();
    SvrModel current{std::vector<double>(dim, 0.0), 0.0, params.c, params.epsilon};
    SvrModel best = current;
    double best_objective = svr_objective(best, x, y);

    Rng rng(seed);
    const std::size_t batch = std::min(params.batch_size, n);
    // The objective is rescaled by 1/n so a batch average estimates its subgradient.
    const double reg_scale = 1.0 / static_cast<double>(n);
    const std::size_t eval_every = std::max<std::size_t>(1, n / batch);
    std::vector<double> grad(dim);

    for (std::size_t t = 0; t < params.steps; ++t) {
        for (std::size_t j = 0; j < dim; ++j) grad[j] = reg_scale * current.weights[j];
        double grad_b = 0.0;
        for (std::size_t k = 0; k < batch; ++k) {
            const std::size_t i = rng.uniform_index(n);
            const double r = residual(current, x.row(i), y[i]);
            double sign = 0.0;
            if (r > params.epsilon) sign = -1.0;
            else if (r < -params.epsilon) sign = 1.0;
            if (sign == 0.0) continue;
            const double f = sign * params.c / static_cast<double>(batch);
            auto xi = x.row(i);
            for (std::size_t j = 0; j < dim; ++j) grad[j] += f * xi[j];
            grad_b += f;
        }
        const double step = params.learning_rate / (1.0 + static_cast<double>(t) * params.decay);
        for (std::size_t j = 0; j < dim; ++j) current.weights[j] -= step * grad[j];
        current.bias -= step * grad_b;

        if ((t + 1) % eval_every == 0 || t + 1 == params.steps) {
            const double obj = svr_objective(current, x, y);
            if (!std::isfinite(obj)) throw std::runtime_error("svr_fit: iterate became non-finite");
            if (obj < best_objective) {
                best_objective = obj;
                best = current;
            }
        }
    }
    return best;
}

SvrSet svr_fit_all(const Matrix& x, const Matrix& y, const SvrParams& params, std::uint64_t seed) {
    SvrSet set;
    for (std::size_t c = 0; c < y.cols(); ++c) set.outputs.push_back(svr_fit(x, y.column(c), params, mix_seed(seed, c)));
    return set;
}

std::vector<double> predict(const SvrModel& model, const Matrix& x) {
    if (x.cols() != model.weights.size()) throw std::invalid_argument("predict: SVR input dimension mismatch");
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = -residual(model, x.row(i), 0.0);
    return out;
}

Matrix predict(const SvrSet& model, const Matrix& x) {
    Matrix out(x.rows(), model.output_dim());
    for (std::size_t c = 0; c < model.outputs.size(); ++c) out.set_column(c, predict(model.outputs[c], x));
    return out;
}

}  // namespace virtsense
