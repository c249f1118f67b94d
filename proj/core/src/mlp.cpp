#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "virtsense/random.hpp"
#include "virtsense/regress.hpp"

namespace virtsense {

namespace {

/// Activations kept for backpropagation: inputs to every layer plus the output.
struct ForwardPass {
    std::vector<Matrix> activations;
};

void affine(const Matrix& in, const DenseLayer& layer, Matrix& out) {
    const std::size_t fan_out = layer.weights.cols();
    out = Matrix(in.rows(), fan_out);
    for (std::size_t r = 0; r < in.rows(); ++r) {
        auto dst = out.row(r);
        std::copy(layer.bias.begin(), layer.bias.end(), dst.begin());
        auto src = in.row(r);
        for (std::size_t k = 0; k < src.size(); ++k) {
            const double a = src[k];
            if (a == 0.0) continue;
            auto w = layer.weights.row(k);
            for (std::size_t j = 0; j < fan_out; ++j) dst[j] += a * w[j];
        }
    }
}

ForwardPass forward(const MlpModel& model, const Matrix& x) {
    ForwardPass pass;
    pass.activations.reserve(model.layers.size() + 1);
    pass.activations.push_back(x);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Matrix z;
        affine(pass.activations.back(), model.layers[l], z);
        if (l + 1 < model.layers.size())
            for (auto& v : z.data()) v = v > 0.0 ? v : 0.0;
        pass.activations.push_back(std::move(z));
    }
    return pass;
}

/// Gradient of the mean-squared error over `x` rows; the loss is written to `loss`.
MlpModel backward(const MlpModel& model, const ForwardPass& pass, const Matrix& y, double& loss) {
    const Matrix& out = pass.activations.back();
    const double scale = 1.0 / static_cast<double>(out.rows() * out.cols());

    Matrix delta(out.rows(), out.cols());
    loss = 0.0;
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        const double e = out.data()[i] - y.data()[i];
        loss += e * e;
        delta.data()[i] = 2.0 * e * scale;
    }
    loss *= scale;

    MlpModel grad;
    grad.layers.resize(model.layers.size());
    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const Matrix& in = pass.activations[l];
        auto& g = grad.layers[l];
        g.weights = multiply_at_b(in, delta);
        g.bias.assign(delta.cols(), 0.0);
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            auto d = delta.row(r);
            for (std::size_t j = 0; j < d.size(); ++j) g.bias[j] += d[j];
        }
        if (l == 0) break;

        // Propagate through the weights, then through the rectifier of layer l-1.
        const Matrix& w = model.layers[l].weights;
        Matrix prev(in.rows(), in.cols());
        for (std::size_t r = 0; r < in.rows(); ++r) {
            auto d = delta.row(r);
            auto a = in.row(r);
            auto p = prev.row(r);
            for (std::size_t k = 0; k < in.cols(); ++k) {
                if (a[k] <= 0.0) continue;
                auto wk = w.row(k);
                double s = 0.0;
                for (std::size_t j = 0; j < d.size(); ++j) s += wk[j] * d[j];
                p[k] = s;
            }
        }
        delta = std::move(prev);
    }
    return grad;
}

void check_training_data(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows()) throw std::invalid_argument("mlp: input and target row counts differ");
    if (x.rows() == 0) throw std::invalid_argument("mlp: need at least one sample");
    for (double v : x.data())
        if (!std::isfinite(v)) throw std::invalid_argument("mlp: non-finite input");
    for (double v : y.data())
        if (!std::isfinite(v)) throw std::invalid_argument("mlp: non-finite target");
}

}  // namespace

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.data().size() + l.bias.size();
    return n;
}

void AdamParams::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("adam: learning rate must be > 0");
    if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0))
        throw std::invalid_argument("adam: moment decays must lie in (0, 1)");
    if (batch_size == 0) throw std::invalid_argument("adam: batch size must be >= 1");
}

MlpModel mlp_init(std::size_t input_dim, std::size_t output_dim, const MlpArchitecture& arch, std::uint64_t seed) {
    if (input_dim == 0 || output_dim == 0) throw std::invalid_argument("mlp_init: zero-sized input or output");
    if (arch.hidden_layers > 0 && arch.hidden_width == 0) throw std::invalid_argument("mlp_init: zero hidden width");
    std::vector<std::size_t> sizes{input_dim};
    for (std::size_t h = 0; h < arch.hidden_layers; ++h) sizes.push_back(arch.hidden_width);
    sizes.push_back(output_dim);

    Rng rng(seed);
    MlpModel model;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        DenseLayer layer{Matrix(sizes[l], sizes[l + 1]), std::vector<double>(sizes[l + 1], 0.0)};
        const double stddev = std::sqrt(2.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
        for (auto& w : layer.weights.data()) w = stddev * rng.normal();
        model.layers.push_back(std::move(layer));
    }
    return model;
}

double mlp_loss(const MlpModel& model, const Matrix& x, const Matrix& y) {
    const Matrix out = predict(model, x);
    if (out.rows() != y.rows() || out.cols() != y.cols()) throw std::invalid_argument("mlp_loss: target shape mismatch");
    return mse(out, y);
}

MlpModel mlp_gradient(const MlpModel& model, const Matrix& x, const Matrix& y, double* loss) {
    check_training_data(x, y);
    if (x.cols() != model.input_dim() || y.cols() != model.output_dim())
        throw std::invalid_argument("mlp_gradient: data shape does not match the network");
    double l = 0.0;
    auto grad = backward(model, forward(model, x), y, l);
    if (loss) *loss = l;
    return grad;
}

std::vector<double> flatten_parameters(const MlpModel& model) {
    std::vector<double> out;
    out.reserve(model.parameter_count());
    for (const auto& l : model.layers) {
        out.insert(out.end(), l.weights.data().begin(), l.weights.data().end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

void assign_parameters(MlpModel& model, std::span<const double> params) {
    if (params.size() != model.parameter_count()) throw std::invalid_argument("assign_parameters: size mismatch");
    std::size_t pos = 0;
    for (auto& l : model.layers) {
        for (auto& w : l.weights.data()) w = params[pos++];
        for (auto& b : l.bias) b = params[pos++];
    }
}

MlpFit mlp_fit(const Matrix& x, const Matrix& y, const AdamParams& adam, std::uint64_t seed,
               const MlpArchitecture& arch) {
    adam.validate();
    check_training_data(x, y);

    MlpFit fit;
    fit.model = mlp_init(x.cols(), y.cols(), arch, mix_seed(seed, 0));
    Rng rng(mix_seed(seed, 1));

    std::vector<double> params = flatten_parameters(fit.model);
    std::vector<double> m1(params.size(), 0.0);
    std::vector<double> m2(params.size(), 0.0);
    std::size_t step = 0;

    std::vector<std::size_t> order(x.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < adam.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += adam.batch_size) {
            const std::size_t stop = std::min(order.size(), start + adam.batch_size);
            std::span<const std::size_t> batch(order.data() + start, stop - start);
            const Matrix xb = x.select_rows(batch);
            const Matrix yb = y.select_rows(batch);

            double loss = 0.0;
            const auto grad = flatten_parameters(backward(fit.model, forward(fit.model, xb), yb, loss));
            if (!std::isfinite(loss))
                throw std::runtime_error("mlp_fit: loss became non-finite at epoch " + std::to_string(epoch) +
                                         "; lower the learning rate");

            ++step;
            const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(step));
            for (std::size_t i = 0; i < params.size(); ++i) {
                m1[i] = adam.beta1 * m1[i] + (1.0 - adam.beta1) * grad[i];
                m2[i] = adam.beta2 * m2[i] + (1.0 - adam.beta2) * grad[i] * grad[i];
                params[i] -= adam.learning_rate * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + adam.epsilon);
            }
            assign_parameters(fit.model, params);
        }
        const double epoch_loss = mlp_loss(fit.model, x, y);
        if (!std::isfinite(epoch_loss))
            throw std::runtime_error("mlp_fit: loss became non-finite at epoch " + std::to_string(epoch));
        fit.epoch_loss.push_back(epoch_loss);
    }
    return fit;
}

Matrix predict(const MlpModel& model, const Matrix& x) {
    if (x.cols() != model.input_dim()) throw std::invalid_argument("predict: MLP input dimension mismatch");
    return std::move(forward(model, x).activations.back());
}

}  // namespace virtsense
