#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "virtsense/matrix.hpp"

namespace virtsense {

// ---------------------------------------------------------------------------
// Linear basis function regression

/// Features per sample: [1, x_1..x_M, exp(-|x - center|^2 / (2 width^2))].
struct LbfrModel {
    Matrix weights;  // (M + 2) x outputs
    std::vector<double> center;
    double width = 1.0;
    double lambda = 1e-8;

    std::size_t input_dim() const noexcept { return center.size(); }
    std::size_t output_dim() const noexcept { return weights.cols(); }
};

Matrix lbfr_features(const Matrix& x, std::span<const double> center, double width);

/// Ridge least squares on the basis features, solved by Householder QR of the
/// ridge-augmented design matrix.
LbfrModel lbfr_fit(const Matrix& x, const Matrix& y, double lambda = 1e-8);

// ---------------------------------------------------------------------------
// Multilayer perceptron

struct DenseLayer {
    Matrix weights;  // fan_in x fan_out
    std::vector<double> bias;
};

/// Fully connected network: rectifier on hidden layers, identity output.
struct MlpModel {
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const noexcept { return layers.empty() ? 0 : layers.front().weights.rows(); }
    std::size_t output_dim() const noexcept { return layers.empty() ? 0 : layers.back().weights.cols(); }
    std::size_t parameter_count() const;
};

struct MlpArchitecture {
    std::size_t hidden_layers = 10;
    std::size_t hidden_width = 50;
};

struct AdamParams {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 256;
    std::size_t epochs = 100;

    void validate() const;
};

struct MlpFit {
    MlpModel model;
    /// Mean-squared training error after each epoch.
    std::vector<double> epoch_loss;
};

/// Xavier-normal weights (std = sqrt(2 / (fan_in + fan_out))), zero biases.
MlpModel mlp_init(std::size_t input_dim, std::size_t output_dim, const MlpArchitecture& arch, std::uint64_t seed);

/// Mini-batch Adam on mean-squared error. Throws std::runtime_error on a non-finite loss.
MlpFit mlp_fit(const Matrix& x, const Matrix& y, const AdamParams& adam, std::uint64_t seed,
               const MlpArchitecture& arch = {});

/// Loss averaged over samples and outputs.
double mlp_loss(const MlpModel& model, const Matrix& x, const Matrix& y);
/// Gradient of `mlp_loss`, returned as a model of identical shape.
MlpModel mlp_gradient(const MlpModel& model, const Matrix& x, const Matrix& y, double* loss = nullptr);

std::vector<double> flatten_parameters(const MlpModel& model);
void assign_parameters(MlpModel& model, std::span<const double> params);

// ---------------------------------------------------------------------------
// Linear epsilon-insensitive support vector regression

struct SvrParams {
    double c = 1.0;
    double epsilon = 0.1;
    std::size_t steps = 20000;
    std::size_t batch_size = 16;
    double learning_rate = 0.1;
    /// Step at iteration t is learning_rate / (1 + t * decay).
    double decay = 1e-3;

    void validate() const;
};

/// One output: y ≈ w·x + b.
struct SvrModel {
    std::vector<double> weights;
    double bias = 0.0;
    double c = 1.0;
    double epsilon = 0.1;
};

/// One independent model per output column.
struct SvrSet {
    std::vector<SvrModel> outputs;

    std::size_t input_dim() const noexcept { return outputs.empty() ? 0 : outputs.front().weights.size(); }
    std::size_t output_dim() const noexcept { return outputs.size(); }
};

/// 1/2 |w|^2 + C * sum_i max(0, |y_i - w·x_i - b| - epsilon)
double svr_objective(const SvrModel& model, const Matrix& x, std::span<const double> y);
/// Mean of max(0, |y_i - w·x_i - b| - epsilon).
double svr_hinge_loss(const SvrModel& model, const Matrix& x, std::span<const double> y);

/// Seeded stochastic subgradient descent on `svr_objective`, returning the
/// best iterate seen (the zero start included).
SvrModel svr_fit(const Matrix& x, std::span<const double> y, const SvrParams& params, std::uint64_t seed);
SvrSet svr_fit_all(const Matrix& x, const Matrix& y, const SvrParams& params, std::uint64_t seed);

// ---------------------------------------------------------------------------

enum class RegressorKind { lbfr, mlp, svr };

std::string to_string(RegressorKind kind);
RegressorKind parse_regressor_kind(const std::string& text);

using Regressor = std::variant<LbfrModel, MlpModel, SvrSet>;

RegressorKind kind_of(const Regressor& model);
std::size_t input_dim(const Regressor& model);

Matrix predict(const LbfrModel& model, const Matrix& x);
Matrix predict(const MlpModel& model, const Matrix& x);
std::vector<double> predict(const SvrModel& model, const Matrix& x);
Matrix predict(const SvrSet& model, const Matrix& x);
Matrix predict(const Regressor& model, const Matrix& x);

/// Mean over all entries of the squared difference.
double mse(const Matrix& predicted, const Matrix& actual);

}  // namespace virtsense
