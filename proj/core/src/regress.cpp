#include "virtsense/regress.hpp"

#include <stdexcept>

namespace virtsense {

std::string to_string(RegressorKind kind) {
    switch (kind) {
        case RegressorKind::lbfr: return "lbfr";
        case RegressorKind::mlp: return "mlp";
        case RegressorKind::svr: return "svr";
    }
    return "unknown";
}

RegressorKind parse_regressor_kind(const std::string& text) {
    if (text == "lbfr") return RegressorKind::lbfr;
    if (text == "mlp" || text == "ann") return RegressorKind::mlp;
    if (text == "svr") return RegressorKind::svr;
    throw std::invalid_argument("unknown regressor kind '" + text + "' (expected lbfr, mlp or svr)");
}

RegressorKind kind_of(const Regressor& model) { return static_cast<RegressorKind>(model.index()); }

std::size_t input_dim(const Regressor& model) {
    return std::visit([](const auto& m) { return m.input_dim(); }, model);
}

Matrix predict(const Regressor& model, const Matrix& x) {
    return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

double mse(const Matrix& predicted, const Matrix& actual) {
    if (predicted.rows() != actual.rows() || predicted.cols() != actual.cols())
        throw std::invalid_argument("mse: shape mismatch");
    if (predicted.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < predicted.data().size(); ++i) {
        const double e = predicted.data()[i] - actual.data()[i];
        total += e * e;
    }
    return total / static_cast<double>(predicted.data().size());
}

}  // namespace virtsense
