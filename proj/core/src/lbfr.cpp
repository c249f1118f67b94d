#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "virtsense/regress.hpp"

namespace virtsense {

namespace {

/// Minimizes |A·X - B|_F by Householder QR. A must have full column rank.
Matrix least_squares_qr(Matrix a, Matrix b) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    if (rows < cols) throw std::invalid_argument("least squares: fewer equations than unknowns");

    double scale = 0.0;
    for (double v : a.data()) scale = std::max(scale, std::abs(v));

    std::vector<double> v(rows);
    for (std::size_t k = 0; k < cols; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < rows; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm <= 1e-14 * scale) throw std::runtime_error("least squares: design matrix is rank deficient");
        const double alpha = a(k, k) > 0.0 ? -norm : norm;

        double vnorm2 = 0.0;
        for (std::size_t i = k; i < rows; ++i) {
            v[i] = a(i, k) - (i == k ? alpha : 0.0);
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 == 0.0) continue;

        auto reflect = [&](Matrix& m) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                double dot = 0.0;
                for (std::size_t i = k; i < rows; ++i) dot += v[i] * m(i, c);
                const double f = 2.0 * dot / vnorm2;
                for (std::size_t i = k; i < rows; ++i) m(i, c) -= f * v[i];
            }
        };
        reflect(a);
        reflect(b);
    }

    Matrix x(cols, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t ii = cols; ii-- > 0;) {
            double s = b(ii, c);
            for (std::size_t j = ii + 1; j < cols; ++j) s -= a(ii, j) * x(j, c);
            x(ii, c) = s / a(ii, ii);
        }
    }
    return x;
}

}  // namespace

Matrix lbfr_features(const Matrix& x, std::span<const double> center, double width) {
    if (x.cols() != center.size()) throw std::invalid_argument("lbfr: input dimension mismatch");
    const std::size_t m = x.cols();
    Matrix phi(x.rows(), m + 2);
    const double denom = 2.0 * width * width;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto row = x.row(i);
        phi(i, 0) = 1.0;
        double r2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            phi(i, j + 1) = row[j];
            r2 += (row[j] - center[j]) * (row[j] - center[j]);
        }
        phi(i, m + 1) = std::exp(-r2 / denom);
    }
    return phi;
}

LbfrModel lbfr_fit(const Matrix& x, const Matrix& y, double lambda) {
    if (x.rows() != y.rows()) throw std::invalid_argument("lbfr_fit: input and target row counts differ");
    if (x.rows() < x.cols() + 2) throw std::invalid_argument("lbfr_fit: need at least M + 2 samples");
    if (!(lambda >= 0.0)) throw std::invalid_argument("lbfr_fit: ridge must be nonnegative");
    for (double v : x.data())
        if (!std::isfinite(v)) throw std::invalid_argument("lbfr_fit: non-finite input");
    for (double v : y.data())
        if (!std::isfinite(v)) throw std::invalid_argument("lbfr_fit: non-finite target");

    const std::size_t n = x.rows();
    const std::size_t m = x.cols();
    LbfrModel model;
    model.lambda = lambda;
    model.center.assign(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) model.center[j] += x(i, j);
    for (auto& c : model.center) c /= static_cast<double>(n);

    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) r2 += (x(i, j) - model.center[j]) * (x(i, j) - model.center[j]);
        dist += std::sqrt(r2);
    }
    model.width = dist > 0.0 ? dist / static_cast<double>(n) : 1.0;

    const Matrix phi = lbfr_features(x, model.center, model.width);
    const std::size_t p = phi.cols();
    // [Φ; sqrt(λ)·I] W ≈ [Y; 0] has the ridge normal equations as its own.
    Matrix a(n + p, p);
    Matrix b(n + p, y.cols());
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(phi.row(i).begin(), phi.row(i).end(), a.row(i).begin());
        std::copy(y.row(i).begin(), y.row(i).end(), b.row(i).begin());
    }
    const double root = std::sqrt(lambda);
    for (std::size_t j = 0; j < p; ++j) a(n + j, j) = root;
    model.weights = least_squares_qr(std::move(a), std::move(b));
    return model;
}

Matrix predict(const LbfrModel& model, const Matrix& x) {
    if (x.cols() != model.input_dim()) throw std::invalid_argument("predict: LBFR input dimension mismatch");
    return multiply(lbfr_features(x, model.center, model.width), model.weights);
}

}  // namespace virtsense
