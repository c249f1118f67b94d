#include "virtsense/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace virtsense {

Matrix covariance_matrix(const Matrix& samples) {
    const std::size_t n = samples.rows();
    const std::size_t p = samples.cols();
    if (n < 2) throw std::invalid_argument("covariance_matrix: need at least 2 samples");

    std::vector<double> mean(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = samples.row(i);
        for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
    }
    for (auto& m : mean) m /= static_cast<double>(n);

    Matrix cov(p, p);
    std::vector<double> centered(p);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = samples.row(i);
        for (std::size_t j = 0; j < p; ++j) centered[j] = row[j] - mean[j];
        for (std::size_t a = 0; a < p; ++a) {
            const double ca = centered[a];
            auto dst = cov.row(a);
            for (std::size_t b = a; b < p; ++b) dst[b] += ca * centered[b];
        }
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            cov(a, b) /= denom;
            cov(b, a) = cov(a, b);
        }
    return cov;
}

Matrix covariance_matrix(const SensorDataset& d) { return covariance_matrix(d.values); }

Spectrum eigendecompose_sym(const Matrix& m, const JacobiOptions& opts) {
    const std::size_t n = m.rows();
    if (m.cols() != n) throw std::invalid_argument("eigendecompose_sym: matrix not square");
    if (max_abs_asymmetry(m) > 1e-10 * std::max(1.0, frobenius_norm(m)))
        throw std::invalid_argument("eigendecompose_sym: matrix not symmetric");

    Matrix a = m;
    Matrix v = Matrix::identity(n);
    const double total = frobenius_norm(a);

    auto off_diagonal = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
        return std::sqrt(2.0 * s);
    };

    bool converged = total == 0.0 || n < 2;
    for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
        if (off_diagonal() <= opts.relative_tolerance * total) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Negligible against both diagonal entries: annihilate without rotating.
                const double g = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) && std::abs(a(q, q)) + g == std::abs(a(q, q))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged && off_diagonal() > opts.relative_tolerance * total)
        throw std::runtime_error("eigendecompose_sym: Jacobi sweeps did not converge");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    Spectrum out;
    out.values.reserve(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values.push_back(a(order[k], order[k]));
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

std::size_t min_components_for_fraction(const Spectrum& s, double variance_fraction) {
    if (!(variance_fraction > 0.0 && variance_fraction <= 1.0))
        throw std::invalid_argument("variance fraction must lie in (0, 1]");
    double total = 0.0;
    for (double v : s.values) total += std::max(v, 0.0);
    if (total <= 0.0) throw std::runtime_error("covariance spectrum is identically zero");
    double acc = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        acc += std::max(s.values[k], 0.0);
        if (acc >= variance_fraction * total * (1.0 - 1e-12)) return k + 1;
    }
    return s.values.size();
}

std::size_t estimate_min_sensors(const SensorDataset& d, double variance_fraction) {
    return min_components_for_fraction(eigendecompose_sym(covariance_matrix(d)), variance_fraction);
}

}  // namespace virtsense
