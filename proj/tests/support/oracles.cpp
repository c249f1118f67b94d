#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

using virtsense::Matrix;

Matrix covariance(const Matrix& samples) {
    const std::size_t n = samples.rows(), p = samples.cols();
    Matrix out(p, p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
            double ma = 0.0, mb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                ma += samples(i, a);
                mb += samples(i, b);
            }
            ma /= static_cast<double>(n);
            mb /= static_cast<double>(n);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += (samples(i, a) - ma) * (samples(i, b) - mb);
            out(a, b) = s / static_cast<double>(n - 1);
        }
    }
    return out;
}

namespace {

double wcss(const Matrix& points, const std::vector<std::size_t>& labels, std::size_t m) {
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<double> mean(points.cols(), 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (labels[i] != k) continue;
            ++count;
            for (std::size_t d = 0; d < points.cols(); ++d) mean[d] += points(i, d);
        }
        for (auto& v : mean) v /= static_cast<double>(count);
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (labels[i] != k) continue;
            for (std::size_t d = 0; d < points.cols(); ++d) total += (points(i, d) - mean[d]) * (points(i, d) - mean[d]);
        }
    }
    return total;
}

// Restricted growth strings enumerate each set partition exactly once.
void enumerate(const Matrix& points, std::size_t m, std::vector<std::size_t>& labels, std::size_t i,
               std::size_t used, double& best) {
    const std::size_t n = points.rows();
    if (n - i < m - used) return;
    if (i == n) {
        if (used == m) best = std::min(best, wcss(points, labels, m));
        return;
    }
    for (std::size_t k = 0; k <= std::min(used, m - 1); ++k) {
        labels[i] = k;
        enumerate(points, m, labels, i + 1, std::max(used, k + 1), best);
    }
}

}  // namespace

double exhaustive_kmeans_optimum(const Matrix& points, std::size_t m) {
    std::vector<std::size_t> labels(points.rows(), 0);
    double best = std::numeric_limits<double>::infinity();
    enumerate(points, m, labels, 0, 0, best);
    return best;
}

Matrix ridge_gradient_descent(const Matrix& phi, const Matrix& y, double lambda, double tol, std::size_t max_iter) {
    Matrix a = virtsense::multiply_at_b(phi, phi);
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += lambda;
    const Matrix b = virtsense::multiply_at_b(phi, y);

    // Step 1/L with L bounded by the largest absolute row sum of the SPD matrix.
    double lip = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        lip = std::max(lip, s);
    }
    Matrix w(a.rows(), y.cols(), 0.0);
    for (std::size_t it = 0; it < max_iter; ++it) {
        const Matrix grad = virtsense::multiply(a, w);
        double step = 0.0;
        for (std::size_t i = 0; i < w.rows(); ++i)
            for (std::size_t j = 0; j < w.cols(); ++j) {
                const double d = (grad(i, j) - b(i, j)) / lip;
                w(i, j) -= d;
                step = std::max(step, std::abs(d));
            }
        if (step < tol) break;
    }
    return w;
}

std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double step) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + step;
        const double up = f(x);
        x[i] = keep - step;
        const double down = f(x);
        x[i] = keep;
        g[i] = (up - down) / (2.0 * step);
    }
    return g;
}

namespace {

double svr_obj(const std::vector<double>& x, const std::vector<double>& y, double c, double eps, double w, double b) {
    double s = 0.5 * w * w;
    for (std::size_t i = 0; i < x.size(); ++i) s += c * std::max(0.0, std::abs(y[i] - w * x[i] - b) - eps);
    return s;
}

}  // namespace

GridMinimum svr_grid_search(const std::vector<double>& x, const std::vector<double>& y, double c, double epsilon) {
    GridMinimum best{0.0, 0.0, svr_obj(x, y, c, epsilon, 0.0, 0.0)};
    double cw = 0.0, cb = 0.0, half = 10.0;
    for (int level = 0; level < 8; ++level) {
        const int steps = 400;
        const double h = 2.0 * half / steps;
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j <= steps; ++j) {
                const double w = cw - half + i * h, b = cb - half + j * h;
                const double o = svr_obj(x, y, c, epsilon, w, b);
                if (o < best.objective) best = {w, b, o};
            }
        cw = best.w;
        cb = best.b;
        half = 4.0 * h;
    }
    return best;
}

double ari_by_pairs(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const bool sa = a[i] == a[j], sb = b[i] == b[j];
            if (sa && sb) ++n11;
            else if (sa) ++n10;
            else if (sb) ++n01;
            else ++n00;
        }
    const double denom = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if (denom == 0.0) return 1.0;
    return 2.0 * (n00 * n11 - n01 * n10) / denom;
}

double quality(const std::vector<double>& c) {
    double mean = 0.0;
    for (double v : c) mean += v;
    mean /= static_cast<double>(c.size());
    double var = 0.0;
    for (double v : c) var += (v - mean) * (v - mean);
    var /= static_cast<double>(c.size());
    return (1.0 - var) / std::max(1.0 - mean, 1e-9);
}

}  // namespace oracle
