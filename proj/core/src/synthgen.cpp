#include "virtsense/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "virtsense/pca.hpp"

namespace virtsense {

void TriangularParams::validate() const {
    if (!(low < peak && peak < high)) throw std::invalid_argument("triangular: need low < peak < high");
}

ClusterSpec sample_cluster_spec(std::size_t n_sensors, std::size_t n_clusters, std::uint64_t seed) {
    if (n_clusters == 0) throw std::invalid_argument("sample_cluster_spec: need at least one cluster");
    if (n_clusters > n_sensors) throw std::invalid_argument("sample_cluster_spec: more clusters than sensors");
    Rng rng(seed);
    ClusterSpec spec{std::vector<std::size_t>(n_sensors, 0), n_clusters};
    auto order = rng.sample_without_replacement(n_sensors, n_sensors);
    for (std::size_t i = 0; i < n_sensors; ++i)
        spec.labels[order[i]] = i < n_clusters ? i : rng.uniform_index(n_clusters);
    return spec;
}

double triangular_quantile(double u, const TriangularParams& t) {
    t.validate();
    u = std::clamp(u, 0.0, 1.0);
    const double width = t.high - t.low;
    const double split = (t.peak - t.low) / width;
    if (u < split) return t.low + std::sqrt(u * width * (t.peak - t.low));
    return t.high - std::sqrt((1.0 - u) * width * (t.high - t.peak));
}

double sample_triangular(Rng& rng, const TriangularParams& t) { return triangular_quantile(rng.uniform01(), t); }

double sample_triangular(const TriangularParams& t, std::uint64_t seed) {
    Rng rng(seed);
    return sample_triangular(rng, t);
}

Matrix build_correlation_matrix(const ClusterSpec& spec, std::uint64_t seed, const TriangularParams& t) {
    t.validate();
    const std::size_t n = spec.n_sensors();
    Rng rng(seed);
    Matrix c = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (spec.labels[i] == spec.labels[j]) c(i, j) = c(j, i) = sample_triangular(rng, t);
    return c;
}

Matrix repair_psd(const Matrix& c, double floor) {
    const auto spectrum = eigendecompose_sym(c);
    const std::size_t n = c.rows();
    std::vector<double> clamped(spectrum.values);
    for (auto& v : clamped) v = std::max(v, floor);

    Matrix rebuilt(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += spectrum.vectors(i, k) * clamped[k] * spectrum.vectors(j, k);
            rebuilt(i, j) = rebuilt(j, i) = s;
        }

    std::vector<double> inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(rebuilt(i, i));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rebuilt(i, j) *= inv_sqrt[i] * inv_sqrt[j];
    for (std::size_t i = 0; i < n; ++i) rebuilt(i, i) = 1.0;
    return rebuilt;
}

Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("cholesky: matrix not square");
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0)) throw std::runtime_error("cholesky: matrix is not positive definite (repair it first)");
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

SensorDataset generate_dataset(const Matrix& correlation, std::size_t n_readings, std::uint64_t seed) {
    const Matrix l = cholesky(correlation);
    const std::size_t n = correlation.rows();
    Rng rng(seed);
    SensorDataset d;
    for (std::size_t j = 0; j < n; ++j) d.names.push_back("s" + std::to_string(j));
    d.values = Matrix(n_readings, n);
    std::vector<double> z(n);
    for (std::size_t r = 0; r < n_readings; ++r) {
        for (auto& v : z) v = rng.normal();
        auto row = d.values.row(r);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * z[k];
            row[i] = s;
        }
    }
    return normalize(d).first;
}

}  // namespace virtsense
