#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "virtsense/clustering.hpp"
#include "virtsense/dataset.hpp"
#include "virtsense/fac2t.hpp"
#include "virtsense/kmeans.hpp"
#include "virtsense/regress.hpp"
#include "virtsense/repsel.hpp"
#include "virtsense/synthgen.hpp"

namespace virtsense {

/// Synthetic-data settings shared by both experiments.
struct SyntheticSettings {
    std::size_t n_datasets = 10;
    std::size_t n_sensors = 60;
    std::size_t n_blocks = 10;
    std::size_t block_size = 500;
    /// Experiment A: planted cluster counts, each also used as the search M.
    std::vector<std::size_t> cluster_counts{5, 10};
    /// Experiment B: planted cluster count.
    std::size_t planted_clusters = 6;
    /// Experiment B: fraction of sensors reassigned in each block solution.
    double corruption_fraction = 0.3;
    TriangularParams triangular;
    double eigen_floor = kDefaultEigenFloor;
};

struct PipelineConfig {
    std::string input;
    bool header = true;
    /// Optional planted clustering JSON used to score ARI.
    std::string ground_truth;
    std::size_t block_size = 1000;
    double train_fraction = 0.8;
    double variance_fraction = 0.95;
    Fac2tParams fac2t;
    KMeansOptions kmeans;
    std::vector<RegressorKind> regressors{RegressorKind::lbfr, RegressorKind::mlp, RegressorKind::svr};
    /// Mean test MSE (normalized units) at which the cluster-count search stops.
    double mse_threshold = 0.01;
    /// Upper bound of the search; 0 means one less than the sensor count.
    std::size_t max_clusters = 0;
    /// When set, exactly these cluster counts are evaluated instead of searching upward from the PCA estimate.
    std::vector<std::size_t> cluster_counts;
    std::uint64_t seed = 42;
    double lbfr_lambda = 1e-8;
    AdamParams adam;
    MlpArchitecture mlp;
    SvrParams svr;
    SyntheticSettings synthetic;
};

PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& cfg);

struct ReportRow {
    std::string dataset;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    double fac2t_objective = 0.0;
    double kmeans_objective = 0.0;
    std::optional<double> ideal_objective;
    std::optional<double> ari_fac2t;
    std::optional<double> ari_kmeans;
    std::map<RegressorKind, double> test_mse;
    std::optional<double> mean_mse;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;

    /// Header plus one line per row; absent values are empty cells.
    std::string to_csv() const;
};

/// Adjusted Rand index from the pair-counting contingency table.
double adjusted_rand_index(const ClusteringSolution& a, const ClusteringSolution& b);

// ---------------------------------------------------------------------------

struct PipelineResult {
    ExperimentReport report;
    std::size_t pca_estimate = 0;
    std::size_t accepted_m = 0;
    std::vector<std::string> sensor_names;
    NormParams norm;
    ClusteringSolution clustering;
    std::vector<Representative> representatives;
    std::vector<std::size_t> virtual_sensors;
    RunHistory history;
    std::vector<Regressor> models;
    /// Test-split targets and per-model predictions for the virtual sensors.
    Matrix test_actual;
    std::vector<Matrix> test_predicted;
};

/// load → clean → split → normalize → PCA estimate → (block K-Means → fusion →
/// representatives → regressors → test MSE), raising the cluster count by one
/// until the mean test MSE meets the threshold or the bound is reached.
PipelineResult run_pipeline(const PipelineConfig& cfg);
/// Same loop on an in-memory dataset; `ground_truth` enables ARI columns.
PipelineResult run_pipeline(const PipelineConfig& cfg, const SensorDataset& raw, const std::string& dataset_id,
                            const std::optional<ClusteringSolution>& ground_truth = std::nullopt);

/// Writes clustering.json, representatives.json, model.json, predictions.csv,
/// metrics.csv, history.csv, norm.json and report.csv into `dir`.
void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------

/// A planted dataset with its block partition.
struct SyntheticCase {
    ClusterSpec truth;
    SensorDataset data;
    BlockPartition blocks;
};

SyntheticCase make_synthetic_case(const SyntheticSettings& s, std::size_t n_clusters, std::uint64_t seed);

/// For every dataset and cluster count: fusion objective, whole-data K-Means
/// objective and planted-clustering objective, plus ARIs.
ExperimentReport run_experiment_a(const PipelineConfig& cfg);

struct ExperimentBResult {
    ExperimentReport report;
    RunHistory history;
    double initial_best_metric = 0.0;
    double final_best_metric = 0.0;
    double initial_ari = 0.0;
    double final_ari = 0.0;
};

/// Reassigns `fraction` of the sensors of a solution to uniform random
/// clusters; a singleton source swaps with a random member of the target.
ClusteringSolution corrupt_solution(const ClusteringSolution& s, double fraction, Rng& rng);

/// One planted dataset, corrupted block initializations, one fusion run.
ExperimentBResult run_experiment_b(const PipelineConfig& cfg);

std::string history_to_csv(const RunHistory& history);

}  // namespace virtsense
