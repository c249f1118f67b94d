#include "virtsense/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "virtsense/io.hpp"
#include "virtsense/pca.hpp"

namespace virtsense {

namespace {

double choose2(double n) { return n * (n - 1.0) / 2.0; }

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

constexpr RegressorKind kAllKinds[] = {RegressorKind::lbfr, RegressorKind::mlp, RegressorKind::svr};

struct MEvaluation {
    ReportRow row;
    ClusteringSolution clustering;
    std::vector<Representative> representatives;
    std::vector<std::size_t> virtual_sensors;
    RunHistory history;
    std::vector<Regressor> models;
    Matrix test_actual;
    std::vector<Matrix> test_predicted;
};

Regressor train_regressor(RegressorKind kind, const Matrix& x, const Matrix& y, const PipelineConfig& cfg,
                          std::uint64_t seed) {
    switch (kind) {
        case RegressorKind::lbfr: return lbfr_fit(x, y, cfg.lbfr_lambda);
        case RegressorKind::mlp: return mlp_fit(x, y, cfg.adam, seed, cfg.mlp).model;
        case RegressorKind::svr: return svr_fit_all(x, y, cfg.svr, seed);
    }
    throw std::logic_error("unhandled regressor kind");
}

MEvaluation evaluate_cluster_count(const PipelineConfig& cfg, const SensorDataset& train, const SensorDataset& test,
                                   const BlockPartition& blocks, std::size_t m, const std::string& dataset_id,
                                   const std::optional<ClusteringSolution>& truth) {
    const std::uint64_t seed = mix_seed(cfg.seed, m);
    MEvaluation ev;
    ev.row.dataset = dataset_id;
    ev.row.m = m;
    ev.row.seed = cfg.seed;

    const auto init = cluster_all_blocks(blocks, m, mix_seed(seed, 1), cfg.kmeans);
    auto fused = run_fac2t(blocks, init, cfg.fac2t, mix_seed(seed, 2));
    const auto whole = kmeans(train.values.transposed(), m, mix_seed(seed, 3), cfg.kmeans).solution;

    ev.row.fac2t_objective = fused.best_metric;
    ev.row.kmeans_objective = objective(whole, blocks, cfg.fac2t.epsilon_g);
    if (truth) {
        ev.row.ideal_objective = objective(*truth, blocks, cfg.fac2t.epsilon_g);
        ev.row.ari_fac2t = adjusted_rand_index(fused.best, *truth);
        ev.row.ari_kmeans = adjusted_rand_index(whole, *truth);
    }
    ev.clustering = fused.best;
    ev.history = std::move(fused.history);
    ev.representatives = select_representatives(ev.clustering, train);

    std::vector<std::size_t> inputs;
    for (const auto& r : ev.representatives) inputs.push_back(r.sensor);
    const std::set<std::size_t> input_set(inputs.begin(), inputs.end());
    for (std::size_t j = 0; j < train.n_sensors(); ++j)
        if (!input_set.count(j)) ev.virtual_sensors.push_back(j);

    const Matrix x_train = train.values.select_columns(inputs);
    const Matrix y_train = train.values.select_columns(ev.virtual_sensors);
    const Matrix x_test = test.values.select_columns(inputs);
    ev.test_actual = test.values.select_columns(ev.virtual_sensors);

    double mse_sum = 0.0;
    for (auto kind : cfg.regressors) {
        // Every sensor is a representative: nothing left to estimate.
        double err = 0.0;
        if (!ev.virtual_sensors.empty()) {
            ev.models.push_back(
                train_regressor(kind, x_train, y_train, cfg, mix_seed(seed, 10 + static_cast<std::uint64_t>(kind))));
            ev.test_predicted.push_back(predict(ev.models.back(), x_test));
            err = mse(ev.test_predicted.back(), ev.test_actual);
        }
        ev.row.test_mse[kind] = err;
        mse_sum += err;
    }
    if (!cfg.regressors.empty()) ev.row.mean_mse = mse_sum / static_cast<double>(cfg.regressors.size());
    return ev;
}

void require_non_constant(const SensorDataset& d) {
    std::string constant;
    for (std::size_t j = 0; j < d.n_sensors(); ++j) {
        const auto col = d.sensor(j);
        if (std::all_of(col.begin(), col.end(), [&](double v) { return v == col.front(); }))
            constant += (constant.empty() ? "" : ", ") + d.names[j];
    }
    if (!constant.empty()) throw std::runtime_error("constant sensors carry no information, remove them: " + constant);
}

}  // namespace

std::string ExperimentReport::to_csv() const {
    std::ostringstream out;
    out << "dataset,m,seed,fac2t_objective,kmeans_objective,ideal_objective,ari_fac2t,ari_kmeans";
    for (auto k : kAllKinds) out << ",mse_" << to_string(k);
    out << ",mean_mse\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.m << ',' << r.seed << ',' << format_double(r.fac2t_objective) << ','
            << format_double(r.kmeans_objective) << ',' << cell(r.ideal_objective) << ',' << cell(r.ari_fac2t) << ','
            << cell(r.ari_kmeans);
        for (auto k : kAllKinds) {
            const auto it = r.test_mse.find(k);
            out << ',' << (it == r.test_mse.end() ? std::string() : format_double(it->second));
        }
        out << ',' << cell(r.mean_mse) << '\n';
    }
    return out.str();
}

std::string history_to_csv(const RunHistory& history) {
    std::ostringstream out;
    out << "iteration,best_metric,mean_metric,alpha,beta\n";
    for (const auto& h : history)
        out << h.iteration << ',' << format_double(h.best_metric) << ',' << format_double(h.mean_metric) << ','
            << format_double(h.alpha) << ',' << h.beta << '\n';
    return out.str();
}

double adjusted_rand_index(const ClusteringSolution& a, const ClusteringSolution& b) {
    if (a.n_sensors() != b.n_sensors()) throw std::invalid_argument("adjusted_rand_index: length mismatch");
    const std::size_t n = a.n_sensors();
    if (n < 2) return 1.0;
    const std::size_t ma = *std::max_element(a.labels.begin(), a.labels.end()) + 1;
    const std::size_t mb = *std::max_element(b.labels.begin(), b.labels.end()) + 1;

    std::vector<double> table(ma * mb, 0.0), rows(ma, 0.0), cols(mb, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        table[a.labels[i] * mb + b.labels[i]] += 1.0;
        rows[a.labels[i]] += 1.0;
        cols[b.labels[i]] += 1.0;
    }
    double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (double v : table) index += choose2(v);
    for (double v : rows) sum_rows += choose2(v);
    for (double v : cols) sum_cols += choose2(v);
    const double expected = sum_rows * sum_cols / choose2(static_cast<double>(n));
    const double max_index = 0.5 * (sum_rows + sum_cols);
    // Both partitions trivial (all-in-one or all singletons): agreement is perfect.
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    if (cfg.input.empty()) throw std::invalid_argument("pipeline: no input CSV configured");
    const auto raw = load_csv(cfg.input, cfg.header);
    std::optional<ClusteringSolution> truth;
    if (!cfg.ground_truth.empty()) truth = clustering_from_json(read_text_file(cfg.ground_truth), raw.names);
    return run_pipeline(cfg, raw, std::filesystem::path(cfg.input).stem().string(), truth);
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const SensorDataset& raw, const std::string& dataset_id,
                            const std::optional<ClusteringSolution>& ground_truth) {
    if (!(cfg.mse_threshold > 0.0)) throw std::invalid_argument("pipeline: mse_threshold must be > 0");
    const auto cleaned = clean_missing(raw);
    if (cleaned.n_sensors() < 2) throw std::invalid_argument("pipeline: need at least two sensors");
    const std::size_t max_m = cfg.max_clusters == 0 ? cleaned.n_sensors() - 1 : cfg.max_clusters;
    if (max_m > cleaned.n_sensors()) throw std::invalid_argument("pipeline: max_clusters exceeds the sensor count");
    if (ground_truth && ground_truth->n_sensors() != cleaned.n_sensors())
        throw std::invalid_argument("pipeline: ground truth covers a different number of sensors");

    auto [train_raw, test_raw] = split_train_test(cleaned, cfg.train_fraction, mix_seed(cfg.seed, 0));
    if (test_raw.n_samples() == 0) throw std::invalid_argument("pipeline: test split is empty");
    require_non_constant(train_raw);

    PipelineResult result;
    result.sensor_names = cleaned.names;
    result.norm = fit_normalization(train_raw);
    const auto train = result.norm.apply(train_raw);
    const auto test = result.norm.apply(test_raw);
    const auto blocks = partition_blocks(train, cfg.block_size);

    result.pca_estimate = estimate_min_sensors(train, cfg.variance_fraction);

    std::vector<std::size_t> schedule = cfg.cluster_counts;
    const bool search = schedule.empty();
    if (search) schedule.push_back(std::min(result.pca_estimate, max_m));
    for (auto m : schedule)
        if (m == 0 || m > cleaned.n_sensors()) throw std::invalid_argument("pipeline: cluster count out of range");

    // Search mode stops at the first count meeting the threshold (or at the
    // bound). An explicit list is evaluated in full and keeps the first count
    // meeting the threshold, otherwise the one with the lowest mean MSE.
    std::optional<MEvaluation> accepted;
    auto score = [](const MEvaluation& e) { return e.row.mean_mse.value_or(0.0); };
    for (std::size_t idx = 0; idx < schedule.size(); ++idx) {
        const std::size_t m = schedule[idx];
        auto ev = evaluate_cluster_count(cfg, train, test, blocks, m, dataset_id, ground_truth);
        result.report.rows.push_back(ev.row);
        const bool good = score(ev) <= cfg.mse_threshold;
        const bool accepted_good = accepted && score(*accepted) <= cfg.mse_threshold;
        if (search || !accepted || (!accepted_good && (good || score(ev) < score(*accepted))))
            accepted = std::move(ev);
        if (search && !good && m < max_m) schedule.push_back(m + 1);
    }

    auto& ev = *accepted;
    result.accepted_m = ev.row.m;
    result.clustering = std::move(ev.clustering);
    result.representatives = std::move(ev.representatives);
    result.virtual_sensors = std::move(ev.virtual_sensors);
    result.history = std::move(ev.history);
    result.models = std::move(ev.models);
    result.test_actual = std::move(ev.test_actual);
    result.test_predicted = std::move(ev.test_predicted);
    return result;
}

void write_pipeline_outputs(const PipelineResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto& names = r.sensor_names;
    write_text_file(dir / "clustering.json", clustering_to_json(r.clustering, names));
    write_text_file(dir / "representatives.json", representatives_to_json(r.representatives, names));
    write_text_file(dir / "norm.json", r.norm.to_json() + "\n");

    ModelBundle bundle;
    for (const auto& rep : r.representatives) bundle.inputs.push_back(names[rep.sensor]);
    for (auto v : r.virtual_sensors) bundle.outputs.push_back(names[v]);
    bundle.norm = r.norm.subset(bundle.inputs);
    const auto out_norm = r.norm.subset(bundle.outputs);
    bundle.norm.names.insert(bundle.norm.names.end(), out_norm.names.begin(), out_norm.names.end());
    bundle.norm.ranges.insert(bundle.norm.ranges.end(), out_norm.ranges.begin(), out_norm.ranges.end());
    bundle.models = r.models;
    write_text_file(dir / "model.json", models_to_json(bundle));

    std::ostringstream pred;
    pred << "index";
    for (auto v : r.virtual_sensors) {
        pred << ',' << names[v] << "_actual";
        for (const auto& m : r.models) pred << ',' << names[v] << '_' << to_string(kind_of(m));
    }
    pred << '\n';
    for (std::size_t i = 0; i < r.test_actual.rows(); ++i) {
        pred << i;
        for (std::size_t c = 0; c < r.virtual_sensors.size(); ++c) {
            pred << ',' << format_double(r.test_actual(i, c));
            for (const auto& p : r.test_predicted) pred << ',' << format_double(p(i, c));
        }
        pred << '\n';
    }
    write_text_file(dir / "predictions.csv", pred.str());

    std::ostringstream metrics;
    metrics << "regressor,m,test_mse\n";
    for (std::size_t k = 0; k < r.models.size(); ++k)
        metrics << to_string(kind_of(r.models[k])) << ',' << r.accepted_m << ','
                << format_double(mse(r.test_predicted[k], r.test_actual)) << '\n';
    write_text_file(dir / "metrics.csv", metrics.str());
    write_text_file(dir / "history.csv", history_to_csv(r.history));
    write_text_file(dir / "report.csv", r.report.to_csv());
}

SyntheticCase make_synthetic_case(const SyntheticSettings& s, std::size_t n_clusters, std::uint64_t seed) {
    SyntheticCase c;
    c.truth = sample_cluster_spec(s.n_sensors, n_clusters, mix_seed(seed, 1));
    const auto corr = repair_psd(build_correlation_matrix(c.truth, mix_seed(seed, 2), s.triangular), s.eigen_floor);
    c.data = generate_dataset(corr, s.n_blocks * s.block_size, mix_seed(seed, 3));
    c.blocks = partition_blocks(c.data, s.block_size);
    return c;
}

ExperimentReport run_experiment_a(const PipelineConfig& cfg) {
    const auto& s = cfg.synthetic;
    ExperimentReport report;
    for (std::size_t d = 0; d < s.n_datasets; ++d) {
        for (auto m : s.cluster_counts) {
            const std::uint64_t seed = mix_seed(mix_seed(cfg.seed, d), m);
            const auto sc = make_synthetic_case(s, m, seed);
            const auto init = cluster_all_blocks(sc.blocks, m, mix_seed(seed, 4), cfg.kmeans);
            const auto fused = run_fac2t(sc.blocks, init, cfg.fac2t, mix_seed(seed, 5));
            const auto whole = kmeans(sc.data.values.transposed(), m, mix_seed(seed, 6), cfg.kmeans).solution;

            ReportRow row;
            row.dataset = "synthetic-" + std::to_string(d);
            row.m = m;
            row.seed = cfg.seed;
            row.fac2t_objective = fused.best_metric;
            row.kmeans_objective = objective(whole, sc.blocks, cfg.fac2t.epsilon_g);
            row.ideal_objective = objective(sc.truth, sc.blocks, cfg.fac2t.epsilon_g);
            row.ari_fac2t = adjusted_rand_index(fused.best, sc.truth);
            row.ari_kmeans = adjusted_rand_index(whole, sc.truth);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

ClusteringSolution corrupt_solution(const ClusteringSolution& s, double fraction, Rng& rng) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("corruption fraction must lie in [0, 1]");
    ClusteringSolution out = s;
    if (s.m < 2) return out;
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(s.n_sensors())));
    auto sizes = out.cluster_sizes();
    for (auto sensor : rng.sample_without_replacement(s.n_sensors(), count)) {
        const std::size_t from = out.labels[sensor];
        const std::size_t to = rng.uniform_index(s.m);
        if (from == to) continue;
        if (sizes[from] == 1) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < out.labels.size(); ++i)
                if (out.labels[i] == to) members.push_back(i);
            out.labels[members[rng.uniform_index(members.size())]] = from;
            ++sizes[from];
            --sizes[to];
        }
        out.labels[sensor] = to;
        --sizes[from];
        ++sizes[to];
    }
    return out;
}

ExperimentBResult run_experiment_b(const PipelineConfig& cfg) {
    const auto& s = cfg.synthetic;
    const std::size_t m = s.planted_clusters;
    const auto sc = make_synthetic_case(s, m, mix_seed(cfg.seed, 100));
    auto init = cluster_all_blocks(sc.blocks, m, mix_seed(cfg.seed, 101), cfg.kmeans);
    Rng rng(mix_seed(cfg.seed, 102));
    for (auto& sol : init) sol = corrupt_solution(sol, s.corruption_fraction, rng);

    ExperimentBResult out;
    std::size_t best_init = 0;
    double best_init_metric = -1.0;
    for (std::size_t b = 0; b < init.size(); ++b) {
        const double g = objective(init[b], sc.blocks, cfg.fac2t.epsilon_g);
        if (g > best_init_metric) {
            best_init_metric = g;
            best_init = b;
        }
    }
    out.initial_ari = adjusted_rand_index(init[best_init], sc.truth);

    auto fused = run_fac2t(sc.blocks, init, cfg.fac2t, mix_seed(cfg.seed, 103));
    out.history = fused.history;
    out.initial_best_metric = fused.history.front().best_metric;
    out.final_best_metric = fused.best_metric;
    out.final_ari = adjusted_rand_index(fused.best, sc.truth);

    const auto whole = kmeans(sc.data.values.transposed(), m, mix_seed(cfg.seed, 104), cfg.kmeans).solution;
    ReportRow row;
    row.dataset = "synthetic-b";
    row.m = m;
    row.seed = cfg.seed;
    row.fac2t_objective = fused.best_metric;
    row.kmeans_objective = objective(whole, sc.blocks, cfg.fac2t.epsilon_g);
    row.ideal_objective = objective(sc.truth, sc.blocks, cfg.fac2t.epsilon_g);
    row.ari_fac2t = out.final_ari;
    row.ari_kmeans = adjusted_rand_index(whole, sc.truth);
    out.report.rows.push_back(std::move(row));
    return out;
}

}  // namespace virtsense
