// Command-line front end for the virtual-sensor toolkit.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "virtsense/io.hpp"
#include "virtsense/pca.hpp"
#include "virtsense/pipeline.hpp"

namespace fs = std::filesystem;
using namespace virtsense;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
};

struct DataArgs {
    std::string input;
    bool no_header = false;

    void add(CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("-i,--input", input, "Sensor CSV (one column per sensor)");
        if (required) opt->required();
        cmd->add_flag("--no-header", no_header, "The CSV has no header row; sensors are named s0, s1, ...");
    }
    SensorDataset load() const { return clean_missing(load_csv(input, !no_header)); }
};

PipelineConfig load_config(const Globals& g) {
    PipelineConfig cfg = g.config_path.empty() ? PipelineConfig{} : config_from_json(read_text_file(g.config_path));
    // Paths inside a config are relative to the config file.
    const auto base = fs::path(g.config_path).parent_path();
    for (auto* p : {&cfg.input, &cfg.ground_truth})
        if (!p->empty() && fs::path(*p).is_relative()) *p = (base / *p).string();
    if (g.seed) cfg.seed = *g.seed;
    return cfg;
}

fs::path out_dir(const Globals& g) {
    fs::create_directories(g.out);
    return g.out;
}

std::vector<std::size_t> indices_of(const SensorDataset& d, const std::vector<std::string>& names) {
    std::vector<std::size_t> out;
    for (const auto& n : names) out.push_back(d.index_of(n));
    return out;
}

SensorDataset normalized(const SensorDataset& d) { return normalize(d).first; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"virtsense: sensor clustering, representative selection and virtual-sensor regression"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Seed overriding the configuration");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();

    // synth ------------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate a planted-cluster dataset and its ground truth");
    std::size_t synth_sensors = 0, synth_clusters = 0, synth_readings = 0;
    synth->add_option("--sensors", synth_sensors, "Sensor count (default: config synthetic.n_sensors)");
    synth->add_option("--clusters", synth_clusters, "Planted cluster count (default: config synthetic.planted_clusters)");
    synth->add_option("--readings", synth_readings, "Readings (default: n_blocks * block_size)");
    synth->callback([&] {
        const auto cfg = load_config(g);
        auto s = cfg.synthetic;
        if (synth_sensors) s.n_sensors = synth_sensors;
        const std::size_t m = synth_clusters ? synth_clusters : s.planted_clusters;
        if (synth_readings) {
            s.block_size = synth_readings;
            s.n_blocks = 1;
        }
        const auto c = make_synthetic_case(s, m, cfg.seed);
        const auto dir = out_dir(g);
        write_csv(dir / "data.csv", c.data);
        write_text_file(dir / "ground_truth.json", clustering_to_json(c.truth, c.data.names));
        std::cout << "wrote " << c.data.n_samples() << " readings of " << c.data.n_sensors() << " sensors in " << m
                  << " clusters to " << dir.string() << "\n";
    });

    // pca --------------------------------------------------------------------
    auto* pca = app.add_subcommand("pca", "Covariance spectrum and minimum representative count");
    DataArgs pca_data;
    pca_data.add(pca);
    std::optional<double> pca_fraction;
    pca->add_option("--fraction", pca_fraction, "Cumulative explained-variance target")->check(CLI::Range(0.0, 1.0));
    pca->callback([&] {
        const auto cfg = load_config(g);
        const auto d = normalized(pca_data.load());
        const auto spectrum = eigendecompose_sym(covariance_matrix(d));
        const double fraction = pca_fraction.value_or(cfg.variance_fraction);
        double total = 0.0;
        for (double v : spectrum.values) total += std::max(v, 0.0);
        std::ostringstream csv;
        csv << "component,eigenvalue,cumulative_fraction\n";
        double cum = 0.0;
        for (std::size_t k = 0; k < spectrum.values.size(); ++k) {
            cum += std::max(spectrum.values[k], 0.0);
            csv << k + 1 << ',' << format_double(spectrum.values[k]) << ',' << format_double(cum / total) << '\n';
        }
        std::cout << csv.str();
        const auto m0 = min_components_for_fraction(spectrum, fraction);
        std::cout << "min_sensors," << m0 << '\n';
        write_text_file(out_dir(g) / "spectrum.csv", csv.str());
    });

    // kmeans -----------------------------------------------------------------
    auto* km = app.add_subcommand("kmeans", "K-Means on every block; writes blocks.json");
    DataArgs km_data;
    km_data.add(km);
    std::size_t km_m = 0;
    std::size_t km_block = 0;
    km->add_option("-m,--clusters", km_m, "Cluster count")->required()->check(CLI::PositiveNumber);
    km->add_option("--block-size", km_block, "Readings per block (default: config block_size)");
    km->callback([&] {
        const auto cfg = load_config(g);
        const auto d = normalized(km_data.load());
        const auto blocks = partition_blocks(d, km_block ? km_block : cfg.block_size);
        const auto sols = cluster_all_blocks(blocks, km_m, mix_seed(cfg.seed, 1), cfg.kmeans);
        const auto path = out_dir(g) / "blocks.json";
        write_text_file(path, block_solutions_to_json(blocks, sols, d.names));
        std::cout << "clustered " << blocks.size() << " blocks into " << km_m << " clusters; wrote " << path.string()
                  << "\n";
    });

    // fuse -------------------------------------------------------------------
    auto* fuse = app.add_subcommand("fuse", "Fuse per-block clusterings; writes clustering.json and history.csv");
    DataArgs fuse_data;
    fuse_data.add(fuse);
    std::string fuse_blocks;
    fuse->add_option("--blocks", fuse_blocks, "Per-block clustering JSON from 'kmeans'")
        ->required()
        ->check(CLI::ExistingFile);
    fuse->callback([&] {
        const auto cfg = load_config(g);
        const auto d = normalized(fuse_data.load());
        std::size_t block_size = 0;
        const auto sols = block_solutions_from_json(read_text_file(fuse_blocks), d.names, &block_size);
        const auto blocks = partition_blocks(d, block_size);
        if (blocks.size() != sols.size())
            throw std::runtime_error("block JSON lists " + std::to_string(sols.size()) + " blocks but the data yields " +
                                     std::to_string(blocks.size()));
        const auto result = run_fac2t(blocks, sols, cfg.fac2t, mix_seed(cfg.seed, 2));
        const auto dir = out_dir(g);
        write_text_file(dir / "clustering.json", clustering_to_json(result.best, d.names));
        write_text_file(dir / "history.csv", history_to_csv(result.history));
        std::cout << "best objective " << format_double(result.best_metric) << " after " << cfg.fac2t.iterations
                  << " iterations\n";
    });

    // select -----------------------------------------------------------------
    auto* sel = app.add_subcommand("select", "Pick one representative per cluster; writes representatives.json");
    DataArgs sel_data;
    sel_data.add(sel);
    std::string sel_clustering;
    sel->add_option("--clustering", sel_clustering, "Clustering JSON")->required()->check(CLI::ExistingFile);
    sel->callback([&] {
        const auto d = sel_data.load();
        const auto sol = clustering_from_json(read_text_file(sel_clustering), d.names);
        const auto reps = select_representatives(sol, d);
        write_text_file(out_dir(g) / "representatives.json", representatives_to_json(reps, d.names));
        for (const auto& r : reps)
            std::cout << r.cluster + 1 << ',' << d.names[r.sensor] << ',' << format_double(r.quality) << '\n';
    });

    // train ------------------------------------------------------------------
    auto* train = app.add_subcommand("train", "Train regressors from representatives to the other sensors");
    DataArgs train_data;
    train_data.add(train);
    std::string train_reps;
    std::vector<std::string> train_kinds;
    train->add_option("--representatives", train_reps, "Representatives JSON")->required()->check(CLI::ExistingFile);
    train->add_option("--model", train_kinds, "Regressor kinds (lbfr, mlp, svr); default: config regressors");
    train->callback([&] {
        const auto cfg = load_config(g);
        const auto raw = train_data.load();
        ModelBundle bundle;
        bundle.inputs = representatives_from_json(read_text_file(train_reps));
        const auto in_idx = indices_of(raw, bundle.inputs);
        for (std::size_t j = 0; j < raw.n_sensors(); ++j)
            if (std::find(in_idx.begin(), in_idx.end(), j) == in_idx.end()) bundle.outputs.push_back(raw.names[j]);
        if (bundle.outputs.empty()) throw std::runtime_error("every sensor is a representative; nothing to train");

        auto [d, norm] = normalize(raw);
        bundle.norm = norm;
        const Matrix x = d.values.select_columns(in_idx);
        const Matrix y = d.values.select_columns(indices_of(d, bundle.outputs));
        std::vector<RegressorKind> kinds = cfg.regressors;
        if (!train_kinds.empty()) {
            kinds.clear();
            for (const auto& k : train_kinds) kinds.push_back(parse_regressor_kind(k));
        }
        for (auto kind : kinds) {
            const auto seed = mix_seed(cfg.seed, 10 + static_cast<std::uint64_t>(kind));
            switch (kind) {
                case RegressorKind::lbfr: bundle.models.push_back(lbfr_fit(x, y, cfg.lbfr_lambda)); break;
                case RegressorKind::mlp: bundle.models.push_back(mlp_fit(x, y, cfg.adam, seed, cfg.mlp).model); break;
                case RegressorKind::svr: bundle.models.push_back(svr_fit_all(x, y, cfg.svr, seed)); break;
            }
            std::cout << to_string(kind) << " training MSE " << format_double(mse(predict(bundle.models.back(), x), y))
                      << '\n';
        }
        write_text_file(out_dir(g) / "model.json", models_to_json(bundle));
    });

    // predict ----------------------------------------------------------------
    auto* pred = app.add_subcommand("predict", "Estimate virtual sensors; writes predictions.csv in sensor units");
    DataArgs pred_data;
    pred_data.add(pred);
    std::string pred_model;
    pred->add_option("--model", pred_model, "Model JSON from 'train' or 'pipeline'")->required()->check(CLI::ExistingFile);
    pred->callback([&] {
        const auto bundle = models_from_json(read_text_file(pred_model));
        const auto raw = pred_data.load();
        const auto inputs = bundle.norm.subset(bundle.inputs).apply(raw.select_sensors(indices_of(raw, bundle.inputs)));
        const auto out_norm = bundle.norm.subset(bundle.outputs);

        // Actual readings are echoed when the CSV happens to contain the virtual sensors.
        std::vector<std::optional<std::size_t>> actual_col;
        for (const auto& n : bundle.outputs) {
            const auto it = std::find(raw.names.begin(), raw.names.end(), n);
            actual_col.push_back(it == raw.names.end() ? std::nullopt
                                                       : std::optional<std::size_t>(it - raw.names.begin()));
        }
        std::vector<SensorDataset> preds;
        for (const auto& m : bundle.models) preds.push_back(out_norm.invert({bundle.outputs, predict(m, inputs.values)}));

        std::ostringstream csv;
        csv << "index";
        for (std::size_t c = 0; c < bundle.outputs.size(); ++c) {
            if (actual_col[c]) csv << ',' << bundle.outputs[c] << "_actual";
            for (const auto& m : bundle.models) csv << ',' << bundle.outputs[c] << '_' << to_string(kind_of(m));
        }
        csv << '\n';
        for (std::size_t i = 0; i < raw.n_samples(); ++i) {
            csv << i;
            for (std::size_t c = 0; c < bundle.outputs.size(); ++c) {
                if (actual_col[c]) csv << ',' << format_double(raw.values(i, *actual_col[c]));
                for (const auto& p : preds) csv << ',' << format_double(p.values(i, c));
            }
            csv << '\n';
        }
        const auto path = out_dir(g) / "predictions.csv";
        write_text_file(path, csv.str());
        std::cout << "wrote " << raw.n_samples() << " predictions to " << path.string() << '\n';
    });

    // pipeline ---------------------------------------------------------------
    auto* pipe = app.add_subcommand("pipeline", "Full loop: cluster, select, train, raise M until the MSE target is met");
    DataArgs pipe_data;
    pipe_data.add(pipe, false);
    std::string pipe_truth;
    pipe->add_option("--ground-truth", pipe_truth, "Planted clustering JSON for ARI columns")
        ->check(CLI::ExistingFile);
    pipe->callback([&] {
        auto cfg = load_config(g);
        if (!pipe_data.input.empty()) {
            cfg.input = pipe_data.input;
            cfg.header = !pipe_data.no_header;
        }
        if (!pipe_truth.empty()) cfg.ground_truth = pipe_truth;
        const auto result = run_pipeline(cfg);
        const auto dir = out_dir(g);
        write_pipeline_outputs(result, dir);
        std::cout << "PCA estimate " << result.pca_estimate << ", accepted M = " << result.accepted_m << '\n';
        std::cout << result.report.to_csv();
    });

    // experiments ------------------------------------------------------------
    auto* exp_a = app.add_subcommand("exp-a", "Fusion vs whole-data K-Means vs planted clustering on synthetic data");
    exp_a->callback([&] {
        const auto cfg = load_config(g);
        const auto report = run_experiment_a(cfg);
        write_text_file(out_dir(g) / "report.csv", report.to_csv());
        std::cout << report.to_csv();
    });

    auto* exp_b = app.add_subcommand("exp-b", "Fusion from corrupted block clusterings");
    exp_b->callback([&] {
        const auto cfg = load_config(g);
        const auto r = run_experiment_b(cfg);
        const auto dir = out_dir(g);
        write_text_file(dir / "report.csv", r.report.to_csv());
        write_text_file(dir / "history.csv", history_to_csv(r.history));
        std::cout << "initial best metric " << format_double(r.initial_best_metric) << ", final "
                  << format_double(r.final_best_metric) << "\ninitial ARI " << format_double(r.initial_ari)
                  << ", final " << format_double(r.final_ari) << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "virtsense: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "virtsense: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
