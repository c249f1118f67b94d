#include <set>
#include <stdexcept>

#include <json.hpp>

#include "virtsense/pipeline.hpp"

namespace virtsense {

using json = nlohmann::ordered_json;

namespace {

// Reads optional fields from one JSON object and rejects keys nobody asked for,
// so a misspelled option fails loudly instead of silently keeping its default.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw std::runtime_error("config: '" + path_ + "' must be an object");
    }

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw std::runtime_error("config: bad value for '" + qualified(key) + "': " + e.what());
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw std::runtime_error("config: unknown key '" + qualified(key) + "'");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

PipelineConfig config_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
    }
    PipelineConfig cfg;
    Section top(root, "");
    top.read("input", cfg.input);
    top.read("header", cfg.header);
    top.read("ground_truth", cfg.ground_truth);
    top.read("block_size", cfg.block_size);
    top.read("train_fraction", cfg.train_fraction);
    top.read("variance_fraction", cfg.variance_fraction);
    top.read("mse_threshold", cfg.mse_threshold);
    top.read("max_clusters", cfg.max_clusters);
    top.read("cluster_counts", cfg.cluster_counts);
    top.read("seed", cfg.seed);

    if (const auto* r = top.child("regressors")) {
        cfg.regressors.clear();
        for (const auto& name : *r) cfg.regressors.push_back(parse_regressor_kind(name.get<std::string>()));
    }
    if (const auto* f = top.child("fac2t")) {
        Section s(*f, "fac2t");
        auto& p = cfg.fac2t;
        s.read("alpha", p.alpha);
        s.read("beta", p.beta);
        s.read("gamma", p.gamma);
        s.read("tau", p.tau);
        s.read("theta", p.theta);
        s.read("alpha_max", p.alpha_max);
        s.read("n_ants", p.n_ants);
        s.read("iterations", p.iterations);
        s.read("epsilon_g", p.epsilon_g);
        s.read("delta", p.delta);
        s.finish();
    }
    if (const auto* k = top.child("kmeans")) {
        Section s(*k, "kmeans");
        s.read("max_iter", cfg.kmeans.max_iter);
        s.read("tol", cfg.kmeans.tol);
        s.finish();
    }
    if (const auto* l = top.child("lbfr")) {
        Section s(*l, "lbfr");
        s.read("lambda", cfg.lbfr_lambda);
        s.finish();
    }
    if (const auto* m = top.child("mlp")) {
        Section s(*m, "mlp");
        s.read("hidden_layers", cfg.mlp.hidden_layers);
        s.read("hidden_width", cfg.mlp.hidden_width);
        s.read("learning_rate", cfg.adam.learning_rate);
        s.read("beta1", cfg.adam.beta1);
        s.read("beta2", cfg.adam.beta2);
        s.read("epsilon", cfg.adam.epsilon);
        s.read("batch_size", cfg.adam.batch_size);
        s.read("epochs", cfg.adam.epochs);
        s.finish();
    }
    if (const auto* v = top.child("svr")) {
        Section s(*v, "svr");
        s.read("c", cfg.svr.c);
        s.read("epsilon", cfg.svr.epsilon);
        s.read("steps", cfg.svr.steps);
        s.read("batch_size", cfg.svr.batch_size);
        s.read("learning_rate", cfg.svr.learning_rate);
        s.read("decay", cfg.svr.decay);
        s.finish();
    }
    if (const auto* y = top.child("synthetic")) {
        Section s(*y, "synthetic");
        auto& syn = cfg.synthetic;
        s.read("n_datasets", syn.n_datasets);
        s.read("n_sensors", syn.n_sensors);
        s.read("n_blocks", syn.n_blocks);
        s.read("block_size", syn.block_size);
        s.read("cluster_counts", syn.cluster_counts);
        s.read("planted_clusters", syn.planted_clusters);
        s.read("corruption_fraction", syn.corruption_fraction);
        s.read("eigen_floor", syn.eigen_floor);
        if (const auto* t = s.child("triangular")) {
            Section ts(*t, "synthetic.triangular");
            ts.read("low", syn.triangular.low);
            ts.read("peak", syn.triangular.peak);
            ts.read("high", syn.triangular.high);
            ts.finish();
        }
        s.finish();
    }
    top.finish();

    cfg.fac2t.validate();
    cfg.adam.validate();
    cfg.svr.validate();
    cfg.synthetic.triangular.validate();
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
        throw std::runtime_error("config: train_fraction must lie in (0, 1)");
    if (!(cfg.variance_fraction > 0.0 && cfg.variance_fraction <= 1.0))
        throw std::runtime_error("config: variance_fraction must lie in (0, 1]");
    if (!(cfg.mse_threshold > 0.0)) throw std::runtime_error("config: mse_threshold must be > 0");
    return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
    json regressors = json::array();
    for (auto k : cfg.regressors) regressors.push_back(to_string(k));
    const auto& p = cfg.fac2t;
    const auto& syn = cfg.synthetic;
    json j = {
        {"input", cfg.input},
        {"header", cfg.header},
        {"ground_truth", cfg.ground_truth},
        {"block_size", cfg.block_size},
        {"train_fraction", cfg.train_fraction},
        {"variance_fraction", cfg.variance_fraction},
        {"mse_threshold", cfg.mse_threshold},
        {"max_clusters", cfg.max_clusters},
        {"cluster_counts", cfg.cluster_counts},
        {"seed", cfg.seed},
        {"regressors", regressors},
        {"fac2t",
         {{"alpha", p.alpha},
          {"beta", p.beta},
          {"gamma", p.gamma},
          {"tau", p.tau},
          {"theta", p.theta},
          {"alpha_max", p.alpha_max},
          {"n_ants", p.n_ants},
          {"iterations", p.iterations},
          {"epsilon_g", p.epsilon_g},
          {"delta", p.delta}}},
        {"kmeans", {{"max_iter", cfg.kmeans.max_iter}, {"tol", cfg.kmeans.tol}}},
        {"lbfr", {{"lambda", cfg.lbfr_lambda}}},
        {"mlp",
         {{"hidden_layers", cfg.mlp.hidden_layers},
          {"hidden_width", cfg.mlp.hidden_width},
          {"learning_rate", cfg.adam.learning_rate},
          {"beta1", cfg.adam.beta1},
          {"beta2", cfg.adam.beta2},
          {"epsilon", cfg.adam.epsilon},
          {"batch_size", cfg.adam.batch_size},
          {"epochs", cfg.adam.epochs}}},
        {"svr",
         {{"c", cfg.svr.c},
          {"epsilon", cfg.svr.epsilon},
          {"steps", cfg.svr.steps},
          {"batch_size", cfg.svr.batch_size},
          {"learning_rate", cfg.svr.learning_rate},
          {"decay", cfg.svr.decay}}},
        {"synthetic",
         {{"n_datasets", syn.n_datasets},
          {"n_sensors", syn.n_sensors},
          {"n_blocks", syn.n_blocks},
          {"block_size", syn.block_size},
          {"cluster_counts", syn.cluster_counts},
          {"planted_clusters", syn.planted_clusters},
          {"corruption_fraction", syn.corruption_fraction},
          {"triangular", {{"low", syn.triangular.low}, {"peak", syn.triangular.peak}, {"high", syn.triangular.high}}},
          {"eigen_floor", syn.eigen_floor}}},
    };
    return j.dump(2) + "\n";
}

}  // namespace virtsense
