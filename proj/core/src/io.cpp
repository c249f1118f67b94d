#include "virtsense/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace virtsense {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kModelFormat = "virtsense-model";

json clusters_object(const ClusteringSolution& s, const std::vector<std::string>& names) {
    if (s.n_sensors() != names.size()) throw std::invalid_argument("clustering: sensor count mismatch");
    json out = json::object();
    const auto clusters = s.clusters();
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        json members = json::array();
        for (auto i : clusters[k]) members.push_back(names[i]);
        out[std::to_string(k + 1)] = std::move(members);
    }
    return out;
}

ClusteringSolution parse_clusters_object(const json& obj, const std::vector<std::string>& names) {
    if (!obj.is_object() || obj.empty()) throw std::runtime_error("clustering JSON: expected a non-empty object");
    std::map<long, const json*> by_label;
    for (const auto& [key, members] : obj.items()) {
        std::size_t used = 0;
        long label = 0;
        try {
            label = std::stol(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size()) throw std::runtime_error("clustering JSON: non-numeric cluster label '" + key + "'");
        by_label[label] = &members;
    }

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;

    constexpr auto unset = static_cast<std::size_t>(-1);
    ClusteringSolution s{std::vector<std::size_t>(names.size(), unset), by_label.size()};
    std::size_t k = 0;
    for (const auto& [label, members] : by_label) {
        for (const auto& m : *members) {
            const auto name = m.get<std::string>();
            const auto it = index.find(name);
            if (it == index.end()) throw std::runtime_error("clustering JSON: unknown sensor '" + name + "'");
            if (s.labels[it->second] != unset)
                throw std::runtime_error("clustering JSON: sensor '" + name + "' listed twice");
            s.labels[it->second] = k;
        }
        ++k;
    }
    for (std::size_t i = 0; i < names.size(); ++i)
        if (s.labels[i] == unset) throw std::runtime_error("clustering JSON: sensor '" + names[i] + "' not assigned");
    if (!s.is_valid()) throw std::runtime_error("clustering JSON: empty cluster");
    return s;
}

json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.data().size()) throw std::runtime_error("model JSON: matrix data has the wrong length");
    std::copy(data.begin(), data.end(), m.data().begin());
    return m;
}

json model_json(const Regressor& model) {
    json j;
    j["kind"] = to_string(kind_of(model));
    if (const auto* lbfr = std::get_if<LbfrModel>(&model)) {
        j["center"] = lbfr->center;
        j["width"] = lbfr->width;
        j["lambda"] = lbfr->lambda;
        j["weights"] = matrix_json(lbfr->weights);
    } else if (const auto* mlp = std::get_if<MlpModel>(&model)) {
        json layers = json::array();
        for (const auto& l : mlp->layers) layers.push_back({{"weights", matrix_json(l.weights)}, {"bias", l.bias}});
        j["layers"] = std::move(layers);
    } else {
        const auto& svr = std::get<SvrSet>(model);
        json outs = json::array();
        for (const auto& o : svr.outputs)
            outs.push_back({{"weights", o.weights}, {"bias", o.bias}, {"c", o.c}, {"epsilon", o.epsilon}});
        j["outputs"] = std::move(outs);
    }
    return j;
}

Regressor model_from(const json& j) {
    switch (parse_regressor_kind(j.at("kind").get<std::string>())) {
        case RegressorKind::lbfr: {
            LbfrModel m;
            m.center = j.at("center").get<std::vector<double>>();
            m.width = j.at("width").get<double>();
            m.lambda = j.at("lambda").get<double>();
            m.weights = matrix_from(j.at("weights"));
            if (m.weights.rows() != m.center.size() + 2) throw std::runtime_error("model JSON: LBFR weight rows != M + 2");
            return m;
        }
        case RegressorKind::mlp: {
            MlpModel m;
            for (const auto& l : j.at("layers"))
                m.layers.push_back({matrix_from(l.at("weights")), l.at("bias").get<std::vector<double>>()});
            for (std::size_t i = 0; i < m.layers.size(); ++i) {
                if (m.layers[i].bias.size() != m.layers[i].weights.cols() ||
                    (i > 0 && m.layers[i].weights.rows() != m.layers[i - 1].weights.cols()))
                    throw std::runtime_error("model JSON: inconsistent MLP layer shapes");
            }
            return m;
        }
        case RegressorKind::svr: {
            SvrSet s;
            for (const auto& o : j.at("outputs"))
                s.outputs.push_back({o.at("weights").get<std::vector<double>>(), o.at("bias").get<double>(),
                                     o.at("c").get<double>(), o.at("epsilon").get<double>()});
            return s;
        }
    }
    throw std::runtime_error("model JSON: unreachable kind");
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

std::string clustering_to_json(const ClusteringSolution& s, const std::vector<std::string>& names) {
    return clusters_object(s, names).dump(2) + "\n";
}

ClusteringSolution clustering_from_json(const std::string& text, const std::vector<std::string>& names) {
    return parse_clusters_object(json::parse(text), names);
}

std::string block_solutions_to_json(const BlockPartition& p, const std::vector<ClusteringSolution>& sols,
                                    const std::vector<std::string>& names) {
    if (p.size() != sols.size()) throw std::invalid_argument("block solutions: count mismatch");
    json blocks = json::array();
    for (std::size_t b = 0; b < sols.size(); ++b)
        blocks.push_back({{"begin", p.blocks[b].begin}, {"end", p.blocks[b].end}, {"clusters", clusters_object(sols[b], names)}});
    json out = {{"block_size", p.block_size}, {"m", sols.empty() ? 0 : sols.front().m}, {"blocks", std::move(blocks)}};
    return out.dump(2) + "\n";
}

std::vector<ClusteringSolution> block_solutions_from_json(const std::string& text,
                                                          const std::vector<std::string>& names,
                                                          std::size_t* block_size) {
    const auto j = json::parse(text);
    if (block_size) *block_size = j.at("block_size").get<std::size_t>();
    std::vector<ClusteringSolution> out;
    for (const auto& b : j.at("blocks")) out.push_back(parse_clusters_object(b.at("clusters"), names));
    if (out.empty()) throw std::runtime_error("block solutions JSON: no blocks");
    return out;
}

std::string representatives_to_json(const std::vector<Representative>& reps, const std::vector<std::string>& names) {
    json out = json::object();
    for (const auto& r : reps)
        out[std::to_string(r.cluster + 1)] = {{"sensor", names.at(r.sensor)}, {"quality", r.quality}};
    return out.dump(2) + "\n";
}

std::vector<std::string> representatives_from_json(const std::string& text) {
    const auto j = json::parse(text);
    std::map<long, std::string> by_label;
    for (const auto& [key, entry] : j.items()) by_label[std::stol(key)] = entry.at("sensor").get<std::string>();
    std::vector<std::string> out;
    for (auto& [label, name] : by_label) out.push_back(name);
    return out;
}

std::string models_to_json(const ModelBundle& bundle) {
    json models = json::array();
    for (const auto& m : bundle.models) models.push_back(model_json(m));
    json out = {{"format", kModelFormat},
                {"version", 1},
                {"input_dim", bundle.inputs.size()},
                {"output_dim", bundle.outputs.size()},
                {"inputs", bundle.inputs},
                {"outputs", bundle.outputs},
                {"norm", json::parse(bundle.norm.to_json())},
                {"models", std::move(models)}};
    return out.dump(2) + "\n";
}

ModelBundle models_from_json(const std::string& text) {
    const auto j = json::parse(text);
    if (j.value("format", "") != kModelFormat) throw std::runtime_error("model JSON: unrecognized format tag");
    ModelBundle b;
    b.inputs = j.at("inputs").get<std::vector<std::string>>();
    b.outputs = j.at("outputs").get<std::vector<std::string>>();
    b.norm = NormParams::from_json(j.at("norm").dump());
    for (const auto& m : j.at("models")) {
        b.models.push_back(model_from(m));
        if (input_dim(b.models.back()) != b.inputs.size())
            throw std::runtime_error("model JSON: model input dimension disagrees with the input list");
    }
    return b;
}

}  // namespace virtsense
