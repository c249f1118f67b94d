#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "virtsense/clustering.hpp"
#include "virtsense/dataset.hpp"
#include "virtsense/regress.hpp"
#include "virtsense/repsel.hpp"

namespace virtsense {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"<label>": [sensor names...]} with one-based labels.
std::string clustering_to_json(const ClusteringSolution& s, const std::vector<std::string>& names);
/// Inverse of `clustering_to_json`. Labels are renumbered in ascending numeric
/// order; every sensor in `names` must appear exactly once.
ClusteringSolution clustering_from_json(const std::string& text, const std::vector<std::string>& names);

/// Per-block solutions: {"block_size", "m", "blocks": [{"begin", "end", "clusters": {...}}]}.
std::string block_solutions_to_json(const BlockPartition& p, const std::vector<ClusteringSolution>& sols,
                                    const std::vector<std::string>& names);
std::vector<ClusteringSolution> block_solutions_from_json(const std::string& text,
                                                          const std::vector<std::string>& names,
                                                          std::size_t* block_size = nullptr);

/// {"<label>": {"sensor": name, "quality": Q}}
std::string representatives_to_json(const std::vector<Representative>& reps, const std::vector<std::string>& names);
/// Representative sensor names in label order.
std::vector<std::string> representatives_from_json(const std::string& text);

/// Trained regressors together with the sensor roles and scaling they expect.
struct ModelBundle {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    NormParams norm;
    std::vector<Regressor> models;
};

std::string models_to_json(const ModelBundle& bundle);
ModelBundle models_from_json(const std::string& text);

}  // namespace virtsense
