#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "virtsense/matrix.hpp"

namespace virtsense {

/// Time-aligned sensor readings: one column per sensor, one row per sample.
/// Missing cells are stored as quiet NaN.
struct SensorDataset {
    std::vector<std::string> names;
    Matrix values;

    std::size_t n_sensors() const noexcept { return values.cols(); }
    std::size_t n_samples() const noexcept { return values.rows(); }

    /// Column j as a contiguous vector.
    std::vector<double> sensor(std::size_t j) const { return values.column(j); }
    std::size_t index_of(const std::string& name) const;
    SensorDataset select_sensors(const std::vector<std::size_t>& columns) const;
    SensorDataset select_samples(const std::vector<std::size_t>& rows) const;
};

/// Per-sensor min-max scaling fitted on a training split.
struct NormParams {
    struct Range {
        double min = 0.0;
        double max = 1.0;
    };
    std::vector<std::string> names;
    std::vector<Range> ranges;

    /// (x − min)/(max − min); constant sensors map to 0.5.
    SensorDataset apply(const SensorDataset& d) const;
    SensorDataset invert(const SensorDataset& d) const;
    NormParams subset(const std::vector<std::string>& sensor_names) const;

    std::string to_json() const;
    static NormParams from_json(const std::string& text);
};

/// Contiguous row range [begin, end) of a dataset, plus the same readings
/// laid out sensor-major (row = sensor, column = reading within block) so that
/// each sensor is a point for clustering.
struct Block {
    std::size_t begin = 0;
    std::size_t end = 0;
    Matrix sensor_points;
};

struct BlockPartition {
    std::size_t block_size = 0;
    std::vector<Block> blocks;

    std::size_t size() const noexcept { return blocks.size(); }
    std::size_t n_sensors() const noexcept { return blocks.empty() ? 0 : blocks.front().sensor_points.rows(); }
};

SensorDataset load_csv(const std::filesystem::path& path, bool header = true);
SensorDataset parse_csv(std::istream& in, bool header = true);
void write_csv(const std::filesystem::path& path, const SensorDataset& d);

/// Drops every row holding a missing or non-finite value.
SensorDataset clean_missing(const SensorDataset& d);

NormParams fit_normalization(const SensorDataset& d);
std::pair<SensorDataset, NormParams> normalize(const SensorDataset& d);

/// floor(n_samples / block_size) blocks; the remainder is dropped.
BlockPartition partition_blocks(const SensorDataset& d, std::size_t block_size);

/// Seeded row-level shuffle split. The train part holds round(fraction·n)
/// rows; both parts keep their rows in original order.
std::pair<SensorDataset, SensorDataset> split_train_test(const SensorDataset& d, double train_fraction,
                                                         std::uint64_t seed);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

}  // namespace virtsense
