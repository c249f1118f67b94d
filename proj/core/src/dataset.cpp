#include "virtsense/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "virtsense/random.hpp"

namespace virtsense {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

bool is_nan_token(std::string_view s) {
    return s.size() == 3 && std::tolower(s[0]) == 'n' && std::tolower(s[1]) == 'a' && std::tolower(s[2]) == 'n';
}

double parse_cell(std::string_view cell, std::size_t line_no) {
    if (cell.empty() || is_nan_token(cell)) return kMissing;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": non-numeric cell '" + std::string(cell) + "'");
    return value;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

std::size_t SensorDataset::index_of(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("unknown sensor '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

SensorDataset SensorDataset::select_sensors(const std::vector<std::size_t>& columns) const {
    SensorDataset out;
    for (auto c : columns) out.names.push_back(names.at(c));
    out.values = values.select_columns(columns);
    return out;
}

SensorDataset SensorDataset::select_samples(const std::vector<std::size_t>& rows) const {
    return {names, values.select_rows(rows)};
}

SensorDataset parse_csv(std::istream& in, bool header) {
    SensorDataset d;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;
    std::size_t n_cols = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        auto fields = split_fields(line);
        if (header && d.names.empty() && rows.empty()) {
            for (auto f : fields) d.names.emplace_back(f);
            n_cols = fields.size();
            continue;
        }
        if (n_cols == 0) n_cols = fields.size();
        if (fields.size() != n_cols)
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " + std::to_string(n_cols) +
                                     " fields, found " + std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(n_cols);
        for (auto f : fields) row.push_back(parse_cell(f, line_no));
        rows.push_back(std::move(row));
    }
    if (n_cols == 0)
        throw std::runtime_error("csv: no columns");
    if (d.names.empty())
        for (std::size_t j = 0; j < n_cols; ++j) d.names.push_back("s" + std::to_string(j));

    d.values = Matrix(rows.size(), n_cols);
    for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), d.values.row(i).begin());
    return d;
}

SensorDataset load_csv(const std::filesystem::path& path, bool header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    return parse_csv(in, header);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_csv(const std::filesystem::path& path, const SensorDataset& d) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    for (std::size_t j = 0; j < d.names.size(); ++j) out << (j ? "," : "") << d.names[j];
    out << '\n';
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        auto row = d.values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            if (std::isfinite(row[j])) out << format_double(row[j]);
        }
        out << '\n';
    }
}

SensorDataset clean_missing(const SensorDataset& d) {
    std::vector<std::size_t> keep;
    keep.reserve(d.n_samples());
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        auto row = d.values.row(i);
        if (std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) keep.push_back(i);
    }
    if (keep.empty()) throw std::runtime_error("clean_missing: no complete rows remain");
    return d.select_samples(keep);
}

NormParams fit_normalization(const SensorDataset& d) {
    NormParams p;
    p.names = d.names;
    p.ranges.resize(d.n_sensors(), {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        auto row = d.values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (!std::isfinite(row[j])) continue;
            p.ranges[j].min = std::min(p.ranges[j].min, row[j]);
            p.ranges[j].max = std::max(p.ranges[j].max, row[j]);
        }
    }
    for (auto& r : p.ranges)
        if (!std::isfinite(r.min)) r = {0.0, 0.0};
    return p;
}

SensorDataset NormParams::apply(const SensorDataset& d) const {
    if (d.n_sensors() != ranges.size()) throw std::invalid_argument("NormParams::apply: sensor count mismatch");
    SensorDataset out = d;
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        auto row = out.values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double span = ranges[j].max - ranges[j].min;
            row[j] = span > 0.0 ? (row[j] - ranges[j].min) / span : 0.5;
        }
    }
    return out;
}

SensorDataset NormParams::invert(const SensorDataset& d) const {
    if (d.n_sensors() != ranges.size()) throw std::invalid_argument("NormParams::invert: sensor count mismatch");
    SensorDataset out = d;
    for (std::size_t i = 0; i < d.n_samples(); ++i) {
        auto row = out.values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double span = ranges[j].max - ranges[j].min;
            row[j] = span > 0.0 ? ranges[j].min + row[j] * span : ranges[j].min;
        }
    }
    return out;
}

NormParams NormParams::subset(const std::vector<std::string>& sensor_names) const {
    NormParams out;
    for (const auto& n : sensor_names) {
        const auto it = std::find(names.begin(), names.end(), n);
        if (it == names.end()) throw std::invalid_argument("NormParams::subset: unknown sensor '" + n + "'");
        out.names.push_back(n);
        out.ranges.push_back(ranges[static_cast<std::size_t>(it - names.begin())]);
    }
    return out;
}

std::string NormParams::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = {{"min", ranges[i].min}, {"max", ranges[i].max}};
    return j.dump(2);
}

NormParams NormParams::from_json(const std::string& text) {
    const auto j = nlohmann::ordered_json::parse(text);
    if (!j.is_object()) throw std::runtime_error("norm params: expected a JSON object");
    NormParams p;
    for (const auto& [name, r] : j.items()) {
        p.names.push_back(name);
        p.ranges.push_back({r.at("min").get<double>(), r.at("max").get<double>()});
        if (p.ranges.back().max < p.ranges.back().min)
            throw std::runtime_error("norm params: max < min for '" + name + "'");
    }
    return p;
}

std::pair<SensorDataset, NormParams> normalize(const SensorDataset& d) {
    auto params = fit_normalization(d);
    return {params.apply(d), std::move(params)};
}

BlockPartition partition_blocks(const SensorDataset& d, std::size_t block_size) {
    if (block_size < 2 || block_size > d.n_samples())
        throw std::invalid_argument("partition_blocks: block_size " + std::to_string(block_size) +
                                    " outside [2, " + std::to_string(d.n_samples()) + "]");
    BlockPartition p;
    p.block_size = block_size;
    const std::size_t n_blocks = d.n_samples() / block_size;
    p.blocks.reserve(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        Block blk;
        blk.begin = b * block_size;
        blk.end = blk.begin + block_size;
        blk.sensor_points = d.values.row_slice(blk.begin, blk.end).transposed();
        p.blocks.push_back(std::move(blk));
    }
    return p;
}

std::pair<SensorDataset, SensorDataset> split_train_test(const SensorDataset& d, double train_fraction,
                                                         std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split_train_test: train fraction must lie in (0, 1)");
    std::vector<std::size_t> order(d.n_samples());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(d.n_samples())));
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {d.select_samples(train), d.select_samples(test)};
}

}  // namespace virtsense
